#include "wfshap/attribution.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "wfshap/rng.hpp"

namespace wfshap {

namespace {

/// |S|!(n-|S|-1)!/n! for |S| = 0..n-1, as 1 / (n * C(n-1, |S|)).
std::vector<double> shapley_weights(std::size_t n) {
  std::vector<double> w(n);
  double binom = 1.0;  // C(n-1, s)
  for (std::size_t s = 0; s < n; ++s) {
    w[s] = 1.0 / (static_cast<double>(n) * binom);
    binom = binom * static_cast<double>(n - 1 - s) / static_cast<double>(s + 1);
  }
  return w;
}

void require_member(const GameTable& game, const ComponentId& component) {
  if (!game.components().contains(component)) {
    throw ValidationError("component '" + component.label + "' (index " + std::to_string(component.index) +
                          ") is not a player of this game");
  }
}

/// Running mean and variance; exact for constant sequences.
struct Welford {
  std::size_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++count;
    const double delta = x - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (x - mean);
  }

  double standard_error() const {
    if (count < 2) return std::numeric_limits<double>::quiet_NaN();
    return std::sqrt(m2 / static_cast<double>(count - 1)) / std::sqrt(static_cast<double>(count));
  }
};

void check_config(const EstimatorConfig& config) {
  if (config.method != Method::kPermutationMc) {
    throw ValidationError("permutation estimator requires method permutation_mc");
  }
  if (config.samples == 0) throw ValidationError("permutation estimator needs a positive sample count");
  if (config.antithetic && config.samples < 2) {
    throw ValidationError("antithetic sampling needs at least 2 samples (one ordering and its reverse)");
  }
  if (config.antithetic && config.samples % 2 != 0) {
    throw ValidationError("antithetic sampling needs an even sample count, got " +
                          std::to_string(config.samples));
  }
}

template <typename ValueFn>
AttributionResult permutation_estimate(ValueFn&& value, const ComponentSet& components,
                                       const EstimatorConfig& config) {
  check_config(config);
  const auto n = components.size();

  AttributionResult result;
  result.labels = components.labels();
  result.method = Method::kPermutationMc;
  result.samples = config.samples;
  result.seed = config.seed;
  result.empty_value = value(Mask{0});
  result.grand_value = value(full_mask(n));

  std::vector<Welford> stats(n);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> forward(n);
  std::vector<double> backward(n);

  auto walk = [&](auto first, auto last, std::vector<double>& marginals) {
    Mask coalition = 0;
    double previous = result.empty_value;
    for (auto it = first; it != last; ++it) {
      coalition |= bit(*it);
      const double current = value(coalition);
      marginals[*it] = current - previous;
      previous = current;
    }
  };

  Rng rng(config.seed);
  const std::size_t units = config.antithetic ? config.samples / 2 : config.samples;
  for (std::size_t u = 0; u < units; ++u) {
    rng.shuffle(std::span<std::size_t>(order));
    walk(order.begin(), order.end(), forward);
    if (config.antithetic) {
      walk(order.rbegin(), order.rend(), backward);
      for (std::size_t i = 0; i < n; ++i) stats[i].add(0.5 * (forward[i] + backward[i]));
    } else {
      for (std::size_t i = 0; i < n; ++i) stats[i].add(forward[i]);
    }
  }

  result.phi.resize(n);
  std::vector<double> se(n);
  for (std::size_t i = 0; i < n; ++i) {
    result.phi[i] = stats[i].mean;
    se[i] = stats[i].standard_error();
  }
  result.std_error = std::move(se);
  return result;
}

}  // namespace

std::string_view method_name(Method method) {
  switch (method) {
    case Method::kExact:
      return "exact";
    case Method::kPermutationMc:
      return "permutation_mc";
    case Method::kReported:
      return "reported";
  }
  return "exact";
}

Method parse_method(std::string_view name) {
  if (name == "exact") return Method::kExact;
  if (name == "permutation_mc" || name == "mc") return Method::kPermutationMc;
  if (name == "reported") return Method::kReported;
  throw ValidationError("unknown attribution method '" + std::string(name) + "'");
}

double AttributionResult::phi_sum() const {
  return std::accumulate(phi.begin(), phi.end(), 0.0);
}

double AttributionResult::efficiency_residual() const {
  return std::abs(phi_sum() - (grand_value - empty_value));
}

double marginal_contribution(const GameTable& game, const ComponentId& component, const Coalition& s) {
  require_member(game, component);
  if (s.width() != game.size()) throw ValidationError("coalition width does not match the game");
  if (s.contains(component.index)) {
    throw ValidationError("component '" + component.label + "' is already in coalition mask " +
                          std::to_string(s.mask()));
  }
  const Mask with = s.mask() | bit(component.index);
  return game.value(with) - game.value(s.mask());
}

AttributionResult shapley_exact(const GameTable& game) {
  game.require_complete();
  const auto n = game.size();
  const auto v = game.dense();
  const auto weights = shapley_weights(n);

  AttributionResult result;
  result.labels = game.components().labels();
  result.method = Method::kExact;
  result.phi.assign(n, 0.0);
  result.empty_value = v[0];
  result.grand_value = v[full_mask(n)];

  for (Mask m = 0; m < v.size(); ++m) {
    const auto size = static_cast<std::size_t>(std::popcount(m));
    if (size == n) continue;
    const double w = weights[size];
    for (std::size_t i = 0; i < n; ++i) {
      if ((m & bit(i)) != 0) continue;
      result.phi[i] += w * (v[m | bit(i)] - v[m]);
    }
  }
  return result;
}

AttributionResult shapley_permutation(const GameTable& game, const EstimatorConfig& config) {
  check_config(config);
  game.require_complete();
  const auto v = game.dense();
  return permutation_estimate([v](Mask m) { return v[m]; }, game.components(), config);
}

AttributionResult shapley_permutation(const CoalitionOracle& oracle, const ComponentSet& components,
                                      const EstimatorConfig& config) {
  check_config(config);
  if (!oracle) throw ValidationError("permutation estimator needs a coalition oracle");
  const auto n = components.size();
  std::unordered_map<Mask, double> memo;
  auto value = [&](Mask m) {
    if (auto it = memo.find(m); it != memo.end()) return it->second;
    double v = 0.0;
    try {
      v = oracle(Coalition(m, n));
    } catch (const OracleError&) {
      throw;
    } catch (const EvaluationError&) {
      throw;
    } catch (const std::exception& e) {
      throw OracleError("evaluating coalition mask " + std::to_string(m) + " failed: " + e.what(), m);
    }
    if (!std::isfinite(v)) {
      throw OracleError("coalition mask " + std::to_string(m) + " evaluated to a non-finite value", m);
    }
    memo.emplace(m, v);
    return v;
  };
  return permutation_estimate(value, components, config);
}

double synergy_pair(const GameTable& game, const ComponentId& i, const ComponentId& j) {
  require_member(game, i);
  require_member(game, j);
  if (i.index == j.index) throw ValidationError("synergy needs two distinct components, got '" + i.label + "' twice");
  const Mask a = bit(i.index);
  const Mask b = bit(j.index);
  return game.value(a | b) - game.value(a) - game.value(b) + game.value(Mask{0});
}

SynergyMatrix synergy_matrix(const GameTable& game) {
  const auto n = game.size();
  SynergyMatrix out;
  out.labels = game.components().labels();
  out.entries.assign(n * n, 0.0);
  const auto& components = game.components();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double s = synergy_pair(game, components.id(i), components.id(j));
      out.entries[i * n + j] = s;
      out.entries[j * n + i] = s;
    }
  }
  return out;
}

AxiomReport check_axioms(const GameTable& game, const AttributionResult& result, double tol) {
  const auto n = game.size();
  if (result.phi.size() != n) {
    throw ValidationError("attribution has " + std::to_string(result.phi.size()) + " components but the game has " +
                          std::to_string(n));
  }
  if (!(tol > 0.0)) throw ValidationError("axiom tolerance must be positive");

  AxiomReport report;
  report.efficiency_residual = std::abs(result.phi_sum() - (game.grand_value() - game.empty_value()));
  report.efficiency_pass = report.efficiency_residual <= tol;
  if (!game.is_complete()) return report;

  report.scanned = true;
  const auto v = game.dense();
  for (std::size_t i = 0; i < n; ++i) {
    bool null_player = true;
    for (Mask m = 0; m < v.size() && null_player; ++m) {
      if ((m & bit(i)) == 0 && v[m | bit(i)] != v[m]) null_player = false;
    }
    if (!null_player) continue;
    report.null_players.push_back(i);
    if (std::abs(result.phi[i]) > tol) report.dummy_violations.push_back(i);
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const Mask both = bit(i) | bit(j);
      bool interchangeable = true;
      for (Mask m = 0; m < v.size() && interchangeable; ++m) {
        if ((m & both) == 0 && v[m | bit(i)] != v[m | bit(j)]) interchangeable = false;
      }
      if (!interchangeable) continue;
      report.interchangeable_pairs.emplace_back(i, j);
      if (std::abs(result.phi[i] - result.phi[j]) > tol) report.symmetry_violations.emplace_back(i, j);
    }
  }
  return report;
}

}  // namespace wfshap
