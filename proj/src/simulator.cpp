#include "wfshap/simulator.hpp"

#include <algorithm>
#include <cmath>

#include "json_util.hpp"
#include "wfshap/rng.hpp"

namespace wfshap {

using detail::Json;

namespace {

void check_coalition(const SyntheticGameSpec& spec, const Coalition& coalition) {
  if (coalition.width() != spec.n) {
    throw ValidationError("coalition width " + std::to_string(coalition.width()) + " does not match spec n = " +
                          std::to_string(spec.n));
  }
}

double success_rate(const SyntheticGameSpec& spec, const Coalition& coalition) {
  check_coalition(spec, coalition);
  const double p = spec.value(coalition.mask());
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ValidationError("coalition mask " + std::to_string(coalition.mask()) + " has value " +
                          std::to_string(p) + " outside [0, 1] and clamping is disabled");
  }
  return p;
}

}  // namespace

void SyntheticGameSpec::set_gamma(std::size_t i, std::size_t j, double value) {
  if (interactions.size() != n * n) interactions.assign(n * n, 0.0);
  interactions.at(i * n + j) = value;
  interactions.at(j * n + i) = value;
}

double SyntheticGameSpec::raw_value(Mask mask) const {
  double v = base;
  for (std::size_t i = 0; i < n; ++i) {
    if ((mask & bit(i)) != 0) v += weights[i];
  }
  if (interactions.empty()) return v;
  for (std::size_t i = 0; i < n; ++i) {
    if ((mask & bit(i)) == 0) continue;
    for (std::size_t j = i + 1; j < n; ++j) {
      if ((mask & bit(j)) != 0) v += interactions[i * n + j];
    }
  }
  return v;
}

double SyntheticGameSpec::value(Mask mask) const {
  const double v = raw_value(mask);
  return clamp ? std::clamp(v, 0.0, 1.0) : v;
}

void SyntheticGameSpec::validate() const {
  if (n > kMaxComponents) throw ValidationError("synthetic spec n exceeds " + std::to_string(kMaxComponents));
  if (weights.size() != n) {
    throw ValidationError("synthetic spec has " + std::to_string(weights.size()) + " weights for n = " +
                          std::to_string(n));
  }
  if (!std::isfinite(base) || !std::all_of(weights.begin(), weights.end(), [](double w) { return std::isfinite(w); })) {
    throw ValidationError("synthetic spec values must be finite");
  }
  if (interactions.empty()) return;
  if (interactions.size() != n * n) throw ValidationError("interaction matrix must be n x n");
  for (std::size_t i = 0; i < n; ++i) {
    if (interactions[i * n + i] != 0.0) {
      throw ValidationError("interaction matrix diagonal entry " + std::to_string(i) + " is nonzero");
    }
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!std::isfinite(interactions[i * n + j])) throw ValidationError("interaction values must be finite");
      if (interactions[i * n + j] != interactions[j * n + i]) {
        throw ValidationError("interaction matrix is asymmetric at (" + std::to_string(i) + ", " +
                              std::to_string(j) + ")");
      }
    }
  }
}

SyntheticGameSpec SyntheticGameSpec::additive(double base, std::vector<double> weights) {
  SyntheticGameSpec spec;
  spec.n = weights.size();
  spec.base = base;
  spec.weights = std::move(weights);
  spec.interactions.assign(spec.n * spec.n, 0.0);
  return spec;
}

ComponentSet default_components(std::size_t n) {
  std::vector<std::string> labels;
  labels.reserve(n);
  for (std::size_t i = 0; i < n; ++i) labels.push_back("c" + std::to_string(i));
  return ComponentSet(std::move(labels));
}

SyntheticGame synthesize_game(const SyntheticGameSpec& spec, const ComponentSet& components) {
  spec.validate();
  if (components.size() != spec.n) {
    throw ValidationError("component set size " + std::to_string(components.size()) + " does not match spec n = " +
                          std::to_string(spec.n));
  }
  if (spec.n > kMaxExactComponents) {
    throw ValidationError("cannot synthesize a full table over " + std::to_string(spec.n) + " components");
  }
  const std::size_t count = std::size_t{1} << spec.n;
  std::vector<double> values(count);
  bool clamp_free = true;
  for (Mask m = 0; m < count; ++m) {
    const double raw = spec.raw_value(m);
    if (spec.clamp && (raw < 0.0 || raw > 1.0)) clamp_free = false;
    values[m] = spec.clamp ? std::clamp(raw, 0.0, 1.0) : raw;
  }

  std::optional<std::vector<double>> analytic;
  if (clamp_free) {
    std::vector<double> phi(spec.n);
    for (std::size_t i = 0; i < spec.n; ++i) {
      double pair_share = 0.0;
      if (!spec.interactions.empty()) {
        for (std::size_t j = 0; j < spec.n; ++j) {
          if (j != i) pair_share += spec.gamma(i, j);
        }
      }
      phi[i] = spec.weights[i] + 0.5 * pair_share;
    }
    analytic = std::move(phi);
  }
  return {GameTable::from_dense(components, std::move(values)), clamp_free, std::move(analytic)};
}

SyntheticGame synthesize_game(const SyntheticGameSpec& spec) {
  return synthesize_game(spec, default_components(spec.n));
}

std::vector<TaskOutcomeRecord> simulate_task_outcomes(const SyntheticGameSpec& spec, const Coalition& coalition,
                                                      std::size_t num_tasks, std::uint64_t seed) {
  spec.validate();
  if (num_tasks == 0) throw ValidationError("num_tasks must be positive");
  const double p = success_rate(spec, coalition);
  Rng rng(seed);
  auto ids = numbered_task_ids(num_tasks);
  std::vector<TaskOutcomeRecord> out;
  out.reserve(num_tasks);
  for (auto& id : ids) out.push_back({std::move(id), coalition, rng.bernoulli(p) ? 1.0 : 0.0, false});
  return out;
}

double simulate_task_score(const SyntheticGameSpec& spec, const Coalition& coalition, std::string_view task_id,
                           std::uint64_t seed) {
  const double p = success_rate(spec, coalition);
  Rng rng(mix_seed(seed ^ mix_seed(coalition.mask() ^ mix_seed(fnv1a(task_id)))));
  return rng.bernoulli(p) ? 1.0 : 0.0;
}

SyntheticGameSpec parse_spec_json(std::string_view text) {
  const Json doc = detail::parse_strict(text, "simulator spec");
  if (!doc.is_object()) throw ValidationError("simulator spec: document must be an object");
  SyntheticGameSpec spec;
  const auto& n = detail::require(doc, "n", "simulator spec");
  if (!n.is_number_unsigned()) throw ValidationError("simulator spec: 'n' must be a non-negative integer");
  spec.n = n.get<std::size_t>();
  if (spec.n > kMaxComponents) throw ValidationError("simulator spec: n exceeds " + std::to_string(kMaxComponents));
  spec.base = detail::to_double(detail::require(doc, "base", "simulator spec"), "base");
  const auto& weights = detail::require(doc, "weights", "simulator spec");
  if (!weights.is_array()) throw ValidationError("simulator spec: 'weights' must be an array");
  for (const auto& w : weights) spec.weights.push_back(detail::to_double(w, "weights"));
  spec.interactions.assign(spec.n * spec.n, 0.0);
  if (doc.contains("interactions")) {
    const auto& list = doc.at("interactions");
    if (!list.is_array()) throw ValidationError("simulator spec: 'interactions' must be an array of [i, j, gamma]");
    for (const auto& item : list) {
      if (!item.is_array() || item.size() != 3 || !item[0].is_number_unsigned() || !item[1].is_number_unsigned()) {
        throw ValidationError("simulator spec: each interaction must be [i, j, gamma]");
      }
      const auto i = item[0].get<std::size_t>();
      const auto j = item[1].get<std::size_t>();
      if (i >= spec.n || j >= spec.n) throw ValidationError("simulator spec: interaction index out of range");
      if (i == j) throw ValidationError("simulator spec: interaction on the diagonal (" + std::to_string(i) + ")");
      if (spec.interactions[i * spec.n + j] != 0.0) {
        throw ValidationError("simulator spec: interaction (" + std::to_string(i) + ", " + std::to_string(j) +
                              ") given twice");
      }
      spec.set_gamma(i, j, detail::to_double(item[2], "interactions"));
    }
  }
  if (doc.contains("clamp")) {
    if (!doc.at("clamp").is_boolean()) throw ValidationError("simulator spec: 'clamp' must be a boolean");
    spec.clamp = doc.at("clamp").get<bool>();
  }
  spec.validate();
  return spec;
}

std::string format_spec_json(const SyntheticGameSpec& spec) {
  Json doc = Json::object();
  doc["n"] = spec.n;
  doc["base"] = spec.base;
  doc["weights"] = spec.weights;
  Json list = Json::array();
  for (std::size_t i = 0; i < spec.n; ++i) {
    for (std::size_t j = i + 1; j < spec.n; ++j) {
      if (!spec.interactions.empty() && spec.gamma(i, j) != 0.0) list.push_back(Json::array({i, j, spec.gamma(i, j)}));
    }
  }
  doc["interactions"] = std::move(list);
  doc["clamp"] = spec.clamp;
  return doc.dump(2) + "\n";
}

}  // namespace wfshap
