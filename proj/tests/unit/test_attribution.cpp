#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "oracles.hpp"
#include "wfshap/attribution.hpp"
#include "wfshap/simulator.hpp"

using namespace wfshap;

namespace {

GameTable dense(std::size_t n, std::vector<double> values) {
  return GameTable::from_dense(default_components(n), std::move(values));
}

GameTable random_game(std::size_t n, std::uint64_t seed) { return dense(n, oracle::random_values(n, seed)); }

GameTable additive(const std::vector<double>& w, double base = 0.0) {
  const auto n = w.size();
  std::vector<double> values(std::size_t{1} << n, base);
  for (Mask m = 0; m < values.size(); ++m) {
    for (std::size_t i = 0; i < n; ++i) {
      if (m & bit(i)) values[m] += w[i];
    }
  }
  return dense(n, values);
}

EstimatorConfig mc(std::size_t samples, std::uint64_t seed, bool antithetic = true) {
  return {Method::kPermutationMc, samples, seed, antithetic};
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST(Method, Names) {
  EXPECT_EQ(parse_method("exact"), Method::kExact);
  EXPECT_EQ(parse_method("mc"), Method::kPermutationMc);
  EXPECT_EQ(parse_method("permutation_mc"), Method::kPermutationMc);
  EXPECT_EQ(method_name(Method::kPermutationMc), "permutation_mc");
  EXPECT_THROW(parse_method("kernelshap"), ValidationError);
}

TEST(MarginalContribution, Examples) {
  const auto g = additive({0.2, 0.3});
  EXPECT_DOUBLE_EQ(marginal_contribution(g, g.components().id(0), Coalition::empty(2)), 0.2);

  const ComponentSet pa({"planning", "action"});
  const auto fig = GameTable::from_dense(pa, {0.216, 0.184, 0.3, 0.632});
  EXPECT_DOUBLE_EQ(marginal_contribution(fig, pa.at("action"), Coalition(0b01, 2)), 0.632 - 0.184);

  const auto r = random_game(4, 11);
  const auto values = oracle::random_values(4, 11);
  EXPECT_EQ(marginal_contribution(r, r.components().id(2), Coalition(0b1001, 4)), values[0b1101] - values[0b1001]);
}

TEST(MarginalContribution, Rejections) {
  const auto g = additive({0.2, 0.3});
  EXPECT_THROW(marginal_contribution(g, g.components().id(0), Coalition(0b01, 2)), ValidationError);
  const GameTable::Entry entries[] = {{Coalition(0, 2), 0.0}};
  const GameTable partial(default_components(2), entries);
  try {
    marginal_contribution(partial, partial.components().id(0), Coalition::empty(2));
    FAIL();
  } catch (const IncompleteGameError& e) {
    EXPECT_EQ(e.missing(), std::vector<Mask>{1});
  }
}

TEST(ShapleyExact, UnanimityPair) {
  const auto r = shapley_exact(dense(2, {0, 0, 0, 1}));
  EXPECT_DOUBLE_EQ(r.phi[0], 0.5);
  EXPECT_DOUBLE_EQ(r.phi[1], 0.5);
  EXPECT_EQ(r.method, Method::kExact);
  EXPECT_EQ(r.samples, 0u);
  EXPECT_FALSE(r.std_error.has_value());
}

TEST(ShapleyExact, AdditiveGameGivesWeights) {
  const auto r = shapley_exact(additive({0.2, 0.3, 0.1}));
  EXPECT_NEAR(r.phi[0], 0.2, 1e-15);
  EXPECT_NEAR(r.phi[1], 0.3, 1e-15);
  EXPECT_NEAR(r.phi[2], 0.1, 1e-15);
}

TEST(ShapleyExact, MatchesPermutationEnumeration) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const std::size_t n = 1 + seed % 6;
    const auto values = oracle::random_values(n, seed, -1.0, 1.0);
    const auto expected = oracle::permutation_shapley(n, [&](oracle::Mask m) { return values[m]; });
    const auto got = shapley_exact(dense(n, values));
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(got.phi[i], expected[i], 1e-12) << "seed " << seed;
  }
}

TEST(ShapleyExact, ZeroComponents) {
  const auto r = shapley_exact(dense(0, {0.4}));
  EXPECT_TRUE(r.phi.empty());
  EXPECT_EQ(r.empty_value, 0.4);
  EXPECT_EQ(r.grand_value, 0.4);
}

TEST(ShapleyExact, RejectsIncompleteTable) {
  const GameTable::Entry entries[] = {{Coalition(0, 2), 0.0}, {Coalition(3, 2), 1.0}};
  try {
    shapley_exact(GameTable(default_components(2), entries));
    FAIL();
  } catch (const IncompleteGameError& e) {
    EXPECT_EQ(e.missing(), (std::vector<Mask>{1, 2}));
  }
}

TEST(ShapleyProperty, EfficiencyOnRandomGames) {
  for (std::uint64_t seed = 0; seed < 120; ++seed) {
    const std::size_t n = 1 + seed % 8;
    const auto r = shapley_exact(random_game(n, seed));
    EXPECT_LE(r.efficiency_residual(), 1e-9);
  }
}

TEST(ShapleyProperty, Additivity) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const std::size_t n = 1 + seed % 8;
    const auto u = oracle::random_values(n, seed);
    const auto v = oracle::random_values(n, seed + 1000);
    std::vector<double> sum(u.size());
    for (std::size_t k = 0; k < u.size(); ++k) sum[k] = u[k] + v[k];
    const auto pu = shapley_exact(dense(n, u)).phi;
    const auto pv = shapley_exact(dense(n, v)).phi;
    const auto ps = shapley_exact(dense(n, sum)).phi;
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(ps[i], pu[i] + pv[i], 1e-9);
  }
}

TEST(ShapleyProperty, AffineRescaling) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const std::size_t n = 2 + seed % 5;
    auto values = oracle::random_values(n, seed);
    const auto base = shapley_exact(dense(n, values)).phi;
    const double a = 0.5 + static_cast<double>(seed % 7), b = -3.0 + static_cast<double>(seed % 5);
    for (auto& x : values) x = a * x + b;
    const auto scaled = shapley_exact(dense(n, values)).phi;
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(scaled[i], a * base[i], 1e-9);
  }
}

TEST(ShapleyPermutation, AdditiveGameWithinThreeStdErrors) {
  const auto g = additive({0.2, 0.3, 0.1});
  const auto r = shapley_permutation(g, mc(6000, 17));
  ASSERT_TRUE(r.std_error.has_value());
  const double w[] = {0.2, 0.3, 0.1};
  for (int i = 0; i < 3; ++i) {
    // Every ordering of an additive game yields the weight exactly, up to
    // floating round-off in v(S + i) - v(S).
    EXPECT_LE(std::abs(r.phi[i] - w[i]), 3 * (*r.std_error)[i] + 1e-12);
  }
}

TEST(ShapleyPermutation, FixedSeedIsBitIdentical) {
  const auto g = random_game(5, 3);
  const auto a = shapley_permutation(g, mc(2000, 42));
  const auto b = shapley_permutation(g, mc(2000, 42));
  EXPECT_EQ(a.phi, b.phi);
  EXPECT_EQ(*a.std_error, *b.std_error);
  EXPECT_EQ(a.seed, 42u);
  EXPECT_EQ(a.samples, 2000u);
  const auto c = shapley_permutation(g, mc(2000, 43));
  EXPECT_NE(a.phi, c.phi);
}

TEST(ShapleyPermutation, ConfigValidation) {
  const auto g = random_game(3, 1);
  EXPECT_THROW(shapley_permutation(g, mc(1, 0)), ValidationError);
  EXPECT_THROW(shapley_permutation(g, mc(0, 0)), ValidationError);
  EXPECT_THROW(shapley_permutation(g, mc(7, 0)), ValidationError);
  EXPECT_NO_THROW(shapley_permutation(g, mc(1, 0, false)));
  EXPECT_THROW(shapley_permutation(g, EstimatorConfig{Method::kExact, 10, 0, true}), ValidationError);
}

TEST(ShapleyPermutation, EfficiencyHoldsPerOrdering) {
  // Each ordering's marginals telescope to v(N) - v({}), so the mean does too.
  const auto g = random_game(6, 8);
  const auto r = shapley_permutation(g, mc(500, 5));
  EXPECT_LE(r.efficiency_residual(), 1e-9);
}

TEST(ShapleyPermutation, ConvergesToExact) {
  const auto g = random_game(5, 21);
  const auto exact = shapley_exact(g).phi;
  const auto est = shapley_permutation(g, mc(200000, 9));
  EXPECT_LE(max_abs_diff(est.phi, exact), 0.01);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_LE(std::abs(est.phi[i] - exact[i]), 5 * (*est.std_error)[i]);
}

TEST(ShapleyPermutation, ErrorShrinksWithMoreSamples) {
  // 1 000 vs 100 000 orderings. Error scales with 1/sqrt(samples), so the
  // expected shrink factor is about 10; we check the direction and a broad band.
  const auto g = random_game(5, 2024);
  const auto exact = shapley_exact(g).phi;
  const double small = max_abs_diff(shapley_permutation(g, mc(1000, 1)).phi, exact);
  const double large = max_abs_diff(shapley_permutation(g, mc(100000, 2)).phi, exact);
  EXPECT_GT(small / large, 2.0);
  EXPECT_LT(small / large, 100.0);
}

TEST(ShapleyPermutation, UnbiasednessProxyOnAdditiveGames) {
  // Dyadic weights make every marginal exact in floating point, so the
  // estimate equals the weight and the 4-SE band holds in every trial.
  // The non-degenerate version of this check uses a non-additive game below.
  const auto g = additive({0.25, 0.125, 0.5}, 0.0625);
  std::size_t inside = 0;
  for (std::uint64_t t = 0; t < 1000; ++t) {
    const auto r = shapley_permutation(g, mc(2000, t));
    const double w[] = {0.25, 0.125, 0.5};
    bool ok = true;
    for (int i = 0; i < 3; ++i) ok = ok && std::abs(r.phi[i] - w[i]) <= 4 * (*r.std_error)[i];
    inside += ok;
  }
  EXPECT_GE(inside, 990u);
}

TEST(ShapleyPermutation, CoverageOnNonAdditiveGame) {
  const auto g = random_game(4, 77);
  const auto exact = shapley_exact(g).phi;
  std::size_t inside = 0, total = 0;
  for (std::uint64_t t = 0; t < 300; ++t) {
    const auto r = shapley_permutation(g, mc(2000, 1000 + t));
    for (std::size_t i = 0; i < 4; ++i) {
      ++total;
      inside += std::abs(r.phi[i] - exact[i]) <= 4 * (*r.std_error)[i];
    }
  }
  EXPECT_GE(static_cast<double>(inside) / static_cast<double>(total), 0.99);
}

TEST(ShapleyPermutation, OracleIsMemoizedAndMatchesTable) {
  const auto values = oracle::random_values(6, 4);
  const auto g = dense(6, values);
  std::map<Mask, int> calls;
  CoalitionOracle fn = [&](const Coalition& c) {
    ++calls[c.mask()];
    return values[c.mask()];
  };
  const auto from_oracle = shapley_permutation(fn, g.components(), mc(400, 3));
  const auto from_table = shapley_permutation(g, mc(400, 3));
  EXPECT_EQ(from_oracle.phi, from_table.phi);
  for (const auto& [mask, k] : calls) EXPECT_EQ(k, 1) << "mask " << mask;
}

TEST(ShapleyPermutation, OracleWorksBeyondTableLimit) {
  std::vector<std::string> labels;
  for (int i = 0; i < 30; ++i) labels.push_back("c" + std::to_string(i));
  const ComponentSet set(labels);
  CoalitionOracle fn = [](const Coalition& c) { return 0.01 * static_cast<double>(c.size()); };
  const auto r = shapley_permutation(fn, set, mc(20, 1));
  for (double p : r.phi) EXPECT_NEAR(p, 0.01, 1e-12);
}

TEST(ShapleyPermutation, OracleFailureCarriesMask) {
  CoalitionOracle fn = [](const Coalition& c) -> double {
    if (c.mask() == 0b11) throw std::runtime_error("boom");
    return 0.0;
  };
  try {
    shapley_permutation(fn, default_components(2), mc(2, 1));
    FAIL();
  } catch (const OracleError& e) {
    EXPECT_EQ(e.mask(), 0b11u);
  }
  CoalitionOracle nan_fn = [](const Coalition&) { return std::nan(""); };
  EXPECT_THROW(shapley_permutation(nan_fn, default_components(2), mc(2, 1)), Error);
}

TEST(Synergy, Examples) {
  const auto add = additive({0.1, 0.2, 0.3, 0.05});
  const auto m = synergy_matrix(add);
  for (double e : m.entries) EXPECT_NEAR(e, 0.0, 1e-15);

  const auto unanimity = dense(2, {0, 0, 0, 1});
  EXPECT_EQ(synergy_pair(unanimity, unanimity.components().id(0), unanimity.components().id(1)), 1.0);

  std::vector<double> emb(8, 0.0);
  emb[0b011] = emb[0b111] = 1.0;
  const auto em = synergy_matrix(dense(3, emb));
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      const bool pair01 = (i == 0 && j == 1) || (i == 1 && j == 0);
      EXPECT_EQ(em.at(i, j), pair01 ? 1.0 : 0.0);
    }
  }
}

TEST(Synergy, SimulatorInteraction) {
  SyntheticGameSpec spec = SyntheticGameSpec::additive(0.05, {0.1, 0.15, 0.05, 0.0});
  spec.set_gamma(0, 2, 0.15);
  const auto g = synthesize_game(spec).table;
  const auto& c = g.components();
  EXPECT_NEAR(synergy_pair(g, c.id(0), c.id(2)), 0.15, 1e-15);
}

TEST(Synergy, Rejections) {
  const auto g = additive({0.1, 0.2});
  EXPECT_THROW(synergy_pair(g, g.components().id(0), g.components().id(0)), ValidationError);
  const GameTable::Entry entries[] = {{Coalition(0, 2), 0.0}, {Coalition(1, 2), 0.1}, {Coalition(2, 2), 0.1}};
  EXPECT_THROW(synergy_matrix(GameTable(default_components(2), entries)), IncompleteGameError);
}

TEST(Synergy, MatrixMatchesDirectLookups) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::size_t n = 2 + seed % 5;
    const auto v = oracle::random_values(n, seed);
    const auto m = synergy_matrix(dense(n, v));
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_EQ(m.at(i, i), 0.0);
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        EXPECT_EQ(m.at(i, j), m.at(j, i));
        const double direct = v[bit(i) | bit(j)] - v[bit(i)] - v[bit(j)] + v[0];
        EXPECT_NEAR(m.at(i, j), direct, 1e-15);
      }
    }
  }
}

TEST(Axioms, ExactResultsPass) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto g = random_game(1 + seed % 6, seed);
    const auto report = check_axioms(g, shapley_exact(g), 1e-9);
    EXPECT_TRUE(report.passed());
    EXPECT_TRUE(report.scanned);
  }
}

TEST(Axioms, DetectsInterchangeableAndNullPlayers) {
  // Player 2 never changes anything; players 0 and 1 are interchangeable.
  std::vector<double> v(8);
  for (Mask m = 0; m < 8; ++m) {
    const int k = ((m & 1) != 0) + ((m & 2) != 0);
    v[m] = 0.1 + 0.3 * k + (k == 2 ? 0.2 : 0.0);
  }
  const auto g = dense(3, v);
  const auto exact = shapley_exact(g);
  const auto report = check_axioms(g, exact, 1e-9);
  EXPECT_TRUE(report.passed());
  EXPECT_EQ(report.null_players, std::vector<std::size_t>{2});
  EXPECT_NEAR(exact.phi[2], 0.0, 1e-15);
  ASSERT_EQ(report.interchangeable_pairs.size(), 1u);
  EXPECT_EQ(report.interchangeable_pairs[0], (std::pair<std::size_t, std::size_t>{0, 1}));

  auto bad = exact;
  bad.phi[2] = 0.05;
  bad.phi[0] += 0.01;
  bad.phi[1] -= 0.06;
  const auto broken = check_axioms(g, bad, 1e-9);
  EXPECT_TRUE(broken.efficiency_pass);
  EXPECT_EQ(broken.dummy_violations, std::vector<std::size_t>{2});
  EXPECT_EQ(broken.symmetry_violations.size(), 1u);
  EXPECT_FALSE(broken.passed());
}

TEST(Axioms, Rejections) {
  const auto g = random_game(3, 1);
  auto r = shapley_exact(g);
  EXPECT_THROW(check_axioms(g, r, 0.0), ValidationError);
  r.phi.pop_back();
  r.labels.pop_back();
  EXPECT_THROW(check_axioms(g, r, 1e-9), ValidationError);
}

TEST(Axioms, ReportedRowAgainstEndpoints) {
  const ComponentSet set({"planning", "reasoning", "action", "reflection"});
  const GameTable::Entry entries[] = {{Coalition::empty(4), 0.18}, {Coalition::grand(4), 0.834}};
  const GameTable endpoints(set, entries);
  AttributionResult r;
  r.labels = set.labels();
  r.phi = {0.038, 0.131, 0.442, 0.042};
  r.method = Method::kReported;
  r.empty_value = 0.18;
  r.grand_value = 0.834;
  const auto report = check_axioms(endpoints, r, 0.005);
  EXPECT_TRUE(report.efficiency_pass);
  EXPECT_NEAR(report.efficiency_residual, 0.001, 1e-12);
  EXPECT_FALSE(report.scanned);
}
