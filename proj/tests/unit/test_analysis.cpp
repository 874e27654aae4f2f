#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "test_paths.hpp"
#include "wfshap/analysis.hpp"

using namespace wfshap;
using testing_support::fixture;

namespace {

const ComponentSet kPraf({"planning", "reasoning", "action", "reflection"});

ModelAttributionTable one_column(const std::map<std::string, double>& phi) {
  std::vector<ModelAttributionTable::Row> rows;
  for (const auto& [c, v] : phi) rows.push_back({c, {v}, std::nullopt, std::nullopt});
  return ModelAttributionTable(ComponentSet({"planning"}), rows);
}

std::map<std::string, double> random_map(std::size_t k, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> d(-0.2, 0.6);
  std::map<std::string, double> out;
  for (std::size_t i = 0; i < k; ++i) out["m" + std::to_string(i)] = d(gen);
  return out;
}

}  // namespace

TEST(AttributionTable, Validation) {
  using Row = ModelAttributionTable::Row;
  EXPECT_THROW(ModelAttributionTable(kPraf, {Row{"a", {0, 0, 0}, {}, {}}}), ValidationError);
  EXPECT_THROW(ModelAttributionTable(kPraf, {Row{"a", {0, 0, 0, 0}, {}, {}}, Row{"a", {0, 0, 0, 0}, {}, {}}}),
               ValidationError);
  EXPECT_THROW(ModelAttributionTable(kPraf, {Row{"", {0, 0, 0, 0}, {}, {}}}), ValidationError);
  EXPECT_THROW(ModelAttributionTable(kPraf, {Row{"a", {0, NAN, 0, 0}, {}, {}}}), ValidationError);
  EXPECT_THROW(parse_attribution_table_json(
                   R"({"components":["p","a"],"rows":{"m":{"phi":{"p":0.1}}}})"),
               ValidationError);
  EXPECT_THROW(parse_attribution_table_json(
                   R"({"components":["p"],"rows":{"m":{"phi":{"p":0.1,"q":0.2}}}})"),
               ValidationError);
}

TEST(AttributionTable, FixtureRoundTrip) {
  const auto t = read_attribution_table_file(fixture("math.json"));
  EXPECT_EQ(t.rows().size(), 9u);
  EXPECT_EQ(t.label(), "Math");
  EXPECT_EQ(t.at("Claude-3.5").phi[2], 0.442);
  const auto back = parse_attribution_table_json(format_attribution_table_json(t));
  EXPECT_EQ(back.candidates(), t.candidates());
  for (const auto& row : t.rows()) {
    EXPECT_EQ(back.at(row.candidate).phi, row.phi);
    EXPECT_EQ(back.at(row.candidate).acc, row.acc);
  }
  EXPECT_THROW(t.at("nobody"), ValidationError);
}

TEST(ReportedResult, EndpointsAndResidual) {
  const auto t = read_attribution_table_file(fixture("math.json"));
  const auto r = reported_result(t, "Claude-3.5");
  EXPECT_EQ(r.method, Method::kReported);
  EXPECT_EQ(r.empty_value, 0.18);
  EXPECT_EQ(r.grand_value, 0.834);
  EXPECT_NEAR(r.efficiency_residual(), 0.001, 1e-9);
  const auto g = endpoint_game(t, "Claude-3.5");
  EXPECT_EQ(g.value(0), 0.18);
  EXPECT_EQ(g.value(15), 0.834);
  EXPECT_FALSE(g.is_complete());

  const auto bare = one_column({{"x", 0.1}});
  EXPECT_THROW(reported_result(bare, "x"), ValidationError);
}

TEST(Optimize, MathFixture) {
  const auto cfg = discover_optimal_configuration(read_attribution_table_file(fixture("math.json")));
  ASSERT_EQ(cfg.assignment.size(), 4u);
  EXPECT_EQ(cfg.assignment[0].candidate, "doubao-pro-4k");
  EXPECT_EQ(cfg.assignment[1].candidate, "Claude-3.5");
  EXPECT_EQ(cfg.assignment[2].candidate, "gpt-4-turbo");
  EXPECT_EQ(cfg.assignment[3].candidate, "gpt-4o-mini");
  EXPECT_EQ(cfg.assignment[2].phi, 0.492);
  EXPECT_EQ(cfg.assignment[3].component.label, "reflection");
  EXPECT_FALSE(cfg.note.empty());
}

TEST(Optimize, SingleCandidateTiesAndEmpty) {
  EXPECT_EQ(discover_optimal_configuration(one_column({{"only", -0.3}})).assignment[0].candidate, "only");
  EXPECT_EQ(discover_optimal_configuration(one_column({{"zeta", 0.2}, {"alpha", 0.2}, {"mid", 0.1}}))
                .assignment[0]
                .candidate,
            "alpha");
  EXPECT_THROW(discover_optimal_configuration(ModelAttributionTable(kPraf, {})), ValidationError);
}

TEST(OptimizeProperty, PositiveAffineMapKeepsChoice) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto phi = random_map(2 + seed % 8, seed);
    auto scaled = phi;
    for (auto& [c, v] : scaled) v = 3.5 * v - 0.25;
    EXPECT_EQ(discover_optimal_configuration(one_column(phi)).assignment[0].candidate,
              discover_optimal_configuration(one_column(scaled)).assignment[0].candidate);
  }
}

TEST(Consistency, FixtureComponents) {
  const auto a = read_attribution_table_file(fixture("consistency_a.json"));
  const auto b = read_attribution_table_file(fixture("consistency_b.json"));
  const auto reasoning = consistency_pairs(a.column(1), b.column(1));
  EXPECT_EQ(reasoning.consistent, 33u);
  EXPECT_EQ(reasoning.total, 36u);
  EXPECT_NEAR(reasoning.rate(), 0.9167, 5e-5);

  const auto all = compare_tables(a, b);
  ASSERT_EQ(all.components.size(), 3u);
  EXPECT_EQ(all.components[0].pairs.consistent, 26u);
  EXPECT_EQ(all.components[2].pairs.consistent, 31u);
  EXPECT_EQ(all.pooled.consistent, 90u);
  EXPECT_EQ(all.pooled.total, 108u);

  const auto one = compare_tables(a, b, "action");
  ASSERT_EQ(one.components.size(), 1u);
  EXPECT_EQ(one.pooled.consistent, 31u);
  EXPECT_THROW(compare_tables(a, b, "memory"), ValidationError);
}

TEST(Consistency, IdenticalReversedAndTies) {
  const auto phi = random_map(9, 4);
  EXPECT_EQ(consistency_rate(phi, phi), 1.0);
  auto reversed = phi;
  for (auto& [c, v] : reversed) v = -v;
  EXPECT_EQ(consistency_rate(phi, reversed), 0.0);

  const std::map<std::string, double> tied{{"a", 0.1}, {"b", 0.1}, {"c", 0.3}};
  EXPECT_EQ(consistency_pairs(tied, tied).consistent, 3u);
  const std::map<std::string, double> untied{{"a", 0.1}, {"b", 0.2}, {"c", 0.3}};
  EXPECT_EQ(consistency_pairs(tied, untied).consistent, 2u);
}

TEST(Consistency, Rejections) {
  const std::map<std::string, double> a{{"m1", 0.1}, {"m2", 0.2}}, b{{"m1", 0.1}, {"m3", 0.2}};
  try {
    consistency_pairs(a, b);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("m2"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("m3"), std::string::npos);
  }
  const std::map<std::string, double> single{{"m1", 0.1}};
  EXPECT_THROW(consistency_pairs(single, single), ValidationError);
  const std::map<std::string, double> bad{{"m1", 0.1}, {"m2", INFINITY}};
  EXPECT_THROW(consistency_pairs(bad, a), ValidationError);
}

TEST(ConsistencyProperty, SymmetricAndMatchesPairOracle) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const std::size_t k = 2 + seed % 10;
    const auto a = random_map(k, seed), b = random_map(k, seed + 1000);
    const auto ab = consistency_pairs(a, b);
    EXPECT_EQ(ab.consistent, consistency_pairs(b, a).consistent);
    EXPECT_EQ(ab.total, k * (k - 1) / 2);
    EXPECT_EQ(ab.consistent, oracle::agreeing_pairs(a, b));
    const double r = ab.rate();
    EXPECT_GE(r, 0.0);
    EXPECT_LE(r, 1.0);
  }
}

TEST(JudgeCorrelation, MatchesTextbookFormula) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const std::size_t k = 3 + seed % 9;
    JudgeScoreSeries s{kPraf.id(0), random_map(k, seed), random_map(k, seed + 77)};
    std::vector<double> x, y;
    for (const auto& [c, v] : s.scores) x.push_back(v);
    for (const auto& [c, v] : s.phi) y.push_back(v);
    EXPECT_NEAR(correlate_with_judge(s), oracle::pearson(x, y), 1e-12) << "seed " << seed;
  }
}

TEST(JudgeCorrelation, PerfectAndAffine) {
  const auto phi = random_map(6, 8);
  std::map<std::string, double> judge;
  for (const auto& [c, v] : phi) judge[c] = -2 * v + 7;
  EXPECT_NEAR(correlate_with_judge({kPraf.id(1), judge, phi}), -1.0, 1e-12);

  const auto scores = random_map(6, 9);
  std::map<std::string, double> stretched;
  for (const auto& [c, v] : scores) stretched[c] = 4 * v + 1;
  EXPECT_NEAR(correlate_with_judge({kPraf.id(1), scores, phi}), correlate_with_judge({kPraf.id(1), stretched, phi}),
              1e-12);
}

TEST(JudgeCorrelation, Rejections) {
  const std::map<std::string, double> three{{"a", 1}, {"b", 2}, {"c", 3}}, flat{{"a", 1}, {"b", 1}, {"c", 1}},
      two{{"a", 1}, {"b", 2}}, other{{"a", 1}, {"b", 2}, {"d", 3}};
  EXPECT_THROW(correlate_with_judge({kPraf.id(0), flat, three}), ValidationError);
  EXPECT_THROW(correlate_with_judge({kPraf.id(0), two, two}), ValidationError);
  EXPECT_THROW(correlate_with_judge({kPraf.id(0), three, other}), ValidationError);
}
