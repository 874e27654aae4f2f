#include <gtest/gtest.h>

#include "wfshap/records.hpp"
#include "wfshap/simulator.hpp"

using namespace wfshap;

namespace {

const ComponentSet kSet({"planning", "action"});

std::vector<TaskOutcomeRecord> scores_for(Mask mask, const std::vector<double>& scores) {
  std::vector<TaskOutcomeRecord> out;
  for (std::size_t k = 0; k < scores.size(); ++k) {
    out.push_back({"t" + std::to_string(k), Coalition(mask, 2), scores[k], false});
  }
  return out;
}

}  // namespace

TEST(BuildGame, MeanOfScores) {
  auto records = scores_for(0b01, {1, 1, 1, 0});
  const auto g = build_game_from_records(records, kSet);
  EXPECT_EQ(g.value(0b01), 0.75);
  EXPECT_EQ(g.task_count(), 4u);
  EXPECT_FALSE(g.contains(0b00));
  EXPECT_FALSE(g.is_complete());
}

TEST(BuildGame, AllZero) {
  const auto g = build_game_from_records(scores_for(0b11, {0, 0, 0}), kSet);
  EXPECT_EQ(g.value(0b11), 0.0);
}

TEST(BuildGame, FractionalScores) {
  const auto g = build_game_from_records(scores_for(0, {0.25, 0.5}), kSet);
  EXPECT_EQ(g.value(0), 0.375);
}

TEST(BuildGame, Rejections) {
  EXPECT_THROW(build_game_from_records({}, kSet), ValidationError);

  auto dup = scores_for(0, {1, 0});
  dup.push_back(dup.front());
  EXPECT_THROW(build_game_from_records(dup, kSet), ValidationError);

  auto out_of_range = scores_for(0, {1.5});
  EXPECT_THROW(build_game_from_records(out_of_range, kSet), ValidationError);

  auto mixed = scores_for(0, {1, 0, 1});
  auto other = scores_for(1, {1, 0});
  other.push_back({"t9", Coalition(1, 2), 1.0, false});
  mixed.insert(mixed.end(), other.begin(), other.end());
  try {
    build_game_from_records(mixed, kSet);
    FAIL();
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("t2"), std::string::npos);
    EXPECT_NE(msg.find("t9"), std::string::npos);
    EXPECT_EQ(msg.find("t0"), std::string::npos);
  }
}

TEST(BuildGame, FailurePolicies) {
  auto records = scores_for(0, {1, 1, 0, 0});
  records[0].failed = true;
  records[0].score = 0.0;
  EXPECT_EQ(build_game_from_records(records, kSet, FailurePolicy::kScoreAsZero).value(0), 0.25);
  EXPECT_DOUBLE_EQ(build_game_from_records(records, kSet, FailurePolicy::kExclude).value(0), 1.0 / 3.0);
  for (auto& r : records) r.failed = true;
  EXPECT_EQ(build_game_from_records(records, kSet, FailurePolicy::kScoreAsZero).value(0), 0.0);
  EXPECT_THROW(build_game_from_records(records, kSet, FailurePolicy::kExclude), ValidationError);
  EXPECT_EQ(parse_failure_policy("exclude"), FailurePolicy::kExclude);
  EXPECT_EQ(parse_failure_policy("score-as-zero"), FailurePolicy::kScoreAsZero);
  EXPECT_THROW(parse_failure_policy("retry"), ValidationError);
}

TEST(BuildGame, SimulatedBernoulliMean) {
  const auto spec = SyntheticGameSpec::additive(0.6, {0.0});
  const auto records = simulate_task_outcomes(spec, Coalition(0, 1), 1000, 12345);
  const auto g = build_game_from_records(records, default_components(1));
  EXPECT_GE(g.value(0), 0.56);
  EXPECT_LE(g.value(0), 0.64);
}

TEST(BuildGame, ScalingScoresScalesValues) {
  const auto spec = SyntheticGameSpec::additive(0.3, {0.2, 0.3});
  std::vector<TaskOutcomeRecord> records;
  for (Mask m = 0; m < 4; ++m) {
    auto part = simulate_task_outcomes(spec, Coalition(m, 2), 64, m + 1);
    records.insert(records.end(), part.begin(), part.end());
  }
  const auto base = build_game_from_records(records, default_components(2));
  for (double a : {0.5, 0.25, 0.75}) {
    auto scaled = records;
    for (auto& r : scaled) r.score *= a;
    const auto g = build_game_from_records(scaled, default_components(2));
    for (Mask m = 0; m < 4; ++m) EXPECT_EQ(g.value(m), a * base.value(m)) << "a=" << a << " mask " << m;
  }
}

TEST(RecordIo, RoundTrip) {
  std::vector<TaskOutcomeRecord> records = scores_for(0b10, {0.1, 1.0 / 3.0, 0});
  records[2].failed = true;
  const auto text = format_records(records, kSet);
  EXPECT_EQ(parse_records(text, kSet), records);
  EXPECT_NE(text.find(R"("coalition":["action"])"), std::string::npos);
}

TEST(RecordIo, ParseErrorsNameTheLine) {
  const std::string text = R"({"task_id":"a","coalition":[],"score":1})" "\n"
                           R"({"task_id":"b","coalition":["memory"],"score":1})" "\n";
  try {
    parse_records(text, kSet);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
  EXPECT_THROW(parse_record_line(R"({"task_id":"a","coalition":[],"score":2})", kSet), ValidationError);
  EXPECT_THROW(parse_record_line(R"({"coalition":[],"score":1})", kSet), ValidationError);
}

TEST(Fingerprint, OrderFreeAndDistinct) {
  const std::vector<std::string> a{"t1", "t2", "t3"}, b{"t3", "t1", "t2"}, c{"t1", "t2"};
  EXPECT_EQ(task_fingerprint(a), task_fingerprint(b));
  EXPECT_NE(task_fingerprint(a), task_fingerprint(c));
  EXPECT_EQ(task_fingerprint(a).size(), 16u);
  // Joining without a separator would make these collide.
  EXPECT_NE(task_fingerprint(std::vector<std::string>{"ab", "c"}),
            task_fingerprint(std::vector<std::string>{"a", "bc"}));
  EXPECT_EQ(numbered_task_ids(3), (std::vector<std::string>{"t0000", "t0001", "t0002"}));
}
