#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wfshap/game.hpp"

namespace wfshap {

/// One task's outcome under one coalition. Scores lie in [0, 1]; binary tasks
/// use 0 or 1. A failed record is a task the evaluator could not score.
struct TaskOutcomeRecord {
  std::string task_id;
  Coalition coalition;
  double score = 0.0;
  bool failed = false;

  friend bool operator==(const TaskOutcomeRecord&, const TaskOutcomeRecord&) = default;
};

/// How failed task records enter the coalition mean.
enum class FailurePolicy {
  kScoreAsZero,  ///< a failure counts as score 0 over the full task set
  kExclude,      ///< failures are dropped and the mean is over the remaining tasks
};

FailurePolicy parse_failure_policy(std::string_view name);

/// Mean score of one coalition's records under a failure policy.
double mean_score(std::span<const TaskOutcomeRecord> records, FailurePolicy policy);

/// v(S) = mean task score for every coalition that has records. Every covered
/// coalition must carry the same task-id set, with no (task, coalition)
/// repeats. Coalitions without records are simply absent from the table.
GameTable build_game_from_records(std::span<const TaskOutcomeRecord> records, const ComponentSet& components,
                                  FailurePolicy policy = FailurePolicy::kScoreAsZero);

/// One JSON object per line: {"task_id": str, "coalition": [labels], "score": n, "failed": true?}
std::string format_record_line(const TaskOutcomeRecord& record, const ComponentSet& components);
TaskOutcomeRecord parse_record_line(std::string_view line, const ComponentSet& components);

std::string format_records(std::span<const TaskOutcomeRecord> records, const ComponentSet& components);
std::vector<TaskOutcomeRecord> parse_records(std::string_view text, const ComponentSet& components);

/// Stable hash of the sorted task-id list (16 hex digits of SHA-256).
std::string task_fingerprint(std::span<const std::string> task_ids);

/// "t0000", "t0001", ...
std::vector<std::string> numbered_task_ids(std::size_t count);

}  // namespace wfshap
