#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wfshap/attribution.hpp"
#include "wfshap/cache.hpp"
#include "wfshap/evaluator.hpp"
#include "wfshap/records.hpp"

namespace wfshap {

struct CoalitionOutcome {
  std::vector<TaskOutcomeRecord> records;  ///< one per task, in task-list order
  bool from_cache = false;
};

/// Evaluates one coalition over a task list, consulting the cache first.
///
/// On a miss the evaluator is called (retrying TransportErrors up to the
/// adapter's max_retries), every response line is checked against the line
/// protocol, and the records are cached before returning. Exhausted retries
/// raise EvaluationError with the mask and task ids; a bad response raises
/// ProtocolError quoting the line and caches nothing.
CoalitionOutcome evaluate_coalition(Evaluator& evaluator, const ComponentSet& components,
                                    const Coalition& coalition, std::span<const std::string> tasks,
                                    CoalitionCache& cache);

struct RunOptions {
  FailurePolicy failure_policy = FailurePolicy::kScoreAsZero;
  /// Concurrent coalition evaluations on the exact path. Only honoured when
  /// the evaluator is reentrant; 1 means sequential.
  std::size_t parallelism = 1;
};

struct RunOutcome {
  AttributionResult result;
  /// Complete table on the exact path; the evaluated coalitions on the sampled
  /// path (when the component count allows a table at all).
  std::optional<GameTable> table;
  std::size_t evaluations = 0;  ///< coalitions sent to the evaluator
  std::size_t cache_hits = 0;
  std::vector<Mask> completed;  ///< ascending
};

/// Raised when a run stops early. `completed` lists the coalitions whose
/// records are already cached, so a rerun with the same cache resumes.
class RunAborted : public Error {
 public:
  RunAborted(const std::string& what, std::vector<Mask> completed, std::optional<Mask> failed_mask,
             bool protocol_failure)
      : Error(what), completed_(std::move(completed)), failed_mask_(failed_mask), protocol_(protocol_failure) {}

  const std::vector<Mask>& completed() const noexcept { return completed_; }
  const std::optional<Mask>& failed_mask() const noexcept { return failed_mask_; }
  bool protocol_failure() const noexcept { return protocol_; }

 private:
  std::vector<Mask> completed_;
  std::optional<Mask> failed_mask_;
  bool protocol_;
};

/// Baseline/target replacement loop: evaluate coalitions through the
/// evaluator, aggregate task outcomes into v(S), and attribute.
///
/// The exact method evaluates every one of the 2^n coalitions once (cache
/// hits excluded) and needs n <= 20. The permutation method evaluates only
/// the coalitions its sampled orderings visit.
RunOutcome run_workflow_attribution(Evaluator& evaluator, const ComponentSet& components,
                                    std::span<const std::string> tasks, const EstimatorConfig& estimator,
                                    CoalitionCache& cache, const RunOptions& options = {});

}  // namespace wfshap
