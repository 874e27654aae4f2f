#include "wfshap/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <map>
#include <mutex>
#include <thread>
#include <unordered_set>

#include "json_util.hpp"

namespace wfshap {

using detail::Json;

namespace {

TaskOutcomeRecord parse_response(const std::string& line, const std::string& expected_task, const Coalition& coalition) {
  Json j;
  try {
    j = detail::parse_strict(line, "evaluator response");
  } catch (const ValidationError& e) {
    throw ProtocolError(std::string("malformed evaluator response: ") + e.what(), line);
  }
  if (!j.is_object() || !j.contains("task_id") || !j.at("task_id").is_string()) {
    throw ProtocolError("evaluator response lacks a string 'task_id'", line);
  }
  const auto task_id = j.at("task_id").get<std::string>();
  if (task_id != expected_task) {
    throw ProtocolError("evaluator response for task '" + task_id + "' where '" + expected_task + "' was expected",
                        line);
  }
  if (j.contains("error")) return {task_id, coalition, 0.0, true};
  if (!j.contains("score") || !j.at("score").is_number()) {
    throw ProtocolError("evaluator response lacks a numeric 'score'", line);
  }
  const double score = j.at("score").get<double>();
  if (!(score >= 0.0 && score <= 1.0)) {
    throw ProtocolError("evaluator score outside [0, 1]", line);
  }
  return {task_id, coalition, score, false};
}

CoalitionOutcome evaluate_with_key(Evaluator& evaluator, const ComponentSet& components, const Coalition& coalition,
                                   std::span<const std::string> tasks, CoalitionCache& cache, const CacheKey& key) {
  if (auto cached = cache.lookup(key)) {
    auto records = parse_records(*cached, components);
    if (records.size() != tasks.size()) {
      throw ValidationError("cache entry " + key.file_name() + " holds " + std::to_string(records.size()) +
                            " records for " + std::to_string(tasks.size()) + " tasks");
    }
    return {std::move(records), true};
  }

  std::vector<std::string> requests;
  requests.reserve(tasks.size());
  for (const auto& task : tasks) requests.push_back(format_request_line(coalition, components, task));

  const unsigned attempts = evaluator.adapter().max_retries + 1;
  std::vector<std::string> responses;
  for (unsigned attempt = 1;; ++attempt) {
    try {
      responses = evaluator.run(requests);
      break;
    } catch (const TransportError& e) {
      if (attempt >= attempts) {
        throw EvaluationError("coalition mask " + std::to_string(coalition.mask()) + " failed after " +
                                  std::to_string(attempts) + " attempt(s): " + e.what(),
                              coalition.mask(), std::vector<std::string>(tasks.begin(), tasks.end()));
      }
    }
  }

  if (responses.size() > tasks.size()) {
    throw ProtocolError("evaluator returned " + std::to_string(responses.size()) + " lines for " +
                            std::to_string(tasks.size()) + " tasks",
                        responses[tasks.size()]);
  }
  if (responses.size() < tasks.size()) {
    throw ProtocolError("evaluator returned " + std::to_string(responses.size()) + " lines for " +
                            std::to_string(tasks.size()) + " tasks",
                        responses.empty() ? std::string() : responses.back());
  }
  std::vector<TaskOutcomeRecord> records;
  records.reserve(tasks.size());
  for (std::size_t k = 0; k < tasks.size(); ++k) records.push_back(parse_response(responses[k], tasks[k], coalition));

  cache.store(key, format_records(records, components));
  return {std::move(records), false};
}

void check_tasks(std::span<const std::string> tasks) {
  if (tasks.empty()) throw ValidationError("task list is empty");
  std::unordered_set<std::string_view> seen;
  for (const auto& t : tasks) {
    if (t.empty()) throw ValidationError("task ids must be non-empty");
    if (!seen.insert(t).second) throw ValidationError("task '" + t + "' is listed twice");
  }
}

}  // namespace

CoalitionOutcome evaluate_coalition(Evaluator& evaluator, const ComponentSet& components, const Coalition& coalition,
                                    std::span<const std::string> tasks, CoalitionCache& cache) {
  check_tasks(tasks);
  if (coalition.width() != components.size()) throw ValidationError("coalition width does not match components");
  return evaluate_with_key(evaluator, components, coalition, tasks, cache, {coalition.mask(), task_fingerprint(tasks)});
}

RunOutcome run_workflow_attribution(Evaluator& evaluator, const ComponentSet& components,
                                    std::span<const std::string> tasks, const EstimatorConfig& estimator,
                                    CoalitionCache& cache, const RunOptions& options) {
  check_tasks(tasks);
  const auto n = components.size();
  const auto fingerprint = task_fingerprint(tasks);
  RunOutcome out;

  if (estimator.method == Method::kPermutationMc) {
    std::map<Mask, double> values;
    std::optional<Mask> failing;
    bool protocol = false;
    CoalitionOracle oracle = [&](const Coalition& coalition) {
      failing = coalition.mask();
      CoalitionOutcome outcome;
      try {
        outcome = evaluate_with_key(evaluator, components, coalition, tasks, cache, {coalition.mask(), fingerprint});
      } catch (const ProtocolError&) {
        protocol = true;
        throw;
      }
      (outcome.from_cache ? out.cache_hits : out.evaluations) += 1;
      const double v = mean_score(outcome.records, options.failure_policy);
      values.emplace(coalition.mask(), v);
      failing.reset();
      return v;
    };
    try {
      out.result = shapley_permutation(oracle, components, estimator);
    } catch (const Error& e) {
      std::vector<Mask> completed;
      for (const auto& [mask, v] : values) completed.push_back(mask);
      throw RunAborted(e.what(), std::move(completed), failing, protocol);
    }
    for (const auto& [mask, v] : values) out.completed.push_back(mask);
    if (n <= kMaxExactComponents) {
      std::vector<GameTable::Entry> entries;
      for (const auto& [mask, v] : values) entries.push_back({Coalition(mask, n), v});
      out.table.emplace(components, entries, tasks.size());
    }
    return out;
  }

  if (estimator.method != Method::kExact) throw ValidationError("run needs method exact or permutation_mc");
  if (n > kMaxExactComponents) {
    throw ValidationError("exact attribution over " + std::to_string(n) + " components exceeds the limit of " +
                          std::to_string(kMaxExactComponents) + "; use the permutation estimator");
  }

  const std::size_t count = std::size_t{1} << n;
  std::vector<std::optional<CoalitionOutcome>> outcomes(count);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  std::optional<Mask> failed_mask;

  auto worker = [&] {
    while (!stop.load()) {
      const std::size_t m = next.fetch_add(1);
      if (m >= count) return;
      try {
        outcomes[m] = evaluate_with_key(evaluator, components, Coalition(m, n), tasks, cache, {m, fingerprint});
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) {
          first_error = std::current_exception();
          failed_mask = m;
        }
        stop.store(true);
      }
    }
  };

  const std::size_t threads =
      evaluator.reentrant() ? std::clamp<std::size_t>(options.parallelism, 1, count) : std::size_t{1};
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  for (Mask m = 0; m < count; ++m) {
    if (outcomes[m]) out.completed.push_back(m);
  }
  if (first_error) {
    try {
      std::rethrow_exception(first_error);
    } catch (const ProtocolError& e) {
      throw RunAborted(std::string(e.what()) + ": " + e.offending_line(), out.completed, failed_mask, true);
    } catch (const Error& e) {
      throw RunAborted(e.what(), out.completed, failed_mask, false);
    }
  }

  std::vector<TaskOutcomeRecord> all;
  all.reserve(count * tasks.size());
  for (auto& outcome : outcomes) {
    (outcome->from_cache ? out.cache_hits : out.evaluations) += 1;
    std::move(outcome->records.begin(), outcome->records.end(), std::back_inserter(all));
  }
  out.table.emplace(build_game_from_records(all, components, options.failure_policy));
  out.table->require_complete();
  out.result = shapley_exact(*out.table);
  return out;
}

}  // namespace wfshap
