#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "wfshap/coalition.hpp"
#include "wfshap/simulator.hpp"

namespace wfshap {

// Line protocol between the orchestrator and an external workflow harness.
//   request  (one per task): {"coalition": [labels...], "task_id": "t0001"}
//   response (one per task, same order): {"task_id": "t0001", "score": 0.0..1.0}
//                                     or {"task_id": "t0001", "error": "reason"}
// UTF-8, one JSON object per line. An "error" response marks that task failed.

enum class AdapterKind { kSubprocess, kHttp, kSimulator };

/// Where and how coalitions get evaluated.
struct EvaluatorAdapter {
  AdapterKind kind = AdapterKind::kSimulator;
  /// Shell command, URL, or simulator spec path, depending on kind.
  std::string target;
  std::chrono::milliseconds timeout{60'000};
  unsigned max_retries = 2;

  /// "subprocess:CMD", "http:URL" (or a bare http:// URL), "sim:SPEC_PATH".
  static EvaluatorAdapter parse(std::string_view text);
  void validate() const;
};

std::string format_request_line(const Coalition& coalition, const ComponentSet& components, std::string_view task_id);

/// Executes one batch of request lines and returns the raw response lines.
///
/// Implementations throw TransportError for failures worth retrying.
/// Response content is validated by the caller, not here.
class Evaluator {
 public:
  virtual ~Evaluator() = default;

  std::vector<std::string> run(const std::vector<std::string>& request_lines) {
    invocations_.fetch_add(1, std::memory_order_relaxed);
    return exchange(request_lines);
  }

  /// Number of run() calls so far, including retried attempts.
  std::size_t invocations() const noexcept { return invocations_.load(std::memory_order_relaxed); }

  /// True when run() may be called from several threads at once.
  virtual bool reentrant() const noexcept { return false; }

  const EvaluatorAdapter& adapter() const noexcept { return adapter_; }

 protected:
  explicit Evaluator(EvaluatorAdapter adapter) : adapter_(std::move(adapter)) {}
  virtual std::vector<std::string> exchange(const std::vector<std::string>& request_lines) = 0;

 private:
  EvaluatorAdapter adapter_;
  std::atomic<std::size_t> invocations_{0};
};

/// Runs `sh -c target` per batch: requests on stdin, responses on stdout.
/// A nonzero exit status or timeout is a TransportError.
class SubprocessEvaluator final : public Evaluator {
 public:
  explicit SubprocessEvaluator(EvaluatorAdapter adapter);
  bool reentrant() const noexcept override { return true; }

 protected:
  std::vector<std::string> exchange(const std::vector<std::string>& request_lines) override;
};

/// POSTs the batch as application/x-ndjson; the response body holds the lines.
class HttpEvaluator final : public Evaluator {
 public:
  explicit HttpEvaluator(EvaluatorAdapter adapter);
  bool reentrant() const noexcept override { return true; }

 protected:
  std::vector<std::string> exchange(const std::vector<std::string>& request_lines) override;

 private:
  std::string base_;
  std::string path_;
};

/// Scores requests in process with simulate_task_score.
class SimulatorEvaluator final : public Evaluator {
 public:
  SimulatorEvaluator(SyntheticGameSpec spec, ComponentSet components, std::uint64_t seed,
                     EvaluatorAdapter adapter = {});
  bool reentrant() const noexcept override { return true; }

  const SyntheticGameSpec& spec() const noexcept { return spec_; }
  const ComponentSet& components() const noexcept { return components_; }

  /// Answers one request line; used by the CLI's stdin/stdout evaluator too.
  std::string respond(std::string_view request_line) const;

 protected:
  std::vector<std::string> exchange(const std::vector<std::string>& request_lines) override;

 private:
  SyntheticGameSpec spec_;
  ComponentSet components_;
  std::uint64_t seed_;
};

/// Builds the evaluator an adapter describes. Simulator adapters read their
/// spec file and use `seed`; the spec's n must match `components`.
std::unique_ptr<Evaluator> make_evaluator(const EvaluatorAdapter& adapter, const ComponentSet& components,
                                          std::uint64_t seed);

}  // namespace wfshap
