#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace wfshap {

using Mask = std::uint64_t;

/// Root of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or contract-violating input. The CLI maps this to exit code 2.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A computation needed coalitions the game table does not contain.
class IncompleteGameError : public ValidationError {
 public:
  IncompleteGameError(const std::string& what, std::vector<Mask> missing)
      : ValidationError(what), missing_(std::move(missing)) {}

  const std::vector<Mask>& missing() const noexcept { return missing_; }

 private:
  std::vector<Mask> missing_;
};

/// File or directory access failed.
class IoError : public Error {
 public:
  using Error::Error;
};

/// An evaluator answered, but not in the line protocol. Never retried.
class ProtocolError : public Error {
 public:
  ProtocolError(const std::string& what, std::string offending_line)
      : Error(what), line_(std::move(offending_line)) {}

  const std::string& offending_line() const noexcept { return line_; }

 private:
  std::string line_;
};

/// Evaluator unreachable, timed out, or exited nonzero. Retried up to the
/// adapter's retry bound.
class TransportError : public Error {
 public:
  using Error::Error;
};

/// A coalition could not be evaluated.
class EvaluationError : public Error {
 public:
  EvaluationError(const std::string& what, Mask mask, std::vector<std::string> failed_tasks)
      : Error(what), mask_(mask), failed_tasks_(std::move(failed_tasks)) {}

  Mask mask() const noexcept { return mask_; }
  const std::vector<std::string>& failed_tasks() const noexcept { return failed_tasks_; }

 private:
  Mask mask_;
  std::vector<std::string> failed_tasks_;
};

}  // namespace wfshap
