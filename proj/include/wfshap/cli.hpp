#pragma once

#include <iosfwd>

namespace wfshap {

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitEnvironment = 1,  ///< I/O, transport or protocol failure
  kExitValidation = 2,   ///< malformed or invalid input
};

/// Runs the command-line tool with the given streams; returns the exit code.
/// The sim-evaluator subcommand serves requests from `in`.
int run_cli(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace wfshap
