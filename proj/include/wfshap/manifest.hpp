#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wfshap/errors.hpp"

namespace wfshap {

inline constexpr std::string_view kToolVersion = "0.1.0";

struct InputDigest {
  std::string path;
  std::string sha256;
};

/// Record of one CLI invocation, written next to its outputs.
struct RunManifest {
  std::string command;
  std::vector<InputDigest> inputs;
  std::optional<std::uint64_t> seed;
  std::string tool_version = std::string(kToolVersion);
  std::string timestamp;  ///< UTC, ISO-8601
  std::string status = "complete";
  std::optional<std::size_t> evaluations;  ///< coalitions sent to an evaluator
  std::optional<std::size_t> cache_hits;

  /// Set on aborted runs: coalitions already evaluated (and cached), and the
  /// one that failed.
  std::optional<std::vector<Mask>> completed;
  std::optional<Mask> failed_mask;
  std::string error;

  void add_input(const std::filesystem::path& path);
};

/// Current time as "YYYY-MM-DDThh:mm:ssZ".
std::string utc_timestamp();

std::string format_manifest_json(const RunManifest& manifest);
RunManifest parse_manifest_json(std::string_view text);

}  // namespace wfshap
