#include "wfshap/manifest.hpp"

#include <chrono>
#include <ctime>

#include "json_util.hpp"
#include "wfshap/digest.hpp"

namespace wfshap {

using detail::Json;

void RunManifest::add_input(const std::filesystem::path& path) {
  inputs.push_back({path.string(), sha256_file_hex(path)});
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string format_manifest_json(const RunManifest& m) {
  Json j = Json::object();
  j["command"] = m.command;
  Json inputs = Json::array();
  for (const auto& in : m.inputs) inputs.push_back({{"path", in.path}, {"sha256", in.sha256}});
  j["inputs"] = std::move(inputs);
  j["seed"] = m.seed ? Json(*m.seed) : Json(nullptr);
  j["tool_version"] = m.tool_version;
  j["timestamp"] = m.timestamp;
  j["status"] = m.status;
  if (m.evaluations) j["evaluations"] = *m.evaluations;
  if (m.cache_hits) j["cache_hits"] = *m.cache_hits;
  if (m.completed) j["completed"] = *m.completed;
  if (m.failed_mask) j["failed_mask"] = *m.failed_mask;
  if (!m.error.empty()) j["error"] = m.error;
  return j.dump(2) + "\n";
}

RunManifest parse_manifest_json(std::string_view text) {
  const Json j = detail::parse_strict(text, "manifest");
  RunManifest m;
  try {
    m.command = detail::require(j, "command", "manifest").get<std::string>();
    for (const auto& in : detail::require(j, "inputs", "manifest")) {
      m.inputs.push_back({in.at("path").get<std::string>(), in.at("sha256").get<std::string>()});
    }
    if (j.contains("seed") && !j.at("seed").is_null()) m.seed = j.at("seed").get<std::uint64_t>();
    m.tool_version = detail::require(j, "tool_version", "manifest").get<std::string>();
    m.timestamp = detail::require(j, "timestamp", "manifest").get<std::string>();
    m.status = detail::require(j, "status", "manifest").get<std::string>();
    if (j.contains("evaluations")) m.evaluations = j.at("evaluations").get<std::size_t>();
    if (j.contains("cache_hits")) m.cache_hits = j.at("cache_hits").get<std::size_t>();
    if (j.contains("completed")) m.completed = j.at("completed").get<std::vector<Mask>>();
    if (j.contains("failed_mask")) m.failed_mask = j.at("failed_mask").get<Mask>();
    if (j.contains("error")) m.error = j.at("error").get<std::string>();
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("manifest: ") + e.what());
  }
  return m;
}

}  // namespace wfshap
