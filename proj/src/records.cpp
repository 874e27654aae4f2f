#include "wfshap/records.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "json_util.hpp"
#include "wfshap/digest.hpp"

namespace wfshap {

using detail::Json;

FailurePolicy parse_failure_policy(std::string_view name) {
  if (name == "zero" || name == "score-as-zero") return FailurePolicy::kScoreAsZero;
  if (name == "exclude" || name == "exclude-and-renormalize") return FailurePolicy::kExclude;
  throw ValidationError("unknown failure policy '" + std::string(name) + "' (expected zero or exclude)");
}

double mean_score(std::span<const TaskOutcomeRecord> records, FailurePolicy policy) {
  if (records.empty()) throw ValidationError("no records to average");
  double sum = 0.0;
  std::size_t counted = 0;
  for (const auto& r : records) {
    if (r.failed) continue;
    sum += r.score;
    ++counted;
  }
  if (policy == FailurePolicy::kScoreAsZero) return sum / static_cast<double>(records.size());
  if (counted == 0) throw ValidationError("every task failed; nothing to average under the exclude policy");
  return sum / static_cast<double>(counted);
}

GameTable build_game_from_records(std::span<const TaskOutcomeRecord> records, const ComponentSet& components,
                                  FailurePolicy policy) {
  if (records.empty()) throw ValidationError("cannot build a game from an empty record set");

  std::map<Mask, std::vector<const TaskOutcomeRecord*>> by_coalition;
  for (const auto& record : records) {
    if (record.coalition.width() != components.size()) {
      throw ValidationError("record for task '" + record.task_id + "' has coalition width " +
                            std::to_string(record.coalition.width()) + ", expected " +
                            std::to_string(components.size()));
    }
    if (!record.failed && !(record.score >= 0.0 && record.score <= 1.0)) {
      throw ValidationError("record for task '" + record.task_id + "' has score outside [0, 1]");
    }
    by_coalition[record.coalition.mask()].push_back(&record);
  }

  auto sorted_ids = [](std::vector<const TaskOutcomeRecord*>& group, Mask mask) {
    std::sort(group.begin(), group.end(), [](auto* a, auto* b) { return a->task_id < b->task_id; });
    std::vector<std::string> ids;
    ids.reserve(group.size());
    for (const auto* r : group) {
      if (!ids.empty() && ids.back() == r->task_id) {
        throw ValidationError("task '" + r->task_id + "' appears twice for coalition mask " + std::to_string(mask));
      }
      ids.push_back(r->task_id);
    }
    return ids;
  };

  auto& [reference_mask, reference_group] = *by_coalition.begin();
  const auto reference = sorted_ids(reference_group, reference_mask);

  std::vector<GameTable::Entry> entries;
  for (auto& [mask, group] : by_coalition) {
    const auto ids = mask == reference_mask ? reference : sorted_ids(group, mask);
    if (ids != reference) {
      std::vector<std::string> diff;
      std::set_symmetric_difference(reference.begin(), reference.end(), ids.begin(), ids.end(),
                                    std::back_inserter(diff));
      std::string msg = "task sets differ between coalition masks " + std::to_string(reference_mask) + " and " +
                        std::to_string(mask) + "; symmetric difference:";
      for (std::size_t k = 0; k < diff.size() && k < 20; ++k) msg += " " + diff[k];
      if (diff.size() > 20) msg += " ...";
      throw ValidationError(msg);
    }
    std::vector<TaskOutcomeRecord> rows;
    rows.reserve(group.size());
    for (const auto* r : group) rows.push_back(*r);
    double value = 0.0;
    try {
      value = mean_score(rows, policy);
    } catch (const ValidationError& e) {
      throw ValidationError("coalition mask " + std::to_string(mask) + ": " + e.what());
    }
    entries.push_back({Coalition(mask, components.size()), value});
  }
  return GameTable(components, entries, reference.size());
}

std::string format_record_line(const TaskOutcomeRecord& record, const ComponentSet& components) {
  Json j = Json::object();
  j["task_id"] = record.task_id;
  j["coalition"] = member_labels(record.coalition, components);
  j["score"] = detail::number(record.score);
  if (record.failed) j["failed"] = true;
  return j.dump();
}

TaskOutcomeRecord parse_record_line(std::string_view line, const ComponentSet& components) {
  const Json j = detail::parse_strict(line, "record");
  if (!j.is_object()) throw ValidationError("record line must be an object");
  const auto& task = detail::require(j, "task_id", "record");
  if (!task.is_string()) throw ValidationError("record: 'task_id' must be a string");
  TaskOutcomeRecord record;
  record.task_id = task.get<std::string>();
  const auto labels = detail::string_list(detail::require(j, "coalition", "record"), "coalition");
  record.coalition = make_coalition(labels, components);
  record.failed = j.contains("failed") && j.at("failed").is_boolean() && j.at("failed").get<bool>();
  record.score = detail::to_double(detail::require(j, "score", "record"), "score");
  if (!record.failed && !(record.score >= 0.0 && record.score <= 1.0)) {
    throw ValidationError("record for task '" + record.task_id + "' has score outside [0, 1]");
  }
  return record;
}

std::string format_records(std::span<const TaskOutcomeRecord> records, const ComponentSet& components) {
  std::string out;
  for (const auto& r : records) {
    out += format_record_line(r, components);
    out += '\n';
  }
  return out;
}

std::vector<TaskOutcomeRecord> parse_records(std::string_view text, const ComponentSet& components) {
  std::vector<TaskOutcomeRecord> out;
  std::size_t start = 0;
  std::size_t line_no = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") != std::string_view::npos) {
      try {
        out.push_back(parse_record_line(line, components));
      } catch (const ValidationError& e) {
        throw ValidationError("records line " + std::to_string(line_no) + ": " + e.what());
      }
    }
    start = end + 1;
  }
  return out;
}

std::string task_fingerprint(std::span<const std::string> task_ids) {
  std::vector<std::string> sorted(task_ids.begin(), task_ids.end());
  std::sort(sorted.begin(), sorted.end());
  std::string joined;
  for (const auto& id : sorted) {
    joined += id;
    joined += '\n';
  }
  return sha256_hex(joined).substr(0, 16);
}

std::vector<std::string> numbered_task_ids(std::size_t count) {
  std::vector<std::string> ids;
  ids.reserve(count);
  char buf[32];
  for (std::size_t k = 0; k < count; ++k) {
    std::snprintf(buf, sizeof buf, "t%04zu", k);
    ids.emplace_back(buf);
  }
  return ids;
}

}  // namespace wfshap
