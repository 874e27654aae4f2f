#include "wfshap/game.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace wfshap {

namespace {

constexpr double kAbsent = std::numeric_limits<double>::quiet_NaN();

std::string format_value(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

GameTable::GameTable(ComponentSet components, std::optional<std::size_t> task_count, std::string label)
    : components_(std::move(components)), task_count_(task_count), label_(std::move(label)) {
  const auto n = components_.size();
  if (n > kMaxExactComponents) {
    throw ValidationError("game table over " + std::to_string(n) +
                          " components exceeds the exact-enumeration limit of " +
                          std::to_string(kMaxExactComponents) + "; use the sampled estimator with an evaluator");
  }
  if (task_count_ && *task_count_ == 0) throw ValidationError("task_count must be positive");
  const std::size_t count = std::size_t{1} << n;
  values_.assign(count, kAbsent);
  present_.assign(count, 0);
  missing_count_ = count;
}

GameTable::GameTable(ComponentSet components, std::span<const Entry> entries,
                     std::optional<std::size_t> task_count, std::string label)
    : GameTable(std::move(components), task_count, std::move(label)) {
  for (const auto& entry : entries) {
    if (entry.coalition.width() != size()) {
      throw ValidationError("coalition width " + std::to_string(entry.coalition.width()) +
                            " does not match " + std::to_string(size()) + " components");
    }
    const auto mask = entry.coalition.mask();
    if (present_[mask] != 0) {
      duplicates_.push_back(mask);
      continue;
    }
    present_[mask] = 1;
    values_[mask] = entry.value;
    --missing_count_;
  }
}

GameTable GameTable::from_dense(ComponentSet components, std::vector<double> values,
                                std::optional<std::size_t> task_count, std::string label) {
  GameTable table(std::move(components), task_count, std::move(label));
  if (values.size() != table.values_.size()) {
    throw ValidationError("dense game table needs " + std::to_string(table.values_.size()) +
                          " values, got " + std::to_string(values.size()));
  }
  table.values_ = std::move(values);
  std::fill(table.present_.begin(), table.present_.end(), 1);
  table.missing_count_ = 0;
  return table;
}

double GameTable::value(Mask mask) const {
  if (!contains(mask)) {
    throw IncompleteGameError("coalition mask " + std::to_string(mask) + " is not in the game table", {mask});
  }
  return values_[mask];
}

std::vector<Mask> GameTable::missing_masks() const {
  std::vector<Mask> out;
  out.reserve(missing_count_);
  for (Mask m = 0; m < present_.size(); ++m) {
    if (present_[m] == 0) out.push_back(m);
  }
  return out;
}

void GameTable::require_complete() const {
  if (is_complete()) return;
  auto missing = missing_masks();
  std::string msg = "game table is incomplete: missing " + std::to_string(missing.size()) + " coalition(s), masks";
  const std::size_t shown = std::min<std::size_t>(missing.size(), 32);
  for (std::size_t k = 0; k < shown; ++k) msg += (k == 0 ? " " : ", ") + std::to_string(missing[k]);
  if (shown < missing.size()) msg += ", ...";
  throw IncompleteGameError(msg, std::move(missing));
}

std::size_t ValidationReport::error_count() const {
  return static_cast<std::size_t>(std::count_if(findings.begin(), findings.end(),
                                                [](const Finding& f) { return f.severity == Severity::kError; }));
}

std::size_t ValidationReport::warning_count() const {
  return findings.size() - error_count();
}

ValidationReport validate_game(const GameTable& table) {
  ValidationReport report;
  const auto& components = table.components();
  const auto n = table.size();
  const auto values = table.dense();
  auto name = [&](Mask m) { return coalition_display(Coalition(m, n), components) + " (mask " + std::to_string(m) + ")"; };

  for (Mask m = 0; m < values.size(); ++m) {
    if (!table.contains(m)) {
      report.findings.push_back({Severity::kError, "missing coalition " + name(m)});
      continue;
    }
    const double v = values[m];
    if (!std::isfinite(v)) {
      report.findings.push_back({Severity::kError, "non-finite value for " + name(m)});
    } else if (table.task_count() && (v < 0.0 || v > 1.0)) {
      report.findings.push_back({Severity::kError, "value " + format_value(v) + " for " + name(m) +
                                                       " lies outside [0, 1] for a success-rate table"});
    }
  }
  for (auto m : table.duplicate_masks()) {
    report.findings.push_back({Severity::kError, "duplicate entry for " + name(m)});
  }

  for (Mask m = 0; m < values.size(); ++m) {
    if (!table.contains(m) || !std::isfinite(values[m])) continue;
    for (std::size_t i = 0; i < n; ++i) {
      if ((m & bit(i)) != 0) continue;
      const Mask up = m | bit(i);
      if (!table.contains(up) || !std::isfinite(values[up])) continue;
      if (values[m] > values[up]) {
        report.findings.push_back({Severity::kWarning, "monotonicity violated: v" + name(m) + " = " +
                                                           format_value(values[m]) + " > v" + name(up) +
                                                           " = " + format_value(values[up])});
      }
    }
  }
  return report;
}

}  // namespace wfshap
