#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wfshap/coalition.hpp"

namespace wfshap {

/// Characteristic function v over an ordered component set.
///
/// Storage is dense (one slot per mask) with a presence flag, so a table may be
/// incomplete; validate_game reports what is missing. Entries supplied twice
/// for the same coalition keep the first value and are recorded as duplicates.
/// Immutable after construction.
class GameTable {
 public:
  struct Entry {
    Coalition coalition;
    double value = 0.0;
  };

  GameTable(ComponentSet components, std::span<const Entry> entries,
            std::optional<std::size_t> task_count = std::nullopt, std::string label = {});

  /// Complete table from one value per mask, indexed by mask.
  static GameTable from_dense(ComponentSet components, std::vector<double> values,
                              std::optional<std::size_t> task_count = std::nullopt,
                              std::string label = {});

  const ComponentSet& components() const noexcept { return components_; }
  std::size_t size() const noexcept { return components_.size(); }
  std::size_t coalition_count() const noexcept { return values_.size(); }
  const std::optional<std::size_t>& task_count() const noexcept { return task_count_; }
  const std::string& label() const noexcept { return label_; }

  bool contains(Mask mask) const noexcept { return mask < present_.size() && present_[mask] != 0; }
  bool contains(const Coalition& coalition) const noexcept { return contains(coalition.mask()); }
  bool is_complete() const noexcept { return missing_count_ == 0; }

  /// Throws IncompleteGameError naming the mask when absent.
  double value(Mask mask) const;
  double value(const Coalition& coalition) const { return value(coalition.mask()); }
  double empty_value() const { return value(Mask{0}); }
  double grand_value() const { return value(full_mask(size())); }

  /// Dense values indexed by mask. Absent slots hold NaN.
  std::span<const double> dense() const noexcept { return values_; }

  std::vector<Mask> missing_masks() const;
  const std::vector<Mask>& duplicate_masks() const noexcept { return duplicates_; }

  /// Throws IncompleteGameError listing every missing mask.
  void require_complete() const;

 private:
  GameTable(ComponentSet components, std::optional<std::size_t> task_count, std::string label);

  ComponentSet components_;
  std::vector<double> values_;
  std::vector<unsigned char> present_;
  std::vector<Mask> duplicates_;
  std::size_t missing_count_ = 0;
  std::optional<std::size_t> task_count_;
  std::string label_;
};

enum class Severity { kError, kWarning };

struct Finding {
  Severity severity = Severity::kError;
  std::string message;
};

struct ValidationReport {
  std::vector<Finding> findings;

  std::size_t error_count() const;
  std::size_t warning_count() const;
  bool has_errors() const { return error_count() > 0; }
  bool empty() const { return findings.empty(); }
};

/// Never throws. ERROR per missing coalition, duplicate entry, non-finite value,
/// or (with a task count) a value outside [0, 1]. WARNING per covering pair
/// S, S+{i} with v(S) > v(S+{i}); on a complete table this detects every
/// monotonicity violation, since any decreasing chain has a decreasing step.
ValidationReport validate_game(const GameTable& table);

}  // namespace wfshap
