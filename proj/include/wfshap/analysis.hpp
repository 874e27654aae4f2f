#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wfshap/attribution.hpp"

namespace wfshap {

/// Per-candidate attribution rows over one component set: one row per
/// candidate implementation (e.g. a model), one phi per component.
class ModelAttributionTable {
 public:
  struct Row {
    std::string candidate;
    std::vector<double> phi;  ///< component order
    std::optional<double> acc;           ///< v(N) with this candidate everywhere
    std::optional<double> baseline_acc;  ///< v(empty), the all-baseline workflow
  };

  ModelAttributionTable(ComponentSet components, std::vector<Row> rows, std::string label = {});

  const ComponentSet& components() const noexcept { return components_; }
  const std::vector<Row>& rows() const noexcept { return rows_; }
  const std::string& label() const noexcept { return label_; }
  bool empty() const noexcept { return rows_.empty(); }

  const Row* find(std::string_view candidate) const;
  const Row& at(std::string_view candidate) const;
  std::vector<std::string> candidates() const;

  /// phi of one component keyed by candidate.
  std::map<std::string, double> column(std::size_t component) const;

 private:
  ComponentSet components_;
  std::vector<Row> rows_;
  std::string label_;
};

/// { "label": str?, "components": [...],
///   "rows": { "<candidate>": { "phi": { "<component>": n, ... }, "acc": n?, "baseline_acc": n? } } }
ModelAttributionTable parse_attribution_table_json(std::string_view text);
std::string format_attribution_table_json(const ModelAttributionTable& table);
ModelAttributionTable read_attribution_table_file(const std::filesystem::path& path);

/// The published row as an AttributionResult with its endpoints. Needs both
/// acc and baseline_acc.
AttributionResult reported_result(const ModelAttributionTable& table, std::string_view candidate);

/// Two-entry game holding only v(empty) = baseline_acc and v(N) = acc, enough
/// for the efficiency check.
GameTable endpoint_game(const ModelAttributionTable& table, std::string_view candidate);

struct WorkflowConfiguration {
  struct Choice {
    ComponentId component;
    std::string candidate;
    double phi = 0.0;
  };
  std::vector<Choice> assignment;  ///< one per component, component order
  std::string note;
};

/// Per component, the candidate with the largest phi. Ties go to the
/// lexicographically smallest candidate label.
WorkflowConfiguration discover_optimal_configuration(const ModelAttributionTable& table);

struct PairCount {
  std::size_t consistent = 0;
  std::size_t total = 0;
  double rate() const { return static_cast<double>(consistent) / static_cast<double>(total); }
};

/// Counts candidate pairs ordered the same way by both maps. A pair tied on
/// both sides is consistent; tied on one side only, inconsistent.
PairCount consistency_pairs(const std::map<std::string, double>& a, const std::map<std::string, double>& b);
double consistency_rate(const std::map<std::string, double>& a, const std::map<std::string, double>& b);

struct ConsistencyReport {
  struct Entry {
    std::string component;
    PairCount pairs;
  };
  std::vector<Entry> components;
  /// Pairs summed over the listed components, then divided once.
  PairCount pooled;
};

/// Compares two tables over the same components and candidates, for one
/// component or (when `component` is empty) all of them.
ConsistencyReport compare_tables(const ModelAttributionTable& a, const ModelAttributionTable& b,
                                 std::optional<std::string> component = std::nullopt);

struct JudgeScoreSeries {
  ComponentId component;
  std::map<std::string, double> scores;
  std::map<std::string, double> phi;
};

/// Pearson correlation of phi against scores.
double correlate_with_judge(const JudgeScoreSeries& series);

}  // namespace wfshap
