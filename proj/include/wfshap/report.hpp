#pragma once

#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "wfshap/analysis.hpp"
#include "wfshap/attribution.hpp"

namespace wfshap {

enum class Format { kTableText, kCsv, kStructuredObject };

/// "text", "csv" or "json".
Format parse_format(std::string_view name);
std::string_view format_name(Format format);

/// Ordered (label, value) points, e.g. every coalition of a game for a bar chart.
struct CoalitionSeries {
  std::string title;
  std::vector<std::pair<std::string, double>> points;
};

/// All coalitions of a complete table in ascending mask order, labelled by
/// coalition key ("{}" for the empty coalition).
CoalitionSeries coalition_sweep(const GameTable& game);

using ReportItem = std::variant<AttributionResult, SynergyMatrix, WorkflowConfiguration, ConsistencyReport,
                                CoalitionSeries>;

/// table_text rounds to 3 decimals. csv and json print every number in its
/// shortest round-trip form. One item in json is a single object with a
/// "kind" member; several are an array of such objects. Several csv items
/// are separated by a blank line, each with its own header.
std::string emit_report(std::span<const ReportItem> items, Format format);
std::string emit_report(const ReportItem& item, Format format);

/// Inverse of the json emission.
std::vector<ReportItem> parse_report_json(std::string_view text);

/// Shortest decimal that reads back to the same double.
std::string format_double(double value);

}  // namespace wfshap
