#include "wfshap/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "json_util.hpp"
#include "wfshap/game_io.hpp"

namespace wfshap {

using detail::Json;

ModelAttributionTable::ModelAttributionTable(ComponentSet components, std::vector<Row> rows, std::string label)
    : components_(std::move(components)), rows_(std::move(rows)), label_(std::move(label)) {
  std::unordered_set<std::string> seen;
  for (const auto& row : rows_) {
    if (row.candidate.empty()) throw ValidationError("candidate labels must be non-empty");
    if (!seen.insert(row.candidate).second) {
      throw ValidationError("candidate '" + row.candidate + "' appears twice");
    }
    if (row.phi.size() != components_.size()) {
      throw ValidationError("candidate '" + row.candidate + "' has " + std::to_string(row.phi.size()) +
                            " phi values for " + std::to_string(components_.size()) + " components");
    }
    for (double v : row.phi) {
      if (!std::isfinite(v)) throw ValidationError("candidate '" + row.candidate + "' has a non-finite phi");
    }
  }
}

const ModelAttributionTable::Row* ModelAttributionTable::find(std::string_view candidate) const {
  for (const auto& row : rows_) {
    if (row.candidate == candidate) return &row;
  }
  return nullptr;
}

const ModelAttributionTable::Row& ModelAttributionTable::at(std::string_view candidate) const {
  if (const auto* row = find(candidate)) return *row;
  throw ValidationError("no candidate '" + std::string(candidate) + "' in the attribution table");
}

std::vector<std::string> ModelAttributionTable::candidates() const {
  std::vector<std::string> out;
  out.reserve(rows_.size());
  for (const auto& row : rows_) out.push_back(row.candidate);
  return out;
}

std::map<std::string, double> ModelAttributionTable::column(std::size_t component) const {
  if (component >= components_.size()) throw ValidationError("component index out of range");
  std::map<std::string, double> out;
  for (const auto& row : rows_) out.emplace(row.candidate, row.phi[component]);
  return out;
}

ModelAttributionTable parse_attribution_table_json(std::string_view text) {
  const Json doc = detail::parse_strict(text, "attribution table");
  if (!doc.is_object()) throw ValidationError("attribution table must be an object");
  ComponentSet components(detail::string_list(detail::require(doc, "components", "attribution table"), "components"));
  std::string label;
  if (doc.contains("label")) {
    if (!doc.at("label").is_string()) throw ValidationError("attribution table: 'label' must be a string");
    label = doc.at("label").get<std::string>();
  }
  const auto& rows_json = detail::require(doc, "rows", "attribution table");
  if (!rows_json.is_object()) throw ValidationError("attribution table: 'rows' must be an object");

  auto optional_number = [](const Json& row, const char* key, const std::string& candidate) -> std::optional<double> {
    if (!row.contains(key)) return std::nullopt;
    if (!row.at(key).is_number()) {
      throw ValidationError("candidate '" + candidate + "': '" + key + "' must be a number");
    }
    return row.at(key).get<double>();
  };

  std::vector<ModelAttributionTable::Row> rows;
  for (const auto& [candidate, row_json] : rows_json.items()) {
    const auto& phi_json = detail::require(row_json, "phi", "candidate '" + candidate + "'");
    if (!phi_json.is_object()) throw ValidationError("candidate '" + candidate + "': 'phi' must be an object");
    ModelAttributionTable::Row row;
    row.candidate = candidate;
    row.phi.assign(components.size(), std::nan(""));
    std::vector<bool> seen(components.size(), false);
    for (const auto& [component, value] : phi_json.items()) {
      const auto index = components.at(component).index;
      if (!value.is_number()) {
        throw ValidationError("candidate '" + candidate + "': phi of '" + component + "' must be a number");
      }
      row.phi[index] = value.get<double>();
      seen[index] = true;
    }
    for (std::size_t i = 0; i < components.size(); ++i) {
      if (!seen[i]) {
        throw ValidationError("candidate '" + candidate + "' lacks phi for '" + components.label(i) + "'");
      }
    }
    row.acc = optional_number(row_json, "acc", candidate);
    row.baseline_acc = optional_number(row_json, "baseline_acc", candidate);
    rows.push_back(std::move(row));
  }
  return ModelAttributionTable(std::move(components), std::move(rows), std::move(label));
}

std::string format_attribution_table_json(const ModelAttributionTable& table) {
  Json doc = Json::object();
  if (!table.label().empty()) doc["label"] = table.label();
  doc["components"] = table.components().labels();
  Json rows = Json::object();
  for (const auto& row : table.rows()) {
    Json r = Json::object();
    Json phi = Json::object();
    for (std::size_t i = 0; i < row.phi.size(); ++i) phi[table.components().label(i)] = row.phi[i];
    r["phi"] = std::move(phi);
    if (row.acc) r["acc"] = *row.acc;
    if (row.baseline_acc) r["baseline_acc"] = *row.baseline_acc;
    rows[row.candidate] = std::move(r);
  }
  doc["rows"] = std::move(rows);
  return doc.dump(2) + "\n";
}

ModelAttributionTable read_attribution_table_file(const std::filesystem::path& path) {
  const auto text = read_text_file(path);
  try {
    return parse_attribution_table_json(text);
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

namespace {

const ModelAttributionTable::Row& row_with_endpoints(const ModelAttributionTable& table, std::string_view candidate) {
  const auto& row = table.at(candidate);
  if (!row.acc || !row.baseline_acc) {
    throw ValidationError("candidate '" + row.candidate + "' needs both 'acc' and 'baseline_acc'");
  }
  return row;
}

}  // namespace

AttributionResult reported_result(const ModelAttributionTable& table, std::string_view candidate) {
  const auto& row = row_with_endpoints(table, candidate);
  AttributionResult r;
  r.labels = table.components().labels();
  r.phi = row.phi;
  r.method = Method::kReported;
  r.empty_value = *row.baseline_acc;
  r.grand_value = *row.acc;
  return r;
}

GameTable endpoint_game(const ModelAttributionTable& table, std::string_view candidate) {
  const auto& row = row_with_endpoints(table, candidate);
  const auto n = table.components().size();
  const GameTable::Entry entries[] = {{Coalition::empty(n), *row.baseline_acc}, {Coalition::grand(n), *row.acc}};
  return GameTable(table.components(), std::span<const GameTable::Entry>(entries, n == 0 ? 1 : 2), std::nullopt,
                   table.label().empty() ? row.candidate : table.label() + "/" + row.candidate);
}

WorkflowConfiguration discover_optimal_configuration(const ModelAttributionTable& table) {
  if (table.empty()) throw ValidationError("attribution table has no candidates");
  WorkflowConfiguration config;
  for (std::size_t c = 0; c < table.components().size(); ++c) {
    const ModelAttributionTable::Row* best = nullptr;
    for (const auto& row : table.rows()) {
      if (best == nullptr || row.phi[c] > best->phi[c] ||
          (row.phi[c] == best->phi[c] && row.candidate < best->candidate)) {
        best = &row;
      }
    }
    config.assignment.push_back({table.components().id(c), best->candidate, best->phi[c]});
  }
  config.note =
      "assignment only; the mixed configuration's performance is not predicted and needs its own evaluation run";
  return config;
}

PairCount consistency_pairs(const std::map<std::string, double>& a, const std::map<std::string, double>& b) {
  if (a.size() != b.size() || !std::equal(a.begin(), a.end(), b.begin(), [](const auto& x, const auto& y) {
        return x.first == y.first;
      })) {
    std::string msg = "candidate sets differ:";
    for (const auto& [k, v] : a) {
      if (!b.contains(k)) msg += " " + k + " (first only)";
    }
    for (const auto& [k, v] : b) {
      if (!a.contains(k)) msg += " " + k + " (second only)";
    }
    throw ValidationError(msg);
  }
  if (a.size() < 2) throw ValidationError("consistency needs at least two candidates");
  for (const auto* m : {&a, &b}) {
    for (const auto& [k, v] : *m) {
      if (!std::isfinite(v)) throw ValidationError("candidate '" + k + "' has a non-finite value");
    }
  }

  auto sign = [](double d) { return (d > 0) - (d < 0); };
  std::vector<double> va, vb;
  for (const auto& [k, v] : a) va.push_back(v);
  for (const auto& [k, v] : b) vb.push_back(v);
  PairCount count;
  for (std::size_t i = 0; i < va.size(); ++i) {
    for (std::size_t j = i + 1; j < va.size(); ++j) {
      ++count.total;
      if (sign(va[i] - va[j]) == sign(vb[i] - vb[j])) ++count.consistent;
    }
  }
  return count;
}

double consistency_rate(const std::map<std::string, double>& a, const std::map<std::string, double>& b) {
  return consistency_pairs(a, b).rate();
}

ConsistencyReport compare_tables(const ModelAttributionTable& a, const ModelAttributionTable& b,
                                 std::optional<std::string> component) {
  if (a.components() != b.components()) throw ValidationError("the two tables have different component sets");
  std::vector<std::size_t> indices;
  if (component) {
    indices.push_back(a.components().at(*component).index);
  } else {
    for (std::size_t i = 0; i < a.components().size(); ++i) indices.push_back(i);
  }
  ConsistencyReport report;
  for (auto i : indices) {
    auto pairs = consistency_pairs(a.column(i), b.column(i));
    report.pooled.consistent += pairs.consistent;
    report.pooled.total += pairs.total;
    report.components.push_back({a.components().label(i), pairs});
  }
  return report;
}

double correlate_with_judge(const JudgeScoreSeries& series) {
  if (series.scores.size() != series.phi.size() ||
      !std::equal(series.scores.begin(), series.scores.end(), series.phi.begin(),
                  [](const auto& x, const auto& y) { return x.first == y.first; })) {
    throw ValidationError("judge scores and phi cover different candidates");
  }
  const auto m = series.phi.size();
  if (m < 3) throw ValidationError("correlation needs at least three candidates");
  double mean_x = 0.0, mean_y = 0.0;
  for (const auto& [k, v] : series.phi) mean_x += v;
  for (const auto& [k, v] : series.scores) mean_y += v;
  mean_x /= static_cast<double>(m);
  mean_y /= static_cast<double>(m);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  auto x = series.phi.begin();
  for (auto y = series.scores.begin(); y != series.scores.end(); ++x, ++y) {
    const double dx = x->second - mean_x;
    const double dy = y->second - mean_y;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (!std::isfinite(sxy) || !std::isfinite(sxx) || !std::isfinite(syy)) {
    throw ValidationError("correlation inputs must be finite");
  }
  if (sxx == 0.0 || syy == 0.0) throw ValidationError("correlation is undefined for a zero-variance series");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

}  // namespace wfshap
