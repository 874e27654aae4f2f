#include "wfshap/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "json_util.hpp"

namespace wfshap {

using detail::Json;

namespace {

std::string fixed3(double v) {
  if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  if (std::string_view(buf) == "-0.000") return "0.000";
  return buf;
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string csv_number(double v) { return std::isfinite(v) ? format_double(v) : std::string(); }

/// Left-aligned first column, right-aligned others.
std::string render_table(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width;
  for (const auto& row : rows) {
    if (width.size() < row.size()) width.resize(row.size(), 0);
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  std::string out;
  for (const auto& row : rows) {
    std::string line;
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c == 0) {
        line += row[c] + std::string(width[c] - row[c].size(), ' ');
      } else {
        line += "  " + std::string(width[c] - row[c].size(), ' ') + row[c];
      }
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + "\n";
  }
  return out;
}

// text

std::string text_of(const AttributionResult& r) {
  std::vector<std::vector<std::string>> rows;
  const bool se = r.std_error.has_value();
  rows.push_back(se ? std::vector<std::string>{"component", "phi", "std_error"}
                    : std::vector<std::string>{"component", "phi"});
  for (std::size_t i = 0; i < r.phi.size(); ++i) {
    std::vector<std::string> row{r.labels[i], fixed3(r.phi[i])};
    if (se) row.push_back(fixed3((*r.std_error)[i]));
    rows.push_back(std::move(row));
  }
  std::string out = "method: " + std::string(method_name(r.method));
  if (r.method == Method::kPermutationMc) out += " (" + std::to_string(r.samples) + " samples)";
  if (r.seed) out += ", seed " + std::to_string(*r.seed);
  out += "\n" + render_table(rows);
  out += render_table({{"sum of phi", fixed3(r.phi_sum())},
                       {"v(N) - v({})", fixed3(r.grand_value - r.empty_value)},
                       {"efficiency residual", fixed3(r.efficiency_residual())}});
  return out;
}

std::string text_of(const SynergyMatrix& m) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header{""};
  header.insert(header.end(), m.labels.begin(), m.labels.end());
  rows.push_back(std::move(header));
  for (std::size_t i = 0; i < m.size(); ++i) {
    std::vector<std::string> row{m.labels[i]};
    for (std::size_t j = 0; j < m.size(); ++j) row.push_back(fixed3(m.at(i, j)));
    rows.push_back(std::move(row));
  }
  return "synergy\n" + render_table(rows);
}

std::string text_of(const WorkflowConfiguration& c) {
  std::vector<std::vector<std::string>> rows{{"component", "candidate", "phi"}};
  for (const auto& choice : c.assignment) rows.push_back({choice.component.label, choice.candidate, fixed3(choice.phi)});
  std::string out = "optimal configuration\n" + render_table(rows);
  if (!c.note.empty()) out += "note: " + c.note + "\n";
  return out;
}

std::string text_of(const ConsistencyReport& r) {
  std::vector<std::vector<std::string>> rows{{"component", "consistent", "pairs", "rate"}};
  for (const auto& e : r.components) {
    rows.push_back({e.component, std::to_string(e.pairs.consistent), std::to_string(e.pairs.total),
                    fixed3(e.pairs.rate())});
  }
  if (r.components.size() > 1) {
    rows.push_back({"pooled", std::to_string(r.pooled.consistent), std::to_string(r.pooled.total),
                    fixed3(r.pooled.rate())});
  }
  return "consistency\n" + render_table(rows);
}

std::string text_of(const CoalitionSeries& s) {
  std::vector<std::vector<std::string>> rows{{"coalition", "value"}};
  for (const auto& [label, value] : s.points) rows.push_back({label, fixed3(value)});
  return (s.title.empty() ? std::string("series") : s.title) + "\n" + render_table(rows);
}

// csv

std::string csv_of(const AttributionResult& r) {
  std::string out = "component,phi,std_error\n";
  for (std::size_t i = 0; i < r.phi.size(); ++i) {
    out += csv_field(r.labels[i]) + "," + csv_number(r.phi[i]) + ",";
    if (r.std_error) out += csv_number((*r.std_error)[i]);
    out += "\n";
  }
  return out;
}

std::string csv_of(const SynergyMatrix& m) {
  std::string out = "component";
  for (const auto& l : m.labels) out += "," + csv_field(l);
  out += "\n";
  for (std::size_t i = 0; i < m.size(); ++i) {
    out += csv_field(m.labels[i]);
    for (std::size_t j = 0; j < m.size(); ++j) out += "," + csv_number(m.at(i, j));
    out += "\n";
  }
  return out;
}

std::string csv_of(const WorkflowConfiguration& c) {
  std::string out = "component,candidate,phi\n";
  for (const auto& choice : c.assignment) {
    out += csv_field(choice.component.label) + "," + csv_field(choice.candidate) + "," + csv_number(choice.phi) + "\n";
  }
  return out;
}

std::string csv_of(const ConsistencyReport& r) {
  std::string out = "component,consistent,pairs,rate\n";
  auto line = [&](const std::string& name, const PairCount& p) {
    out += csv_field(name) + "," + std::to_string(p.consistent) + "," + std::to_string(p.total) + "," +
           csv_number(p.rate()) + "\n";
  };
  for (const auto& e : r.components) line(e.component, e.pairs);
  if (r.components.size() > 1) line("pooled", r.pooled);
  return out;
}

std::string csv_of(const CoalitionSeries& s) {
  std::string out = "coalition,value\n";
  for (const auto& [label, value] : s.points) out += csv_field(label) + "," + csv_number(value) + "\n";
  return out;
}

// json

Json json_of(const AttributionResult& r) {
  Json j = Json::object();
  j["kind"] = "attribution";
  j["method"] = std::string(method_name(r.method));
  Json phi = Json::object();
  for (std::size_t i = 0; i < r.phi.size(); ++i) phi[r.labels[i]] = detail::number(r.phi[i]);
  j["phi"] = std::move(phi);
  if (r.std_error) {
    Json se = Json::object();
    for (std::size_t i = 0; i < r.phi.size(); ++i) se[r.labels[i]] = detail::number((*r.std_error)[i]);
    j["std_error"] = std::move(se);
  }
  j["empty_value"] = detail::number(r.empty_value);
  j["grand_value"] = detail::number(r.grand_value);
  j["efficiency_residual"] = detail::number(r.efficiency_residual());
  j["samples"] = r.samples;
  if (r.seed) j["seed"] = *r.seed;
  return j;
}

Json json_of(const SynergyMatrix& m) {
  Json j = Json::object();
  j["kind"] = "synergy";
  j["components"] = m.labels;
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.size(); ++i) {
    Json row = Json::array();
    for (std::size_t k = 0; k < m.size(); ++k) row.push_back(detail::number(m.at(i, k)));
    rows.push_back(std::move(row));
  }
  j["matrix"] = std::move(rows);
  return j;
}

Json json_of(const WorkflowConfiguration& c) {
  Json j = Json::object();
  j["kind"] = "configuration";
  Json assignment = Json::object();
  Json phi = Json::object();
  for (const auto& choice : c.assignment) {
    assignment[choice.component.label] = choice.candidate;
    phi[choice.component.label] = detail::number(choice.phi);
  }
  j["assignment"] = std::move(assignment);
  j["phi"] = std::move(phi);
  if (!c.note.empty()) j["note"] = c.note;
  return j;
}

Json json_of(const ConsistencyReport& r) {
  auto pairs = [](const PairCount& p) {
    Json j = Json::object();
    j["consistent"] = p.consistent;
    j["pairs"] = p.total;
    j["rate"] = detail::number(p.rate());
    return j;
  };
  Json j = Json::object();
  j["kind"] = "consistency";
  Json components = Json::object();
  for (const auto& e : r.components) components[e.component] = pairs(e.pairs);
  j["components"] = std::move(components);
  j["pooled"] = pairs(r.pooled);
  return j;
}

Json json_of(const CoalitionSeries& s) {
  Json j = Json::object();
  j["kind"] = "series";
  j["title"] = s.title;
  Json points = Json::array();
  for (const auto& [label, value] : s.points) points.push_back(Json::array({label, detail::number(value)}));
  j["points"] = std::move(points);
  return j;
}

// parsing

std::size_t count_field(const Json& j, const char* key, std::string_view what) {
  const auto& v = detail::require(j, key, what);
  if (!v.is_number_unsigned()) throw ValidationError(std::string(what) + ": '" + key + "' must be a count");
  return v.get<std::size_t>();
}

AttributionResult parse_attribution(const Json& j) {
  AttributionResult r;
  r.method = parse_method(detail::require(j, "method", "attribution").get<std::string>());
  const auto& phi = detail::require(j, "phi", "attribution");
  if (!phi.is_object()) throw ValidationError("attribution: 'phi' must be an object");
  for (const auto& [label, value] : phi.items()) {
    r.labels.push_back(label);
    r.phi.push_back(detail::to_double(value, "phi"));
  }
  if (j.contains("std_error")) {
    const auto& se = j.at("std_error");
    std::vector<double> values;
    for (const auto& label : r.labels) values.push_back(detail::to_double(detail::require(se, label.c_str(), "std_error"), "std_error"));
    r.std_error = std::move(values);
  }
  r.empty_value = detail::to_double(detail::require(j, "empty_value", "attribution"), "empty_value");
  r.grand_value = detail::to_double(detail::require(j, "grand_value", "attribution"), "grand_value");
  r.samples = count_field(j, "samples", "attribution");
  if (j.contains("seed")) r.seed = j.at("seed").get<std::uint64_t>();
  return r;
}

SynergyMatrix parse_synergy(const Json& j) {
  SynergyMatrix m;
  m.labels = detail::string_list(detail::require(j, "components", "synergy"), "components");
  const auto& rows = detail::require(j, "matrix", "synergy");
  if (!rows.is_array() || rows.size() != m.labels.size()) throw ValidationError("synergy: matrix has the wrong shape");
  for (const auto& row : rows) {
    if (!row.is_array() || row.size() != m.labels.size()) throw ValidationError("synergy: matrix has the wrong shape");
    for (const auto& v : row) m.entries.push_back(detail::to_double(v, "matrix"));
  }
  return m;
}

WorkflowConfiguration parse_configuration(const Json& j) {
  WorkflowConfiguration c;
  const auto& assignment = detail::require(j, "assignment", "configuration");
  const auto& phi = detail::require(j, "phi", "configuration");
  std::size_t index = 0;
  for (const auto& [label, candidate] : assignment.items()) {
    c.assignment.push_back({ComponentId{index++, label}, candidate.get<std::string>(),
                            detail::to_double(detail::require(phi, label.c_str(), "configuration phi"), "phi")});
  }
  if (j.contains("note")) c.note = j.at("note").get<std::string>();
  return c;
}

ConsistencyReport parse_consistency(const Json& j) {
  auto pairs = [](const Json& p) {
    return PairCount{count_field(p, "consistent", "consistency"), count_field(p, "pairs", "consistency")};
  };
  ConsistencyReport r;
  for (const auto& [label, p] : detail::require(j, "components", "consistency").items()) {
    r.components.push_back({label, pairs(p)});
  }
  r.pooled = pairs(detail::require(j, "pooled", "consistency"));
  return r;
}

CoalitionSeries parse_series(const Json& j) {
  CoalitionSeries s;
  if (j.contains("title")) s.title = j.at("title").get<std::string>();
  for (const auto& p : detail::require(j, "points", "series")) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_string()) throw ValidationError("series: malformed point");
    s.points.emplace_back(p[0].get<std::string>(), detail::to_double(p[1], "value"));
  }
  return s;
}

ReportItem parse_item(const Json& j) {
  if (!j.is_object()) throw ValidationError("report item must be an object");
  const auto kind = detail::require(j, "kind", "report item").get<std::string>();
  if (kind == "attribution") return parse_attribution(j);
  if (kind == "synergy") return parse_synergy(j);
  if (kind == "configuration") return parse_configuration(j);
  if (kind == "consistency") return parse_consistency(j);
  if (kind == "series") return parse_series(j);
  throw ValidationError("unknown report kind '" + kind + "'");
}

}  // namespace

Format parse_format(std::string_view name) {
  if (name == "text" || name == "table_text") return Format::kTableText;
  if (name == "csv") return Format::kCsv;
  if (name == "json" || name == "structured_object") return Format::kStructuredObject;
  throw ValidationError("unknown report format '" + std::string(name) + "' (expected text, csv or json)");
}

std::string_view format_name(Format format) {
  switch (format) {
    case Format::kTableText:
      return "text";
    case Format::kCsv:
      return "csv";
    case Format::kStructuredObject:
      return "json";
  }
  return "text";
}

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

CoalitionSeries coalition_sweep(const GameTable& game) {
  game.require_complete();
  CoalitionSeries s;
  s.title = game.label().empty() ? "coalition values" : game.label();
  for (const auto& c : enumerate_coalitions(game.size())) {
    auto key = coalition_key(c, game.components());
    s.points.emplace_back(key.empty() ? "{}" : key, game.value(c));
  }
  return s;
}

std::string emit_report(std::span<const ReportItem> items, Format format) {
  switch (format) {
    case Format::kStructuredObject: {
      if (items.size() == 1) return std::visit([](const auto& x) { return json_of(x); }, items[0]).dump(2) + "\n";
      Json all = Json::array();
      for (const auto& item : items) all.push_back(std::visit([](const auto& x) { return json_of(x); }, item));
      return all.dump(2) + "\n";
    }
    case Format::kCsv:
    case Format::kTableText: {
      std::string out;
      for (const auto& item : items) {
        if (!out.empty()) out += "\n";
        out += std::visit(
            [format](const auto& x) { return format == Format::kCsv ? csv_of(x) : text_of(x); }, item);
      }
      return out;
    }
  }
  throw ValidationError("unknown report format");
}

std::string emit_report(const ReportItem& item, Format format) { return emit_report(std::span(&item, 1), format); }

std::vector<ReportItem> parse_report_json(std::string_view text) {
  const Json doc = detail::parse_strict(text, "report");
  std::vector<ReportItem> out;
  try {
    if (doc.is_array()) {
      for (const auto& item : doc) out.push_back(parse_item(item));
    } else {
      out.push_back(parse_item(doc));
    }
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("report: ") + e.what());
  }
  return out;
}

}  // namespace wfshap
