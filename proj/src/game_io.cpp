#include "wfshap/game_io.hpp"

#include <fstream>
#include <sstream>

#include "json_util.hpp"

namespace wfshap {

using detail::Json;

GameTable parse_game_json(std::string_view text) {
  const Json doc = detail::parse_strict(text, "game table");
  if (!doc.is_object()) throw ValidationError("game table: document must be an object");

  ComponentSet components(detail::string_list(detail::require(doc, "components", "game table"), "components"));
  const Json& values = detail::require(doc, "values", "game table");
  if (!values.is_object()) throw ValidationError("game table: 'values' must be an object");

  std::optional<std::size_t> task_count;
  if (doc.contains("task_count") && !doc.at("task_count").is_null()) {
    const auto& tc = doc.at("task_count");
    if (!tc.is_number_integer() || tc.get<long long>() <= 0) {
      throw ValidationError("game table: 'task_count' must be a positive integer");
    }
    task_count = tc.get<std::size_t>();
  }
  std::string label;
  if (doc.contains("label") && doc.at("label").is_string()) label = doc.at("label").get<std::string>();

  if (components.size() > kMaxExactComponents) {
    throw ValidationError("game table: " + std::to_string(components.size()) +
                          " components exceeds the exact-enumeration limit of " +
                          std::to_string(kMaxExactComponents));
  }

  std::vector<GameTable::Entry> entries;
  entries.reserve(values.size());
  std::vector<std::optional<std::string>> key_of(std::size_t{1} << components.size());
  for (const auto& [key, value] : values.items()) {
    const auto coalition = parse_coalition_key(key, components);
    auto& previous = key_of[coalition.mask()];
    if (previous) {
      throw ValidationError("game table: keys '" + *previous + "' and '" + key +
                            "' name the same coalition (mask " + std::to_string(coalition.mask()) + ")");
    }
    previous = key;
    entries.push_back({coalition, detail::to_double(value, key)});
  }
  return GameTable(std::move(components), entries, task_count, std::move(label));
}

std::string format_game_json(const GameTable& table) {
  Json doc = Json::object();
  if (!table.label().empty()) doc["label"] = table.label();
  doc["components"] = table.components().labels();
  if (table.task_count()) doc["task_count"] = *table.task_count();
  Json values = Json::object();
  const auto n = table.size();
  for (Mask m = 0; m < table.coalition_count(); ++m) {
    if (!table.contains(m)) continue;
    values[coalition_key(Coalition(m, n), table.components())] = detail::number(table.dense()[m]);
  }
  doc["values"] = std::move(values);
  return doc.dump(2) + "\n";
}

GameTable read_game_file(const std::filesystem::path& path) {
  return parse_game_json(read_text_file(path));
}

void write_game_file(const GameTable& table, const std::filesystem::path& path) {
  write_text_file(path, format_game_json(table));
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("failed reading '" + path.string() + "'");
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw IoError("failed writing '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move '" + tmp.string() + "' to '" + path.string() + "': " + ec.message());
}

}  // namespace wfshap
