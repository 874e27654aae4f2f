#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "wfshap/game.hpp"

namespace wfshap {

/// Parses a game table document:
///   { "label": str?, "components": [str, ...], "task_count": int?,
///     "values": { "<coalition-key>": number, ... } }
/// Keys may be decimal masks or "+"-joined labels. Two keys naming the same
/// coalition, or a missing "components"/"values" member, are ValidationErrors.
/// Coalitions absent from "values" are allowed; validate_game reports them.
GameTable parse_game_json(std::string_view text);

/// Writes label-form keys in ascending mask order with full float precision.
std::string format_game_json(const GameTable& table);

GameTable read_game_file(const std::filesystem::path& path);
void write_game_file(const GameTable& table, const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
/// Writes through a temporary sibling and renames, so readers never see a partial file.
void write_text_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace wfshap
