#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "json.hpp"
#include "wfshap/errors.hpp"

namespace wfshap::detail {

using Json = nlohmann::ordered_json;

/// Parses a document, rejecting any object that repeats a key.
inline Json parse_strict(std::string_view text, std::string_view what) {
  std::vector<std::unordered_set<std::string>> keys;
  std::optional<std::string> duplicate;
  auto callback = [&](int /*depth*/, Json::parse_event_t event, Json& parsed) {
    switch (event) {
      case Json::parse_event_t::object_start:
        keys.emplace_back();
        break;
      case Json::parse_event_t::object_end:
        if (!keys.empty()) keys.pop_back();
        break;
      case Json::parse_event_t::key: {
        auto key = parsed.get<std::string>();
        if (!keys.empty() && !keys.back().insert(key).second && !duplicate) duplicate = key;
        break;
      }
      default:
        break;
    }
    return true;
  };
  Json doc;
  try {
    doc = Json::parse(text.begin(), text.end(), callback);
  } catch (const Json::parse_error& e) {
    throw ValidationError(std::string(what) + ": " + e.what());
  }
  if (duplicate) {
    throw ValidationError(std::string(what) + ": duplicate key '" + *duplicate + "'");
  }
  return doc;
}

/// Non-finite values have no JSON spelling; they travel as null.
inline Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

inline double to_double(const Json& j, std::string_view field) {
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  if (!j.is_number()) throw ValidationError("field '" + std::string(field) + "' must be a number");
  return j.get<double>();
}

inline const Json& require(const Json& obj, const char* key, std::string_view what) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw ValidationError(std::string(what) + ": missing required member '" + key + "'");
  }
  return obj.at(key);
}

inline std::vector<std::string> string_list(const Json& j, std::string_view field) {
  if (!j.is_array()) throw ValidationError("field '" + std::string(field) + "' must be an array of strings");
  std::vector<std::string> out;
  for (const auto& item : j) {
    if (!item.is_string()) throw ValidationError("field '" + std::string(field) + "' must contain only strings");
    out.push_back(item.get<std::string>());
  }
  return out;
}

}  // namespace wfshap::detail
