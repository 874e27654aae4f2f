#include "wfshap/coalition.hpp"

#include <algorithm>
#include <charconv>
#include <unordered_set>

namespace wfshap {

namespace {

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

}  // namespace

ComponentSet::ComponentSet(std::vector<std::string> labels) : labels_(std::move(labels)) {
  if (labels_.size() > kMaxComponents) {
    throw ValidationError("component set has " + std::to_string(labels_.size()) +
                          " members; at most " + std::to_string(kMaxComponents) + " are supported");
  }
  std::unordered_set<std::string_view> seen;
  for (const auto& label : labels_) {
    if (label.empty()) throw ValidationError("component labels must be non-empty");
    if (label.find('+') != std::string::npos) {
      throw ValidationError("component label '" + label + "' contains '+'");
    }
    if (all_digits(label)) {
      throw ValidationError("component label '" + label + "' is purely numeric");
    }
    if (!seen.insert(label).second) throw ValidationError("duplicate component label '" + label + "'");
  }
}

std::optional<std::size_t> ComponentSet::find(std::string_view label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - labels_.begin());
}

ComponentId ComponentSet::at(std::string_view label) const {
  auto index = find(label);
  if (!index) throw ValidationError("unknown component '" + std::string(label) + "'");
  return {*index, labels_[*index]};
}

ComponentId ComponentSet::id(std::size_t index) const {
  if (index >= labels_.size()) {
    throw ValidationError("component index " + std::to_string(index) + " out of range for " +
                          std::to_string(labels_.size()) + " components");
  }
  return {index, labels_[index]};
}

bool ComponentSet::contains(const ComponentId& component) const {
  return component.index < labels_.size() && labels_[component.index] == component.label;
}

Coalition::Coalition(Mask mask, std::size_t width) : mask_(mask), width_(width) {
  if (width > kMaxComponents) {
    throw ValidationError("coalition width " + std::to_string(width) + " exceeds " +
                          std::to_string(kMaxComponents));
  }
  if ((mask & ~full_mask(width)) != 0) {
    throw ValidationError("coalition mask " + std::to_string(mask) + " has bits outside width " +
                          std::to_string(width));
  }
}

Coalition Coalition::grand(std::size_t width) { return {full_mask(width), width}; }

Coalition Coalition::with(std::size_t index) const {
  if (index >= width_) throw ValidationError("component index " + std::to_string(index) + " out of range");
  return {mask_ | bit(index), width_};
}

Coalition Coalition::without(std::size_t index) const {
  if (index >= width_) throw ValidationError("component index " + std::to_string(index) + " out of range");
  return {mask_ & ~bit(index), width_};
}

std::vector<std::size_t> Coalition::members() const {
  std::vector<std::size_t> out;
  out.reserve(size());
  for (Mask m = mask_; m != 0; m &= m - 1) out.push_back(static_cast<std::size_t>(std::countr_zero(m)));
  return out;
}

Coalition make_coalition(std::span<const ComponentId> members, const ComponentSet& universe) {
  Mask mask = 0;
  for (const auto& member : members) {
    if (!universe.contains(member)) {
      throw ValidationError("component '" + member.label + "' (index " + std::to_string(member.index) +
                            ") is not in the component set");
    }
    mask |= bit(member.index);
  }
  return {mask, universe.size()};
}

Coalition make_coalition(std::span<const std::string> labels, const ComponentSet& universe) {
  Mask mask = 0;
  for (const auto& label : labels) mask |= bit(universe.at(label).index);
  return {mask, universe.size()};
}

std::vector<Coalition> enumerate_coalitions(std::size_t n) {
  if (n > kMaxExactComponents) {
    throw ValidationError("cannot enumerate 2^" + std::to_string(n) +
                          " coalitions: exact enumeration is limited to " +
                          std::to_string(kMaxExactComponents) + " components");
  }
  const Mask count = Mask{1} << n;
  std::vector<Coalition> out;
  out.reserve(count);
  for (Mask m = 0; m < count; ++m) out.emplace_back(m, n);
  return out;
}

std::vector<std::string> member_labels(const Coalition& coalition, const ComponentSet& universe) {
  if (coalition.width() != universe.size()) {
    throw ValidationError("coalition width does not match component set size");
  }
  std::vector<std::string> out;
  for (auto index : coalition.members()) out.push_back(universe.label(index));
  return out;
}

std::string coalition_key(const Coalition& coalition, const ComponentSet& universe) {
  std::string key;
  for (const auto& label : member_labels(coalition, universe)) {
    if (!key.empty()) key += '+';
    key += label;
  }
  return key;
}

Coalition parse_coalition_key(std::string_view key, const ComponentSet& universe) {
  if (all_digits(key)) {
    Mask mask = 0;
    auto [ptr, ec] = std::from_chars(key.data(), key.data() + key.size(), mask);
    if (ec != std::errc{} || ptr != key.data() + key.size()) {
      throw ValidationError("coalition key '" + std::string(key) + "' is not a valid mask");
    }
    return {mask, universe.size()};
  }
  Mask mask = 0;
  std::size_t start = 0;
  while (start <= key.size() && !key.empty()) {
    auto end = key.find('+', start);
    if (end == std::string_view::npos) end = key.size();
    auto label = key.substr(start, end - start);
    if (label.empty()) throw ValidationError("coalition key '" + std::string(key) + "' has an empty label");
    mask |= bit(universe.at(label).index);
    start = end + 1;
  }
  return {mask, universe.size()};
}

std::string coalition_display(const Coalition& coalition, const ComponentSet& universe) {
  if (coalition.is_empty()) return "{}";
  std::string out = "(";
  bool first = true;
  for (const auto& label : member_labels(coalition, universe)) {
    if (!first) out += ',';
    out += label;
    first = false;
  }
  return out + ")";
}

}  // namespace wfshap
