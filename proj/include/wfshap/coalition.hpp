#pragma once

#include <bit>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wfshap/errors.hpp"

namespace wfshap {

/// Largest player set that may be enumerated exhaustively (2^20 coalitions).
inline constexpr std::size_t kMaxExactComponents = 20;
/// Largest player set a coalition mask can address.
inline constexpr std::size_t kMaxComponents = 64;

struct ComponentId {
  std::size_t index = 0;
  std::string label;

  friend bool operator==(const ComponentId&, const ComponentId&) = default;
};

/// Ordered, label-unique set of workflow components (the players).
///
/// Labels are non-empty, contain no '+', and are not purely numeric, so a
/// coalition key in a file is never ambiguous between its decimal-mask form
/// and its label form.
class ComponentSet {
 public:
  ComponentSet() = default;
  explicit ComponentSet(std::vector<std::string> labels);

  std::size_t size() const noexcept { return labels_.size(); }
  bool empty() const noexcept { return labels_.empty(); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const std::string& label(std::size_t index) const { return labels_.at(index); }

  std::optional<std::size_t> find(std::string_view label) const;
  /// Throws ValidationError naming the label when it is not a member.
  ComponentId at(std::string_view label) const;
  ComponentId id(std::size_t index) const;
  bool contains(const ComponentId& component) const;

  friend bool operator==(const ComponentSet&, const ComponentSet&) = default;

 private:
  std::vector<std::string> labels_;
};

/// Subset of a component set, stored as a bitmask where bit i is component i.
class Coalition {
 public:
  constexpr Coalition() = default;
  /// Throws ValidationError when a bit at or above `width` is set.
  Coalition(Mask mask, std::size_t width);

  static Coalition empty(std::size_t width) { return {0, width}; }
  static Coalition grand(std::size_t width);

  constexpr Mask mask() const noexcept { return mask_; }
  constexpr std::size_t width() const noexcept { return width_; }
  constexpr bool contains(std::size_t index) const noexcept {
    return index < width_ && ((mask_ >> index) & 1U) != 0;
  }
  constexpr std::size_t size() const noexcept { return static_cast<std::size_t>(std::popcount(mask_)); }
  constexpr bool is_empty() const noexcept { return mask_ == 0; }

  Coalition with(std::size_t index) const;
  Coalition without(std::size_t index) const;
  bool is_subset_of(const Coalition& other) const noexcept { return (mask_ & ~other.mask_) == 0; }
  std::vector<std::size_t> members() const;

  friend constexpr bool operator==(const Coalition&, const Coalition&) = default;

 private:
  Mask mask_ = 0;
  std::size_t width_ = 0;
};

constexpr Mask bit(std::size_t index) noexcept { return Mask{1} << index; }

/// Mask with the low `width` bits set.
constexpr Mask full_mask(std::size_t width) noexcept {
  return width >= 64 ? ~Mask{0} : (Mask{1} << width) - 1;
}

Coalition make_coalition(std::span<const ComponentId> members, const ComponentSet& universe);
Coalition make_coalition(std::span<const std::string> labels, const ComponentSet& universe);

/// All 2^n coalitions in ascending mask order. Rejects n above kMaxExactComponents.
std::vector<Coalition> enumerate_coalitions(std::size_t n);

/// Labels of the members, in component order.
std::vector<std::string> member_labels(const Coalition& coalition, const ComponentSet& universe);

/// "+"-joined member labels in component order; the empty coalition is "".
std::string coalition_key(const Coalition& coalition, const ComponentSet& universe);

/// Accepts a decimal mask ("5") or a "+"-joined label list in any order.
Coalition parse_coalition_key(std::string_view key, const ComponentSet& universe);

/// Short display name: "{}" for the empty coalition, otherwise "(planning,action)".
std::string coalition_display(const Coalition& coalition, const ComponentSet& universe);

}  // namespace wfshap
