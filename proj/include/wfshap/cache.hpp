#pragma once

#include <compare>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>

#include "wfshap/errors.hpp"

namespace wfshap {

struct CacheKey {
  Mask mask = 0;
  std::string fingerprint;  ///< task_fingerprint of the evaluated task list

  /// "<mask>-<fingerprint>"
  std::string file_name() const { return std::to_string(mask) + "-" + fingerprint; }

  friend auto operator<=>(const CacheKey&, const CacheKey&) = default;
};

/// Stores serialized record sets per (coalition, task set).
///
/// Entries are opaque byte strings returned exactly as stored. With a
/// directory, every entry is also persisted as one file named by
/// CacheKey::file_name() and picked up again by later runs. Lookups and
/// stores may come from several threads; a repeated store of the same key
/// replaces the previous value.
class CoalitionCache {
 public:
  /// Memory only.
  CoalitionCache() = default;
  explicit CoalitionCache(std::filesystem::path directory);

  std::optional<std::string> lookup(const CacheKey& key) const;
  void store(const CacheKey& key, std::string bytes);
  /// Drops one entry from memory and disk. Other keys are untouched.
  bool erase(const CacheKey& key);

  std::size_t size() const;
  const std::optional<std::filesystem::path>& directory() const noexcept { return directory_; }

 private:
  std::optional<std::filesystem::path> directory_;
  mutable std::shared_mutex mutex_;
  mutable std::map<CacheKey, std::string> entries_;
};

}  // namespace wfshap
