#include "wfshap/cache.hpp"

#include <charconv>
#include <mutex>

#include "wfshap/game_io.hpp"

namespace wfshap {

namespace {

std::optional<CacheKey> key_from_file_name(const std::string& name) {
  const auto dash = name.find('-');
  if (dash == std::string::npos || dash == 0 || dash + 1 == name.size()) return std::nullopt;
  CacheKey key;
  auto [ptr, ec] = std::from_chars(name.data(), name.data() + dash, key.mask);
  if (ec != std::errc{} || ptr != name.data() + dash) return std::nullopt;
  key.fingerprint = name.substr(dash + 1);
  if (key.fingerprint.find_first_not_of("0123456789abcdef") != std::string::npos) return std::nullopt;
  return key;
}

}  // namespace

CoalitionCache::CoalitionCache(std::filesystem::path directory) : directory_(std::move(directory)) {
  std::error_code ec;
  std::filesystem::create_directories(*directory_, ec);
  if (ec) throw IoError("cannot create cache directory '" + directory_->string() + "': " + ec.message());
  for (const auto& entry : std::filesystem::directory_iterator(*directory_)) {
    if (!entry.is_regular_file()) continue;
    auto key = key_from_file_name(entry.path().filename().string());
    if (!key) continue;
    entries_.emplace(std::move(*key), read_text_file(entry.path()));
  }
}

std::optional<std::string> CoalitionCache::lookup(const CacheKey& key) const {
  std::shared_lock lock(mutex_);
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void CoalitionCache::store(const CacheKey& key, std::string bytes) {
  if (key.fingerprint.empty()) throw ValidationError("cache key needs a task fingerprint");
  std::unique_lock lock(mutex_);
  if (directory_) write_text_file(*directory_ / key.file_name(), bytes);
  entries_.insert_or_assign(key, std::move(bytes));
}

bool CoalitionCache::erase(const CacheKey& key) {
  std::unique_lock lock(mutex_);
  const bool had = entries_.erase(key) > 0;
  if (directory_) {
    std::error_code ec;
    std::filesystem::remove(*directory_ / key.file_name(), ec);
  }
  return had;
}

std::size_t CoalitionCache::size() const {
  std::shared_lock lock(mutex_);
  return entries_.size();
}

}  // namespace wfshap
