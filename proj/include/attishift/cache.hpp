#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>

#include <json.hpp>

namespace attishift {

/// Persistent key-value store for backend responses.
///
/// The file is JSON-lines, one `{"k": key, "v": value}` object per line, and
/// is only ever appended to. A torn final line left by an interrupted run is
/// skipped on load, so a crashed run can always be resumed. Later lines win
/// on duplicate keys. Readers and writers may be concurrent.
class ResponseCache {
 public:
  // In-memory cache, nothing persisted.
  ResponseCache() = default;
  explicit ResponseCache(std::filesystem::path path);

  ResponseCache(const ResponseCache&) = delete;
  ResponseCache& operator=(const ResponseCache&) = delete;

  std::optional<nlohmann::json> get(const std::string& key) const;
  void put(const std::string& key, const nlohmann::json& value);

  std::size_t size() const;
  std::size_t skipped_lines() const noexcept { return skipped_lines_; }
  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
  mutable std::shared_mutex mutex_;
  std::unordered_map<std::string, nlohmann::json> entries_;
  std::ofstream out_;
  std::size_t skipped_lines_ = 0;
};

}  // namespace attishift
