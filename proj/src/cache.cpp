#include "attishift/cache.hpp"

#include <mutex>

#include "attishift/error.hpp"

namespace attishift {

ResponseCache::ResponseCache(std::filesystem::path path) : path_(std::move(path)) {
  if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
  bool needs_newline = false;
  if (std::ifstream in{path_}) {
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      auto parsed = nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false);
      if (parsed.is_discarded() || !parsed.is_object() || !parsed.contains("k") ||
          !parsed["k"].is_string() || !parsed.contains("v")) {
        ++skipped_lines_;
        continue;
      }
      entries_[parsed["k"].get<std::string>()] = std::move(parsed["v"]);
    }
    in.clear();
    in.seekg(0, std::ios::end);
    if (in.tellg() > 0) {
      in.seekg(-1, std::ios::end);
      needs_newline = in.get() != '\n';
    }
  }
  out_.open(path_, std::ios::app);
  if (!out_) throw ConfigError("cannot open cache file " + path_.string());
  // Terminate a torn trailing record so the next append starts cleanly.
  if (needs_newline) out_ << '\n';
}

std::optional<nlohmann::json> ResponseCache::get(const std::string& key) const {
  std::shared_lock lock(mutex_);
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void ResponseCache::put(const std::string& key, const nlohmann::json& value) {
  std::unique_lock lock(mutex_);
  entries_[key] = value;
  if (out_.is_open()) {
    out_ << nlohmann::json{{"k", key}, {"v", value}}.dump() << '\n';
    out_.flush();
  }
}

std::size_t ResponseCache::size() const {
  std::shared_lock lock(mutex_);
  return entries_.size();
}

}  // namespace attishift
