#include "attishift/http.hpp"

#include <cctype>
#include <chrono>
#include <cstdlib>
#include <thread>

#include <httplib.h>

namespace attishift::http {

Endpoint parse_endpoint(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("endpoint URL lacks a scheme: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  Endpoint ep;
  if (path_start == std::string::npos) {
    ep.origin = url;
  } else {
    ep.origin = url.substr(0, path_start);
    ep.base_path = url.substr(path_start);
    while (!ep.base_path.empty() && ep.base_path.back() == '/') ep.base_path.pop_back();
  }
  return ep;
}

namespace {

nlohmann::json send(const Endpoint& endpoint, const std::string& path, const std::string& body,
                    const std::string& content_type, const RequestOptions& options) {
  httplib::Client client(endpoint.origin);
  const auto secs = static_cast<time_t>(options.timeout_s);
  const auto usecs = static_cast<time_t>((options.timeout_s - static_cast<double>(secs)) * 1e6);
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);

  httplib::Headers headers;
  if (const char* key = std::getenv(kApiKeyEnv); key != nullptr && *key != '\0')
    headers.emplace("Authorization", std::string("Bearer ") + key);

  const std::string full_path = endpoint.base_path + path;
  const int max_attempts = std::max(1, options.retries + 1);
  std::string last_error;
  int attempts = 0;
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    if (attempt > 0 && options.backoff_ms > 0)
      std::this_thread::sleep_for(std::chrono::milliseconds(options.backoff_ms * attempt));
    ++attempts;
    auto res = client.Post(full_path, headers, body, content_type);
    if (!res) {
      last_error = "transport failure: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 429 || res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status < 200 || res->status >= 300)
      throw TransportError("HTTP " + std::to_string(res->status) + ": " + res->body, attempts);
    auto parsed = nlohmann::json::parse(res->body, nullptr, false);
    if (parsed.is_discarded()) throw TransportError("reply is not JSON", attempts);
    return parsed;
  }
  throw TransportError(endpoint.origin + full_path + ": " + last_error, attempts);
}

}  // namespace

nlohmann::json post_json(const Endpoint& endpoint, const std::string& path,
                         const nlohmann::json& body, const RequestOptions& options) {
  return send(endpoint, path, body.dump(), "application/json", options);
}

nlohmann::json post_form(const Endpoint& endpoint, const std::string& path,
                         const std::string& form_body, const RequestOptions& options) {
  return send(endpoint, path, form_body, "application/x-www-form-urlencoded", options);
}

std::string url_encode(const std::string& s) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : s) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out.push_back(static_cast<char>(c));
    } else {
      out.push_back('%');
      out.push_back(kHex[c >> 4]);
      out.push_back(kHex[c & 0xF]);
    }
  }
  return out;
}

}  // namespace attishift::http
