#pragma once

#include <string>

#include <json.hpp>

#include "attishift/error.hpp"

namespace attishift::http {

// Environment variable holding the bearer token for remote backends.
inline constexpr const char* kApiKeyEnv = "ATTISHIFT_API_KEY";

struct RequestOptions {
  double timeout_s = 60.0;
  int retries = 2;  // additional attempts after the first
  int backoff_ms = 200;
};

struct Endpoint {
  std::string origin;     // scheme://host[:port]
  std::string base_path;  // path prefix without trailing slash, may be empty
};

Endpoint parse_endpoint(const std::string& url);

class TransportError : public Error {
 public:
  TransportError(const std::string& what, int attempts)
      : Error(what), attempts_(attempts) {}
  int attempts() const noexcept { return attempts_; }

 private:
  int attempts_;
};

// POSTs a JSON body to origin + base_path + path and parses the JSON reply.
// Connection failures, 429 and 5xx replies are retried; other non-2xx
// replies fail immediately. Throws TransportError carrying the number of
// requests actually sent.
nlohmann::json post_json(const Endpoint& endpoint, const std::string& path,
                         const nlohmann::json& body, const RequestOptions& options);

// Form-encoded POST returning the raw JSON reply (LanguageTool-style APIs).
nlohmann::json post_form(const Endpoint& endpoint, const std::string& path,
                         const std::string& form_body, const RequestOptions& options);

std::string url_encode(const std::string& s);

}  // namespace attishift::http
