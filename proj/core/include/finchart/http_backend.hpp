#pragma once

#include <string>

#include "finchart/backend.hpp"

namespace finchart {

struct HttpBackendConfig {
  /// Full chat-completions URL, e.g. "https://api.example.com/v1/chat/completions".
  std::string endpoint;
  std::string model = "gpt-3.5-turbo";
  double temperature = 0.7;
  /// Name of the environment variable holding the bearer token. The value is
  /// read per request and never logged or persisted.
  std::string api_key_env = "FINCHART_API_KEY";
  int timeout_sec = 120;
};

/// JSON body for one request, chat-completions schema. Exposed for tests.
std::string chat_request_body(const AnnotationRequest& request, const HttpBackendConfig& config);

/// Extracts choices[0].message.content; throws Error / EmptyCompletion.
std::string parse_chat_response(const std::string& body);

/// Chat-completion HTTP backend. Each call opens its own connection, so the
/// handle is freely shareable across batch workers. Maps 401/403 to
/// AuthFailure, 408/429/5xx and transport faults to TransientBackendError.
class HttpBackend : public Backend {
 public:
  explicit HttpBackend(HttpBackendConfig config);

  std::string id() const override;
  std::string complete(const AnnotationRequest& request) override;

 private:
  HttpBackendConfig config_;
  std::string host_;    // scheme://host[:port]
  std::string path_;    // /v1/chat/completions
};

}  // namespace finchart
