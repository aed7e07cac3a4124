#include "finchart/http_backend.hpp"

#include <cstdlib>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#include <nlohmann/json.hpp>

#include "finchart/errors.hpp"

namespace finchart {

std::string chat_request_body(const AnnotationRequest& request, const HttpBackendConfig& config) {
  nlohmann::json messages = nlohmann::json::array();
  if (!request.system_prompt.empty()) {
    messages.push_back({{"role", "system"}, {"content", request.system_prompt}});
  }
  messages.push_back({{"role", "user"}, {"content", request.user_content}});
  const nlohmann::json body = {
      {"model", config.model},
      {"temperature", config.temperature},
      {"messages", messages},
  };
  return body.dump();
}

std::string parse_chat_response(const std::string& body) {
  nlohmann::json parsed;
  try {
    parsed = nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("chat response is not valid JSON: ") + e.what());
  }
  const auto choices = parsed.find("choices");
  if (choices == parsed.end() || !choices->is_array() || choices->empty())
    throw Error("chat response has no choices");
  const auto& first = (*choices)[0];
  if (!first.contains("message") || !first["message"].contains("content") ||
      !first["message"]["content"].is_string())
    throw Error("chat response choice has no message content");
  std::string content = first["message"]["content"].get<std::string>();
  if (content.empty()) throw EmptyCompletion("chat response content is empty");
  return content;
}

HttpBackend::HttpBackend(HttpBackendConfig config) : config_(std::move(config)) {
  const std::string& url = config_.endpoint;
  const std::size_t scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ConfigInvalid("backend.endpoint", "missing scheme");
  const std::size_t path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) {
    host_ = url;
    path_ = "/";
  } else {
    host_ = url.substr(0, path_start);
    path_ = url.substr(path_start);
  }
}

std::string HttpBackend::id() const { return "http:" + config_.model; }

std::string HttpBackend::complete(const AnnotationRequest& request) {
  const char* key = std::getenv(config_.api_key_env.c_str());
  if (key == nullptr || *key == '\0') {
    throw AuthFailure("environment variable " + config_.api_key_env + " is not set");
  }

  httplib::Client client(host_);
  client.set_connection_timeout(config_.timeout_sec, 0);
  client.set_read_timeout(config_.timeout_sec, 0);
  client.set_write_timeout(config_.timeout_sec, 0);
  client.set_bearer_token_auth(key);

  const auto result =
      client.Post(path_, chat_request_body(request, config_), "application/json");
  if (!result) {
    throw TransientBackendError("transport failure: " + httplib::to_string(result.error()));
  }
  const int status = result->status;
  if (status == 401 || status == 403) {
    throw AuthFailure("backend rejected the credential (HTTP " + std::to_string(status) + ")");
  }
  if (status == 408 || status == 429 || status >= 500) {
    throw TransientBackendError("backend returned HTTP " + std::to_string(status));
  }
  if (status != 200) {
    throw Error("backend returned HTTP " + std::to_string(status));
  }
  return parse_chat_response(result->body);
}

}  // namespace finchart
