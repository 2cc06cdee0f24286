#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <cstdlib>

#include <fmt/format.h>

#include "triex/model_client.hpp"

namespace triex {
namespace {

struct UrlParts {
  std::string origin;  // scheme://host[:port]
  std::string path;    // without trailing slash
};

UrlParts split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw TransportError("base_url needs a scheme: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  UrlParts p;
  p.origin = url.substr(0, path_start);
  p.path = path_start == std::string::npos ? "" : url.substr(path_start);
  while (!p.path.empty() && p.path.back() == '/') p.path.pop_back();
  return p;
}

}  // namespace

nlohmann::json HttpBackend::request_body(const ModelEndpoint& endpoint, const std::string& prompt) {
  return nlohmann::json{{"model", endpoint.name},
                        {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
                        {"temperature", endpoint.temperature},
                        {"top_p", endpoint.top_p}};
}

Completion HttpBackend::parse_response(const std::string& body) {
  const auto j = nlohmann::json::parse(body, nullptr, false);
  if (j.is_discarded()) throw TransportError("response is not JSON");
  Completion c;
  try {
    c.text = j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception&) {
    throw TransportError("response has no choices[0].message.content");
  }
  if (const auto u = j.find("usage"); u != j.end() && u->is_object()) {
    c.usage.prompt_tokens = u->value("prompt_tokens", 0);
    c.usage.completion_tokens = u->value("completion_tokens", 0);
  }
  return c;
}

Completion HttpBackend::attempt(const ModelEndpoint& endpoint, const ModelRequest& request) {
  const UrlParts url = split_url(endpoint.base_url);
  httplib::Client client(url.origin);
  const auto timeout = std::chrono::milliseconds(endpoint.timeout_ms);
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);

  httplib::Headers headers;
  if (!endpoint.api_key_env.empty()) {
    const char* key = std::getenv(endpoint.api_key_env.c_str());
    if (key == nullptr || *key == '\0') {
      throw TransportError(fmt::format("environment variable {} is not set", endpoint.api_key_env));
    }
    headers.emplace("Authorization", fmt::format("Bearer {}", key));
  }
  const std::string body = request_body(endpoint, request.prompt).dump();
  const auto res = client.Post(url.path + "/chat/completions", headers, body, "application/json");
  if (!res) throw RetryableError(fmt::format("request failed: {}", httplib::to_string(res.error())));
  if (res->status == 429 || res->status >= 500) {
    throw RetryableError(fmt::format("HTTP {}", res->status));
  }
  if (res->status != 200) throw TransportError(fmt::format("HTTP {}: {}", res->status, res->body.substr(0, 200)));
  return parse_response(res->body);
}

}  // namespace triex
