#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <cstdlib>

#include "emo/error.hpp"
#include "emo/language_fallback.hpp"

namespace emo {
namespace {

struct Url {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

Url split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("LLM endpoint '" + url + "' is not an absolute URL");
  const auto scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") throw ConfigError("LLM endpoint scheme must be http or https");
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

std::string HttpChatTransport::complete(const LlmBackendConfig& config, const std::vector<ChatMessage>& messages) {
  std::string endpoint = config.endpoint;
  if (const char* env = std::getenv("EMO_LLM_ENDPOINT"); env && *env) endpoint = env;
  if (endpoint.empty()) throw ConfigError("no LLM endpoint configured (set it in the config or EMO_LLM_ENDPOINT)");
  const auto url = split_url(endpoint);

  httplib::Client client(url.origin);
  const auto seconds = static_cast<time_t>(config.timeout_seconds);
  const auto micros = static_cast<time_t>((config.timeout_seconds - static_cast<double>(seconds)) * 1e6);
  client.set_connection_timeout(seconds, micros);
  client.set_read_timeout(seconds, micros);
  client.set_write_timeout(seconds, micros);

  httplib::Headers headers;
  if (const char* key = std::getenv(config.api_key_env.c_str()); key && *key) {
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }
  const auto body = make_chat_request(config, messages).dump();
  auto res = client.Post(url.path, headers, body, "application/json");
  if (!res) {
    throw TransportError("LLM endpoint " + url.origin + " unreachable: " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw TransportError("LLM endpoint returned HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 200));
  }
  nlohmann::json reply;
  try {
    reply = nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::exception& e) {
    throw TransportError(std::string("LLM endpoint returned invalid JSON: ") + e.what());
  }
  return extract_chat_reply(reply);
}

}  // namespace emo
