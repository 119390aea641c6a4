#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "dalk/http_providers.hpp"

#include <httplib.h>

#include <cstdlib>
#include <nlohmann/json.hpp>

#include "dalk/error.hpp"

namespace dalk::http {

namespace {

using nlohmann::json;

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string prefix;  // path without trailing slash
};

SplitUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorCode::ConfigError, "base URL needs a scheme: " + url);
  }
  const auto path_start = url.find('/', scheme_end + 3);
  SplitUrl out;
  out.origin = url.substr(0, path_start);
  out.prefix = path_start == std::string::npos ? "" : url.substr(path_start);
  while (!out.prefix.empty() && out.prefix.back() == '/') out.prefix.pop_back();
  return out;
}

json post_json(const Endpoint& endpoint, const std::string& route, const json& body) {
  const auto url = split_url(endpoint.base_url);
  httplib::Client client(url.origin);
  const auto secs = static_cast<time_t>(endpoint.timeout.count());
  client.set_connection_timeout(secs, 0);
  client.set_read_timeout(secs, 0);
  client.set_write_timeout(secs, 0);
  if (!endpoint.api_key.empty()) client.set_bearer_token_auth(endpoint.api_key);

  auto res = client.Post(url.prefix + route, body.dump(), "application/json");
  if (!res) {
    throw Error(ErrorCode::TransportError,
                "status 0: " + httplib::to_string(res.error()));
  }
  if (res->status == 429) {
    throw Error(ErrorCode::RateLimited, "status 429: " + res->body);
  }
  if (res->status < 200 || res->status >= 300) {
    throw Error(ErrorCode::TransportError,
                "status " + std::to_string(res->status) + ": " + res->body);
  }
  try {
    return json::parse(res->body);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::TransportError, std::string("unparseable body: ") + e.what());
  }
}

}  // namespace

std::string api_key_from_env() {
  const char* key = std::getenv(kApiKeyEnv);
  return key ? std::string(key) : std::string();
}

std::string ChatProvider::complete(const llm::LlmRequest& request) {
  json messages = json::array();
  if (request.system_prompt) {
    messages.push_back({{"role", "system"}, {"content", *request.system_prompt}});
  }
  messages.push_back({{"role", "user"}, {"content", request.user_prompt}});
  const json body{{"model", request.model},
                  {"messages", std::move(messages)},
                  {"temperature", request.temperature},
                  {"max_tokens", request.max_tokens}};
  const json reply = post_json(endpoint_, "/chat/completions", body);
  try {
    return reply.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::TransportError, std::string("unexpected reply shape: ") + e.what());
  }
}

std::vector<embed::EmbeddingVector> EmbeddingProvider::embed(
    const std::vector<std::string>& texts) {
  if (texts.empty()) throw Error(ErrorCode::EmptyInput, "embed() called with no texts");
  const json reply = post_json(endpoint_, "/embeddings", json{{"model", model_}, {"input", texts}});
  std::vector<embed::EmbeddingVector> out(texts.size());
  try {
    const auto& data = reply.at("data");
    if (data.size() != texts.size()) {
      throw Error(ErrorCode::TransportError, "embedding count mismatch");
    }
    for (std::size_t i = 0; i < data.size(); ++i) {
      const auto index = data[i].value("index", i);
      if (index >= out.size()) throw Error(ErrorCode::TransportError, "embedding index out of range");
      out[index].values = data[i].at("embedding").get<std::vector<double>>();
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::TransportError, std::string("unexpected reply shape: ") + e.what());
  }
  return out;
}

}  // namespace dalk::http
