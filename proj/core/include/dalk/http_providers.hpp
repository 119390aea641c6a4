#pragma once

#include <chrono>
#include <string>
#include <vector>

#include "dalk/embed_link.hpp"
#include "dalk/llm_gateway.hpp"

namespace dalk::http {

inline constexpr const char* kApiKeyEnv = "DALK_API_KEY";

struct Endpoint {
  std::string base_url = "https://api.openai.com/v1";  // scheme://host[:port][/prefix]
  std::string api_key;                                 // sent as a bearer token
  std::chrono::seconds timeout{60};
};

// Reads DALK_API_KEY; empty when unset.
std::string api_key_from_env();

// POST {base}/chat/completions, single-turn. Non-2xx answers throw
// TransportError (or RateLimited for 429) carrying status and body.
class ChatProvider : public llm::Provider {
 public:
  explicit ChatProvider(Endpoint endpoint) : endpoint_(std::move(endpoint)) {}

  std::string name() const override { return "http-chat"; }
  std::string complete(const llm::LlmRequest& request) override;

 private:
  Endpoint endpoint_;
};

// POST {base}/embeddings with {"model", "input": [...]}.
class EmbeddingProvider : public embed::EmbeddingProvider {
 public:
  EmbeddingProvider(Endpoint endpoint, std::string model)
      : endpoint_(std::move(endpoint)), model_(std::move(model)) {}

  std::string id() const override { return "http:" + model_; }
  std::vector<embed::EmbeddingVector> embed(const std::vector<std::string>& texts) override;

 private:
  Endpoint endpoint_;
  std::string model_;
};

}  // namespace dalk::http
