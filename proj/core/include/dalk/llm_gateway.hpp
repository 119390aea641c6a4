#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <nlohmann/json.hpp>
#include <optional>
#include <semaphore>
#include <shared_mutex>
#include <span>
#include <string>
#include <vector>

#include "dalk/error.hpp"

namespace dalk::llm {

constexpr double kDefaultTemperature = 0.7;

struct LlmRequest {
  std::string model = "gpt-3.5-turbo";
  std::optional<std::string> system_prompt;
  std::string user_prompt;
  double temperature = kDefaultTemperature;
  int max_tokens = 512;
  std::string tag;  // pipeline stage label; not part of the cache key
};

// Throws PreconditionViolation for an empty prompt, temperature outside
// [0, 2] or non-positive max_tokens.
void validate(const LlmRequest& request);

// Sorted-key compact JSON of (max_tokens, model, system_prompt, temperature,
// user_prompt).
std::string canonical_serialization(const LlmRequest& request);

// SHA-256 of canonical_serialization, 64 hex digits.
std::string cache_key(const LlmRequest& request);

struct LlmExchange {
  LlmRequest request;
  std::string response_text;
  std::string cache_key;
  std::string timestamp;  // ISO 8601, UTC
  std::string provider_name;
};

nlohmann::json to_json(const LlmExchange& exchange);
LlmExchange exchange_from_json(const nlohmann::json& j);

std::string utc_timestamp();

class Provider {
 public:
  virtual ~Provider() = default;
  virtual std::string name() const = 0;
  // Must be safe to call from several threads at once.
  virtual std::string complete(const LlmRequest& request) = 0;
};

// One scripted reply. A rule fires when its tag (if any) equals the request
// tag and every substring in `contains` occurs in the system or user prompt.
struct ScriptRule {
  std::optional<std::string> tag;
  std::vector<std::string> contains;
  std::string response;
};

// Deterministic offline provider: first matching rule wins, an unmatched
// prompt throws UnmatchedPrompt.
class ScriptedProvider : public Provider {
 public:
  explicit ScriptedProvider(std::vector<ScriptRule> rules) : rules_(std::move(rules)) {}

  // Accepts either a JSON array of rules or {"rules": [...]}. Each rule is
  // {"tag"?: str, "contains": str | [str], "response": str}.
  static ScriptedProvider from_json(const nlohmann::json& j);
  static ScriptedProvider load(const std::filesystem::path& path);

  std::string name() const override { return "scripted"; }
  std::string complete(const LlmRequest& request) override;

  const std::vector<ScriptRule>& rules() const { return rules_; }

 private:
  std::vector<ScriptRule> rules_;
};

// Content-addressed record/replay store backed by an append-only JSON-lines
// file. A store without a path lives in memory only.
class ReplayStore {
 public:
  ReplayStore() = default;
  explicit ReplayStore(std::filesystem::path path);

  std::optional<LlmExchange> find(const std::string& key) const;
  void append(const LlmExchange& exchange);
  std::size_t size() const;

 private:
  std::optional<std::filesystem::path> path_;
  mutable std::shared_mutex mu_;
  std::map<std::string, LlmExchange> entries_;
};

struct RetryPolicy {
  int attempts = 3;
  std::chrono::milliseconds base_delay{500};
  // Replaceable so tests can observe backoff without sleeping.
  std::function<void(std::chrono::milliseconds)> sleep;
};

// Retries TransportError and RateLimited with exponential backoff; the last
// error surfaces once attempts are exhausted.
class RetryingProvider : public Provider {
 public:
  RetryingProvider(std::shared_ptr<Provider> inner, RetryPolicy policy);

  std::string name() const override { return inner_->name(); }
  std::string complete(const LlmRequest& request) override;

 private:
  std::shared_ptr<Provider> inner_;
  RetryPolicy policy_;
};

enum class GatewayMode { Live, Mock, Replay, Record };

GatewayMode parse_gateway_mode(std::string_view s);
std::string_view to_string(GatewayMode mode);

class BatchError : public Error {
 public:
  BatchError(std::size_t failed_index, ErrorCode cause, const std::string& what,
             std::vector<std::optional<std::string>> partial)
      : Error(ErrorCode::BatchAborted,
              "request " + std::to_string(failed_index) + " failed: " + what),
        failed_index_(failed_index),
        cause_(cause),
        partial_(std::move(partial)) {}

  std::size_t failed_index() const { return failed_index_; }
  ErrorCode cause() const { return cause_; }
  const std::vector<std::optional<std::string>>& partial() const { return partial_; }

 private:
  std::size_t failed_index_;
  ErrorCode cause_;
  std::vector<std::optional<std::string>> partial_;
};

// Single entry point for every text-generation call.
//
//   Live   - forward to the upstream provider.
//   Mock   - forward to the upstream provider (a ScriptedProvider).
//   Replay - serve from the store only; a miss throws CacheMiss.
//   Record - serve from the store when possible, otherwise forward upstream
//            and append the exchange.
//
// At most `in_flight_limit` calls are outstanding at any time, across all
// threads using this gateway.
class Gateway {
 public:
  Gateway(GatewayMode mode, std::shared_ptr<Provider> upstream,
          std::shared_ptr<ReplayStore> store = nullptr, int in_flight_limit = 4);

  std::string complete(const LlmRequest& request);

  // Responses in input order. The first failure stops scheduling new
  // requests and throws BatchError carrying whatever finished.
  std::vector<std::string> complete_batch(std::span<const LlmRequest> requests);

  GatewayMode mode() const { return mode_; }
  int in_flight_limit() const { return limit_; }
  std::size_t calls() const { return calls_.load(); }

 private:
  std::string dispatch(const LlmRequest& request);

  GatewayMode mode_;
  std::shared_ptr<Provider> upstream_;
  std::shared_ptr<ReplayStore> store_;
  int limit_;
  std::counting_semaphore<> slots_;
  std::atomic<std::size_t> calls_{0};
};

// Appends the request's cache key to `trace` (when non-null), then calls the
// gateway. The key is recorded even if the call fails.
std::string complete_traced(Gateway& gateway, const LlmRequest& request,
                            std::vector<std::string>* trace);

}  // namespace dalk::llm
