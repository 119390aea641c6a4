#include "dalk/llm_gateway.hpp"

#include <algorithm>
#include <ctime>
#include <fstream>
#include <sstream>
#include <thread>

#include "dalk/digest.hpp"
#include "dalk/text.hpp"

namespace dalk::llm {

using nlohmann::json;

void validate(const LlmRequest& request) {
  if (request.user_prompt.empty()) {
    throw Error(ErrorCode::PreconditionViolation, "user prompt is empty");
  }
  if (!(request.temperature >= 0.0 && request.temperature <= 2.0)) {
    throw Error(ErrorCode::PreconditionViolation, "temperature outside [0, 2]");
  }
  if (request.max_tokens <= 0) {
    throw Error(ErrorCode::PreconditionViolation, "max_tokens must be positive");
  }
}

std::string canonical_serialization(const LlmRequest& request) {
  // nlohmann::json objects keep keys sorted, which fixes the field order.
  json j;
  j["model"] = request.model;
  j["system_prompt"] = request.system_prompt ? json(*request.system_prompt) : json(nullptr);
  j["user_prompt"] = request.user_prompt;
  j["temperature"] = request.temperature;
  j["max_tokens"] = request.max_tokens;
  return j.dump();
}

std::string cache_key(const LlmRequest& request) {
  return sha256_hex(canonical_serialization(request));
}

json to_json(const LlmExchange& e) {
  json req;
  req["model"] = e.request.model;
  req["system_prompt"] =
      e.request.system_prompt ? json(*e.request.system_prompt) : json(nullptr);
  req["user_prompt"] = e.request.user_prompt;
  req["temperature"] = e.request.temperature;
  req["max_tokens"] = e.request.max_tokens;
  req["tag"] = e.request.tag;
  return json{{"cache_key", e.cache_key},
              {"provider", e.provider_name},
              {"timestamp", e.timestamp},
              {"request", std::move(req)},
              {"response", e.response_text}};
}

LlmExchange exchange_from_json(const json& j) {
  LlmExchange e;
  const auto& req = j.at("request");
  e.request.model = req.at("model").get<std::string>();
  if (req.contains("system_prompt") && !req.at("system_prompt").is_null()) {
    e.request.system_prompt = req.at("system_prompt").get<std::string>();
  }
  e.request.user_prompt = req.at("user_prompt").get<std::string>();
  e.request.temperature = req.at("temperature").get<double>();
  e.request.max_tokens = req.at("max_tokens").get<int>();
  e.request.tag = req.value("tag", "");
  e.response_text = j.at("response").get<std::string>();
  e.cache_key = j.value("cache_key", cache_key(e.request));
  e.timestamp = j.value("timestamp", "");
  e.provider_name = j.value("provider", "");
  return e;
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

ScriptedProvider ScriptedProvider::from_json(const json& j) {
  const json& list = j.is_object() ? j.at("rules") : j;
  if (!list.is_array()) {
    throw Error(ErrorCode::ConfigError, "script rules must be a JSON array");
  }
  std::vector<ScriptRule> rules;
  for (const auto& item : list) {
    ScriptRule rule;
    if (item.contains("tag") && !item.at("tag").is_null()) {
      rule.tag = item.at("tag").get<std::string>();
    }
    if (item.contains("contains")) {
      const auto& c = item.at("contains");
      if (c.is_string()) {
        rule.contains.push_back(c.get<std::string>());
      } else {
        rule.contains = c.get<std::vector<std::string>>();
      }
    }
    rule.response = item.at("response").get<std::string>();
    rules.push_back(std::move(rule));
  }
  return ScriptedProvider(std::move(rules));
}

ScriptedProvider ScriptedProvider::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot open script " + path.string());
  try {
    return from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigError, path.string() + ": " + e.what());
  }
}

std::string ScriptedProvider::complete(const LlmRequest& request) {
  for (const auto& rule : rules_) {
    if (rule.tag && *rule.tag != request.tag) continue;
    const bool all = std::all_of(
        rule.contains.begin(), rule.contains.end(), [&](const std::string& needle) {
          return request.user_prompt.find(needle) != std::string::npos ||
                 (request.system_prompt &&
                  request.system_prompt->find(needle) != std::string::npos);
        });
    if (all) return rule.response;
  }
  std::string head = request.user_prompt.substr(0, 120);
  throw Error(ErrorCode::UnmatchedPrompt, "no scripted rule for tag '" + request.tag +
                                              "', prompt starting: " + head);
}

ReplayStore::ReplayStore(std::filesystem::path path) : path_(std::move(path)) {
  std::ifstream in(*path_);
  if (!in) return;  // a fresh store
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    try {
      auto e = exchange_from_json(json::parse(line));
      entries_.insert_or_assign(e.cache_key, std::move(e));
    } catch (const json::exception& ex) {
      throw Error(ErrorCode::MalformedLine, path_->string() + " line " +
                                                std::to_string(line_no) + ": " + ex.what());
    }
  }
}

std::optional<LlmExchange> ReplayStore::find(const std::string& key) const {
  std::shared_lock lock(mu_);
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void ReplayStore::append(const LlmExchange& exchange) {
  std::unique_lock lock(mu_);
  if (!entries_.emplace(exchange.cache_key, exchange).second) return;
  if (path_) {
    std::ofstream out(*path_, std::ios::app);
    if (!out) throw Error(ErrorCode::ConfigError, "cannot append to " + path_->string());
    out << to_json(exchange).dump() << '\n';
  }
}

std::size_t ReplayStore::size() const {
  std::shared_lock lock(mu_);
  return entries_.size();
}

RetryingProvider::RetryingProvider(std::shared_ptr<Provider> inner, RetryPolicy policy)
    : inner_(std::move(inner)), policy_(std::move(policy)) {
  if (policy_.attempts < 1) policy_.attempts = 1;
  if (!policy_.sleep) {
    policy_.sleep = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  }
}

std::string RetryingProvider::complete(const LlmRequest& request) {
  auto delay = policy_.base_delay;
  for (int attempt = 1;; ++attempt) {
    try {
      return inner_->complete(request);
    } catch (const Error& e) {
      const bool retryable =
          e.code() == ErrorCode::TransportError || e.code() == ErrorCode::RateLimited;
      if (!retryable || attempt >= policy_.attempts) throw;
    }
    policy_.sleep(delay);
    delay *= 2;
  }
}

GatewayMode parse_gateway_mode(std::string_view s) {
  if (s == "live") return GatewayMode::Live;
  if (s == "mock") return GatewayMode::Mock;
  if (s == "replay") return GatewayMode::Replay;
  if (s == "record") return GatewayMode::Record;
  throw Error(ErrorCode::ConfigError, "unknown provider mode '" + std::string(s) + "'");
}

std::string_view to_string(GatewayMode mode) {
  switch (mode) {
    case GatewayMode::Live: return "live";
    case GatewayMode::Mock: return "mock";
    case GatewayMode::Replay: return "replay";
    case GatewayMode::Record: return "record";
  }
  return "?";
}

Gateway::Gateway(GatewayMode mode, std::shared_ptr<Provider> upstream,
                 std::shared_ptr<ReplayStore> store, int in_flight_limit)
    : mode_(mode),
      upstream_(std::move(upstream)),
      store_(std::move(store)),
      limit_(in_flight_limit),
      slots_(in_flight_limit < 1 ? 1 : in_flight_limit) {
  if (in_flight_limit < 1) {
    throw Error(ErrorCode::ConfigError, "in-flight limit must be at least 1");
  }
  const bool needs_store = mode == GatewayMode::Replay || mode == GatewayMode::Record;
  const bool needs_upstream = mode != GatewayMode::Replay;
  if (needs_store && !store_) {
    throw Error(ErrorCode::ConfigError, "replay/record mode needs a store");
  }
  if (needs_upstream && !upstream_) {
    throw Error(ErrorCode::ConfigError, "provider mode needs an upstream provider");
  }
}

std::string Gateway::complete(const LlmRequest& request) {
  validate(request);
  calls_.fetch_add(1);
  slots_.acquire();
  struct Release {
    std::counting_semaphore<>& s;
    ~Release() { s.release(); }
  } release{slots_};
  return dispatch(request);
}

std::string Gateway::dispatch(const LlmRequest& request) {
  if (mode_ == GatewayMode::Live || mode_ == GatewayMode::Mock) {
    return upstream_->complete(request);
  }
  const std::string key = cache_key(request);
  if (auto hit = store_->find(key)) return hit->response_text;
  if (mode_ == GatewayMode::Replay) throw Error(ErrorCode::CacheMiss, key);

  LlmExchange exchange;
  exchange.request = request;
  exchange.response_text = upstream_->complete(request);
  exchange.cache_key = key;
  exchange.timestamp = utc_timestamp();
  exchange.provider_name = upstream_->name();
  store_->append(exchange);
  return exchange.response_text;
}

std::vector<std::string> Gateway::complete_batch(std::span<const LlmRequest> requests) {
  const std::size_t n = requests.size();
  std::vector<std::optional<std::string>> results(n);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> abort{false};

  std::mutex failure_mu;
  std::optional<std::size_t> failed_index;
  ErrorCode failed_code = ErrorCode::BatchAborted;
  std::string failed_what;

  auto worker = [&] {
    while (!abort.load()) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        results[i] = complete(requests[i]);
      } catch (const std::exception& e) {
        const auto* err = dynamic_cast<const Error*>(&e);
        std::lock_guard lock(failure_mu);
        if (!failed_index || i < *failed_index) {
          failed_index = i;
          failed_code = err ? err->code() : ErrorCode::BatchAborted;
          failed_what = e.what();
        }
        abort.store(true);
      }
    }
  };

  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(limit_), n);
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }

  if (failed_index) {
    throw BatchError(*failed_index, failed_code, failed_what, std::move(results));
  }
  std::vector<std::string> out;
  out.reserve(n);
  for (auto& r : results) out.push_back(std::move(*r));
  return out;
}

std::string complete_traced(Gateway& gateway, const LlmRequest& request,
                            std::vector<std::string>* trace) {
  if (trace) trace->push_back(cache_key(request));
  return gateway.complete(request);
}

}  // namespace dalk::llm
