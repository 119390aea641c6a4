#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dalk/evidence_sampler.hpp"
#include "dalk/llm_gateway.hpp"
#include "dalk/qa_pipeline.hpp"
#include "dalk/triple.hpp"

namespace dalk {

// Flat "section.key" -> value map read from a small TOML subset:
//
//   # comment
//   [section]
//   key = "string" | 'string' | 12 | 0.5 | true | ["a", "b"] | [1, 3]
//
// Throws ConfigError with the line number on anything else.
using ConfigTable = std::map<std::string, nlohmann::json>;

ConfigTable parse_config(std::string_view text);

struct ProviderSettings {
  llm::GatewayMode mode = llm::GatewayMode::Mock;
  std::string base_url = "https://api.openai.com/v1";
  std::string model = "gpt-3.5-turbo";
  double temperature = llm::kDefaultTemperature;
  int max_tokens = 512;
  int in_flight = 4;
  std::string upstream = "mock";  // what record mode forwards to: mock | live
  std::string embedder = "hashed";  // hashed | http
  std::string embed_model = "text-embedding-ada-002";
};

struct RunPaths {
  std::filesystem::path corpus;
  std::filesystem::path years;
  std::filesystem::path kg;
  std::filesystem::path dataset;
  std::filesystem::path cache;
  std::filesystem::path rules;
  std::filesystem::path templates;
  std::filesystem::path out;
};

struct RunConfig {
  ProviderSettings provider;
  sampler::SamplerConfig sampler;
  std::size_t retrieve_k = 5;
  bool joint_rerank = false;
  qa::Mode mode = qa::Mode::Dalk;
  bool entities_from_options = true;
  kg::Method method = kg::Method::Generative;
  bool include_title = false;
  std::vector<std::string> keywords;  // empty: built-in list
  std::vector<std::size_t> ks;        // empty: built-in sweep
  std::vector<int> years;             // empty: built-in range
  RunPaths paths;

  // Unknown keys and mistyped values throw ConfigError. Relative paths are
  // resolved against `base_dir`.
  void apply(const ConfigTable& table, const std::filesystem::path& base_dir = {});

  // Throws ConfigError.
  void validate() const;

  LlmSettings llm_settings() const;
  qa::PipelineConfig pipeline_config() const;
};

// Defaults overridden by the file at `path`.
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace dalk
