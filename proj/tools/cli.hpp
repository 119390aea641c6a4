#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dalk/run_config.hpp"

namespace dalk::cli {

// Flags shared by every subcommand. Each one overrides the matching config
// field when given.
struct CommonFlags {
  std::filesystem::path config;
  std::optional<std::string> provider_mode;
  std::optional<std::string> upstream;
  std::optional<std::string> base_url;
  std::optional<std::string> model;
  std::optional<double> temperature;
  std::optional<int> max_tokens;
  std::optional<int> in_flight;
  std::optional<std::string> embedder;
  std::optional<int> hop_bound;
  std::optional<double> threshold;
  std::optional<std::size_t> max_triples;
  std::optional<std::size_t> k;
  std::optional<bool> joint;
  std::optional<std::string> mode;
  std::optional<bool> entities_from_options;
  std::optional<std::string> method;
  std::optional<std::string> cache;
  std::optional<std::string> rules;
  std::optional<std::string> templates;
  std::optional<std::string> corpus;
  std::optional<std::string> years;
  std::optional<std::string> kg;
  std::optional<std::string> dataset;
  std::optional<std::string> out;
  std::vector<std::string> keywords;  // empty: not given
  std::vector<std::size_t> ks;
  std::vector<int> eval_years;
};

// Built-in defaults, then the config file, then the flags.
RunConfig resolve_config(const CommonFlags& flags);

// Exit codes: 0 ok, 2 input or usage error, 3 provider error, 4 internal.
int exit_code_for(const std::exception& e);

int run(int argc, char** argv);

}  // namespace dalk::cli
