#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "dalk/llm_gateway.hpp"

namespace dalk {

// Prompt text for every LLM stage. Each template may reference {name}
// placeholders; the stage fills them in a single pass, so braces inside the
// substituted values are never re-expanded.
struct PromptTemplates {
  std::string generative;      // abstract, entities
  std::string pairwise;        // abstract, entities, head, tail, head_type, tail_type, options
  std::string entity_extract;  // question
  std::string rerank;          // graph, question, k, format
  std::string verbalize;       // graph, label
  std::string inference;       // question, evidence
  std::string judge;           // question, options

  static const PromptTemplates& defaults();

  // Defaults, overridden by any `<stage>.txt` file present in `dir`
  // (generative.txt, pairwise.txt, ...).
  static PromptTemplates load(const std::filesystem::path& dir);
};

// Model parameters shared by every stage, plus the prompt texts.
struct LlmSettings {
  std::string model = "gpt-3.5-turbo";
  double temperature = llm::kDefaultTemperature;
  int max_tokens = 512;
  PromptTemplates templates = PromptTemplates::defaults();

  llm::LlmRequest request(std::string prompt, std::string tag) const;
};

std::string fill_template(std::string_view tmpl,
                          const std::map<std::string, std::string>& values);

}  // namespace dalk
