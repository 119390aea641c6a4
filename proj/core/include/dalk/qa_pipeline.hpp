#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dalk/embed_link.hpp"
#include "dalk/evidence_sampler.hpp"
#include "dalk/kg_store.hpp"
#include "dalk/llm_gateway.hpp"
#include "dalk/prompts.hpp"
#include "dalk/self_retrieval.hpp"

namespace dalk::qa {

struct Dataset {
  enum class Kind { MedQA, MedMCQA, MMLU, QA4MRE, Other };

  Kind kind = Kind::Other;
  std::string other;

  // Case-insensitive for the four named datasets; anything else is Other.
  static Dataset parse(std::string_view s);
  std::string name() const;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

struct QASample {
  std::string id;
  Dataset dataset;
  std::string question;
  std::map<char, std::string> options;
  char gold = 'A';
};

// Throws InvalidSample: 2-5 options lettered contiguously from A, gold among
// them, non-empty id and question.
void validate(const QASample& sample);

// {"id", "dataset", "question", "options": {"A": ...}, "gold"}.
QASample sample_from_json(const nlohmann::json& j);
nlohmann::json to_json(const QASample& sample);

// One sample per non-blank line, each validated. Errors name the line.
std::vector<QASample> parse_samples_jsonl(std::string_view text);
std::vector<QASample> load_samples(const std::filesystem::path& path);

// "A. text" lines.
std::string render_options(const QASample& sample);
// Stem, then the option lines.
std::string render_question(const QASample& sample);

enum class Mode { Dalk, NoSelfRetrieval, Baseline };

Mode parse_mode(std::string_view s);
std::string_view to_string(Mode mode);

struct EvidenceSentences {
  std::vector<std::string> path;
  std::vector<std::string> neighbor;
};

// Question and options, the non-empty evidence blocks, then the step-by-step
// cue. With no evidence at all this is the plain chain-of-thought prompt.
llm::LlmRequest build_inference_prompt(const QASample& sample, const EvidenceSentences& evidence,
                                       const LlmSettings& settings = {});

// Last "answer is <L>", else last "(option <L>)", else last line starting
// with "<L>.". Only letters in `letters` count.
std::optional<char> extract_answer(std::string_view text, std::string_view letters);
std::optional<char> extract_answer(std::string_view text, const QASample& sample);

struct PipelineConfig {
  LlmSettings llm;
  sampler::SamplerConfig sampler;
  retrieval::RetrieveOptions retrieve;
  embed::LinkOptions link;
  Mode mode = Mode::Dalk;
  // Entity extraction sees the options as well as the stem.
  bool entities_from_options = true;
};

struct PipelineContext {
  llm::Gateway& gateway;
  embed::EmbeddingProvider& embedder;
  embed::EmbeddingCache& cache;
};

enum class Status { Ok, Failed };

struct Prediction {
  std::string sample_id;
  std::optional<char> predicted;
  std::string raw_response;
  // Without self-retrieval these hold the whole pruned subgraphs.
  retrieval::RankedEvidence path_evidence;
  retrieval::RankedEvidence neighbor_evidence;
  EvidenceSentences sentences;
  std::vector<std::string> trace;  // cache key of every LLM call, in order
  Mode mode = Mode::Dalk;
  bool fell_back_to_baseline = false;  // no question entity linked
  Status status = Status::Ok;
  std::string failure;
  // Filled only when subgraph dumping is requested.
  std::optional<nlohmann::json> subgraphs;
};

nlohmann::json to_json(const Prediction& prediction, const kg::KnowledgeGraph& graph);

struct AnswerOptions {
  bool dump_subgraphs = false;
};

// Provider errors end the sample with Status::Failed instead of throwing.
Prediction answer(const QASample& sample, const kg::KnowledgeGraph& graph,
                  const PipelineConfig& config, const PipelineContext& context,
                  const AnswerOptions& options = {});

// answer() over every sample on up to `workers` threads (0: the gateway's
// in-flight limit). Results keep input order.
std::vector<Prediction> answer_all(const std::vector<QASample>& samples,
                                   const kg::KnowledgeGraph& graph, const PipelineConfig& config,
                                   const PipelineContext& context, std::size_t workers = 0,
                                   const AnswerOptions& options = {});

}  // namespace dalk::qa
