#pragma once

#include <cstddef>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dalk/kg_store.hpp"
#include "dalk/llm_gateway.hpp"
#include "dalk/prompts.hpp"
#include "dalk/qa_pipeline.hpp"

namespace dalk::bench {

// Aging, Alzheimer, Amyloid beta, APOE, Dementia, Lipoprotein, Microglia.
const std::vector<std::string>& default_keywords();

// Case-insensitive substring match over the question and every option.
bool matches_keyword(const qa::QASample& sample, std::string_view keyword);
bool matches_any(const qa::QASample& sample, const std::vector<std::string>& keywords);

struct FilterResult {
  std::vector<qa::QASample> candidates;
  std::vector<qa::QASample> rejected;
};

// Throws ConfigError for an empty keyword list.
FilterResult keyword_filter(const std::vector<qa::QASample>& samples,
                            const std::vector<std::string>& keywords);

enum class JudgeVerdict { Yes, No, Unclear };

// "a).X b).Y ..." on one line.
std::string render_judge_options(const qa::QASample& sample);
llm::LlmRequest build_judge_prompt(const qa::QASample& sample, const LlmSettings& settings = {});
// Leading word, case-insensitive, punctuation ignored.
JudgeVerdict parse_judge(std::string_view response);

struct JudgeResult {
  std::vector<qa::QASample> accepted;
  std::vector<qa::QASample> rejected;
  std::vector<std::string> unclear;  // ids rejected because the reply was neither yes nor no
  std::vector<std::string> failed;   // ids skipped on provider errors
};

JudgeResult llm_judge(const std::vector<qa::QASample>& candidates, llm::Gateway& gateway,
                      const LlmSettings& settings = {});

struct DatasetScore {
  std::size_t n = 0;
  std::size_t correct = 0;
  std::size_t failures = 0;
  double accuracy = 0.0;

  friend bool operator==(const DatasetScore&, const DatasetScore&) = default;
};

struct EvalReport {
  std::map<std::string, DatasetScore> per_dataset;
  double macro_avg = 0.0;  // unweighted mean over datasets present
  double micro_avg = 0.0;  // pooled over samples
  std::size_t n = 0;
  std::size_t correct = 0;
  std::size_t failures = 0;
  std::string fingerprint;

  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

// Digest of (snapshot id, sampler config, retrieve_k, joint, mode).
std::string config_fingerprint(const std::string& snapshot_id, const qa::PipelineConfig& config);

// Pure fold: order of (sample, prediction) pairs never matters. A missing or
// failed prediction counts as incorrect.
EvalReport aggregate(const std::vector<qa::QASample>& samples,
                     const std::vector<qa::Prediction>& predictions, std::string fingerprint);

struct EvalRun {
  EvalReport report;
  std::vector<qa::Prediction> predictions;
};

EvalRun evaluate(const std::vector<qa::QASample>& samples, const kg::KnowledgeGraph& graph,
                 const qa::PipelineConfig& config, const qa::PipelineContext& context);

const std::vector<std::size_t>& default_sweep_ks();

std::map<std::size_t, EvalReport> sweep_k(const std::vector<qa::QASample>& samples,
                                          const kg::KnowledgeGraph& graph,
                                          const std::vector<std::size_t>& ks,
                                          const qa::PipelineConfig& config,
                                          const qa::PipelineContext& context);

struct LooEntry {
  std::string keyword;
  std::size_t removed = 0;
  std::size_t remaining = 0;
  std::optional<EvalReport> report;  // empty when every sample matched
};

std::vector<LooEntry> leave_one_out(const std::vector<qa::QASample>& samples,
                                    const kg::KnowledgeGraph& graph,
                                    const std::vector<std::string>& keywords,
                                    const qa::PipelineConfig& config,
                                    const qa::PipelineContext& context);

// 2011 through 2021.
std::vector<int> default_years();

struct EvolutionRow {
  int year = 0;
  std::size_t triples = 0;
  double macro_accuracy = 0.0;
  EvalReport report;
};

std::vector<EvolutionRow> evolution_curve(const std::vector<qa::QASample>& samples,
                                          const kg::KnowledgeGraph& graph,
                                          const std::vector<int>& years,
                                          const qa::PipelineConfig& config,
                                          const qa::PipelineContext& context);

// Mean whitespace-token count of the question stem per dataset.
std::map<std::string, double> query_length_stats(const std::vector<qa::QASample>& samples);

nlohmann::json to_json(const EvalReport& report);

// Fixed-precision CSV renderings.
std::string format_accuracy(double value);
std::string evolution_csv(const std::vector<EvolutionRow>& rows);      // year,triples,accuracy
std::string sweep_csv(const std::map<std::size_t, EvalReport>& runs);  // k,dataset,accuracy
std::string loo_csv(const std::vector<LooEntry>& entries);  // keyword,avg,pooled,remaining,removed

}  // namespace dalk::bench
