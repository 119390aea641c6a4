#include "dalk/bench_harness.hpp"

#include <algorithm>
#include <cctype>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "dalk/digest.hpp"
#include "dalk/error.hpp"
#include "dalk/text.hpp"

namespace dalk::bench {

const std::vector<std::string>& default_keywords() {
  static const std::vector<std::string> k{"Aging",    "Alzheimer",   "Amyloid beta", "APOE",
                                          "Dementia", "Lipoprotein", "Microglia"};
  return k;
}

bool matches_keyword(const qa::QASample& sample, std::string_view keyword) {
  if (text::contains_ci(sample.question, keyword)) return true;
  return std::any_of(sample.options.begin(), sample.options.end(),
                     [&](const auto& o) { return text::contains_ci(o.second, keyword); });
}

bool matches_any(const qa::QASample& sample, const std::vector<std::string>& keywords) {
  return std::any_of(keywords.begin(), keywords.end(),
                     [&](const auto& k) { return matches_keyword(sample, k); });
}

FilterResult keyword_filter(const std::vector<qa::QASample>& samples,
                            const std::vector<std::string>& keywords) {
  if (keywords.empty()) throw Error(ErrorCode::ConfigError, "keyword list is empty");
  FilterResult out;
  for (const auto& s : samples) {
    (matches_any(s, keywords) ? out.candidates : out.rejected).push_back(s);
  }
  return out;
}

std::string render_judge_options(const qa::QASample& sample) {
  std::string out;
  for (const auto& [letter, text] : sample.options) {
    if (!out.empty()) out += ' ';
    out += static_cast<char>(letter - 'A' + 'a');
    out += ")." + text;
  }
  return out;
}

llm::LlmRequest build_judge_prompt(const qa::QASample& sample, const LlmSettings& settings) {
  return settings.request(
      fill_template(settings.templates.judge,
                    {{"question", sample.question}, {"options", render_judge_options(sample)}}),
      "judge");
}

JudgeVerdict parse_judge(std::string_view response) {
  const auto t = text::trim(response);
  std::size_t end = 0;
  while (end < t.size() && std::isalpha(static_cast<unsigned char>(t[end]))) ++end;
  const auto word = text::to_lower_ascii(t.substr(0, end));
  if (word == "yes") return JudgeVerdict::Yes;
  if (word == "no") return JudgeVerdict::No;
  return JudgeVerdict::Unclear;
}

JudgeResult llm_judge(const std::vector<qa::QASample>& candidates, llm::Gateway& gateway,
                      const LlmSettings& settings) {
  JudgeResult out;
  for (const auto& s : candidates) {
    std::string reply;
    try {
      reply = gateway.complete(build_judge_prompt(s, settings));
    } catch (const Error& e) {
      if (classify(e.code()) != ErrorClass::Provider) throw;
      spdlog::warn("judge skipped {}: {}", s.id, e.what());
      out.failed.push_back(s.id);
      continue;
    }
    switch (parse_judge(reply)) {
      case JudgeVerdict::Yes:
        out.accepted.push_back(s);
        break;
      case JudgeVerdict::No:
        out.rejected.push_back(s);
        break;
      case JudgeVerdict::Unclear:
        spdlog::warn("judge reply for {} is neither yes nor no: {}", s.id, reply);
        out.unclear.push_back(s.id);
        out.rejected.push_back(s);
        break;
    }
  }
  return out;
}

std::string config_fingerprint(const std::string& snapshot_id, const qa::PipelineConfig& config) {
  const nlohmann::json j{
      {"snapshot_id", snapshot_id},
      {"hop_bound", config.sampler.hop_bound},
      {"relevance_threshold", config.sampler.relevance_threshold},
      {"max_triples_per_subgraph", config.sampler.max_triples_per_subgraph},
      {"retrieve_k", config.retrieve.retrieve_k},
      {"joint", config.retrieve.joint},
      {"mode", std::string(qa::to_string(config.mode))},
  };
  return sha256_hex(j.dump());
}

EvalReport aggregate(const std::vector<qa::QASample>& samples,
                     const std::vector<qa::Prediction>& predictions, std::string fingerprint) {
  std::map<std::string, const qa::Prediction*> by_id;
  for (const auto& p : predictions) by_id.emplace(p.sample_id, &p);

  EvalReport r;
  r.fingerprint = std::move(fingerprint);
  for (const auto& s : samples) {
    auto& d = r.per_dataset[s.dataset.name()];
    ++d.n;
    auto it = by_id.find(s.id);
    const bool failed = it == by_id.end() || it->second->status == qa::Status::Failed;
    if (failed) {
      ++d.failures;
    } else if (it->second->predicted == s.gold) {
      ++d.correct;
    }
  }
  double sum = 0.0;
  for (auto& [_, d] : r.per_dataset) {
    d.accuracy = static_cast<double>(d.correct) / static_cast<double>(d.n);
    sum += d.accuracy;
    r.n += d.n;
    r.correct += d.correct;
    r.failures += d.failures;
  }
  if (!r.per_dataset.empty()) {
    r.macro_avg = sum / static_cast<double>(r.per_dataset.size());
    r.micro_avg = static_cast<double>(r.correct) / static_cast<double>(r.n);
  }
  return r;
}

EvalRun evaluate(const std::vector<qa::QASample>& samples, const kg::KnowledgeGraph& graph,
                 const qa::PipelineConfig& config, const qa::PipelineContext& context) {
  EvalRun run;
  run.predictions = qa::answer_all(samples, graph, config, context);
  run.report = aggregate(samples, run.predictions, config_fingerprint(graph.snapshot_id(), config));
  return run;
}

const std::vector<std::size_t>& default_sweep_ks() {
  static const std::vector<std::size_t> ks{1, 3, 5, 10, 20, 30};
  return ks;
}

std::map<std::size_t, EvalReport> sweep_k(const std::vector<qa::QASample>& samples,
                                          const kg::KnowledgeGraph& graph,
                                          const std::vector<std::size_t>& ks,
                                          const qa::PipelineConfig& config,
                                          const qa::PipelineContext& context) {
  std::map<std::size_t, EvalReport> out;
  for (auto k : ks) {
    if (k == 0) throw Error(ErrorCode::ConfigError, "k must be >= 1");
    auto c = config;
    c.retrieve.retrieve_k = k;
    out[k] = evaluate(samples, graph, c, context).report;
  }
  return out;
}

std::vector<LooEntry> leave_one_out(const std::vector<qa::QASample>& samples,
                                    const kg::KnowledgeGraph& graph,
                                    const std::vector<std::string>& keywords,
                                    const qa::PipelineConfig& config,
                                    const qa::PipelineContext& context) {
  std::vector<LooEntry> out;
  for (const auto& keyword : keywords) {
    LooEntry e;
    e.keyword = keyword;
    std::vector<qa::QASample> kept;
    for (const auto& s : samples) {
      if (matches_keyword(s, keyword)) {
        ++e.removed;
      } else {
        kept.push_back(s);
      }
    }
    e.remaining = kept.size();
    if (!kept.empty()) e.report = evaluate(kept, graph, config, context).report;
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<int> default_years() {
  std::vector<int> years;
  for (int y = 2011; y <= 2021; ++y) years.push_back(y);
  return years;
}

std::vector<EvolutionRow> evolution_curve(const std::vector<qa::QASample>& samples,
                                          const kg::KnowledgeGraph& graph,
                                          const std::vector<int>& years,
                                          const qa::PipelineConfig& config,
                                          const qa::PipelineContext& context) {
  auto sorted = years;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<EvolutionRow> rows;
  for (int year : sorted) {
    const auto snapshot = graph.snapshot_until(year);
    EvolutionRow row;
    row.year = year;
    row.triples = snapshot.triples().size();
    row.report = evaluate(samples, snapshot, config, context).report;
    row.macro_accuracy = row.report.macro_avg;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::map<std::string, double> query_length_stats(const std::vector<qa::QASample>& samples) {
  std::map<std::string, std::pair<std::size_t, std::size_t>> acc;
  for (const auto& s : samples) {
    auto& [words, count] = acc[s.dataset.name()];
    words += text::word_count(s.question);
    ++count;
  }
  std::map<std::string, double> out;
  for (const auto& [name, wc] : acc) {
    out[name] = static_cast<double>(wc.first) / static_cast<double>(wc.second);
  }
  return out;
}

nlohmann::json to_json(const EvalReport& r) {
  nlohmann::json per = nlohmann::json::object();
  for (const auto& [name, d] : r.per_dataset) {
    per[name] = {{"n", d.n}, {"correct", d.correct}, {"failures", d.failures},
                 {"accuracy", d.accuracy}};
  }
  return {{"per_dataset", std::move(per)}, {"macro_avg", r.macro_avg},
          {"micro_avg", r.micro_avg},      {"n", r.n},
          {"correct", r.correct},          {"failures", r.failures},
          {"fingerprint", r.fingerprint}};
}

std::string format_accuracy(double value) { return fmt::format("{:.4f}", value); }

std::string evolution_csv(const std::vector<EvolutionRow>& rows) {
  std::string out = "year,triples,accuracy\n";
  for (const auto& r : rows) {
    out += fmt::format("{},{},{}\n", r.year, r.triples, format_accuracy(r.macro_accuracy));
  }
  return out;
}

std::string sweep_csv(const std::map<std::size_t, EvalReport>& runs) {
  std::string out = "k,dataset,accuracy\n";
  for (const auto& [k, report] : runs) {
    for (const auto& [name, d] : report.per_dataset) {
      out += fmt::format("{},{},{}\n", k, name, format_accuracy(d.accuracy));
    }
    out += fmt::format("{},AVG,{}\n", k, format_accuracy(report.macro_avg));
  }
  return out;
}

std::string loo_csv(const std::vector<LooEntry>& entries) {
  std::string out = "keyword,avg,pooled,remaining,removed\n";
  for (const auto& e : entries) {
    const auto avg = e.report ? format_accuracy(e.report->macro_avg) : std::string("NA");
    const auto pooled = e.report ? format_accuracy(e.report->micro_avg) : std::string("NA");
    out += fmt::format("{},{},{},{},{}\n", e.keyword, avg, pooled, e.remaining, e.removed);
  }
  return out;
}

}  // namespace dalk::bench
