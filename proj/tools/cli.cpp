#include "cli.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "dalk/bench_harness.hpp"
#include "dalk/corpus.hpp"
#include "dalk/embed_link.hpp"
#include "dalk/error.hpp"
#include "dalk/http_providers.hpp"
#include "dalk/kg_construct.hpp"
#include "dalk/kg_store.hpp"
#include "dalk/llm_gateway.hpp"
#include "dalk/qa_pipeline.hpp"

namespace dalk::cli {

namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path, std::string_view what) {
  if (path.empty()) throw Error(ErrorCode::ConfigError, std::string(what) + " path is required");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::EmptyInput, "cannot read " + std::string(what) + " " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::ConfigError, "cannot write " + path.string());
  out << content;
}

fs::path out_dir(const RunConfig& config) {
  if (config.paths.out.empty()) throw Error(ErrorCode::ConfigError, "--out is required");
  std::error_code ec;
  fs::create_directories(config.paths.out, ec);
  if (ec) throw Error(ErrorCode::ConfigError, "cannot create " + config.paths.out.string());
  return config.paths.out;
}

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

struct Runtime {
  RunConfig config;
  std::unique_ptr<llm::Gateway> gateway;
  std::unique_ptr<embed::EmbeddingProvider> embedder;
  embed::EmbeddingCache cache;

  qa::PipelineContext context() { return {*gateway, *embedder, cache}; }
};

std::shared_ptr<llm::Provider> make_upstream(const RunConfig& c, bool live) {
  if (live) {
    http::Endpoint endpoint{c.provider.base_url, http::api_key_from_env(), std::chrono::seconds(60)};
    return std::make_shared<llm::RetryingProvider>(std::make_shared<http::ChatProvider>(endpoint),
                                                   llm::RetryPolicy{});
  }
  if (c.paths.rules.empty()) {
    throw Error(ErrorCode::ConfigError, "mock provider needs --rules (or paths.rules)");
  }
  return std::make_shared<llm::ScriptedProvider>(llm::ScriptedProvider::load(c.paths.rules));
}

std::unique_ptr<Runtime> make_runtime(const RunConfig& c) {
  auto rt = std::make_unique<Runtime>();
  rt->config = c;
  std::shared_ptr<llm::Provider> upstream;
  std::shared_ptr<llm::ReplayStore> store;
  switch (c.provider.mode) {
    case llm::GatewayMode::Live:
      upstream = make_upstream(c, true);
      break;
    case llm::GatewayMode::Mock:
      upstream = make_upstream(c, false);
      break;
    case llm::GatewayMode::Replay:
    case llm::GatewayMode::Record:
      if (c.paths.cache.empty()) {
        throw Error(ErrorCode::ConfigError, "replay and record modes need --cache");
      }
      store = std::make_shared<llm::ReplayStore>(c.paths.cache);
      if (c.provider.mode == llm::GatewayMode::Record) {
        upstream = make_upstream(c, c.provider.upstream == "live");
      }
      break;
  }
  rt->gateway = std::make_unique<llm::Gateway>(c.provider.mode, upstream, store, c.provider.in_flight);
  if (c.provider.embedder == "http") {
    http::Endpoint endpoint{c.provider.base_url, http::api_key_from_env(), std::chrono::seconds(60)};
    rt->embedder = std::make_unique<http::EmbeddingProvider>(endpoint, c.provider.embed_model);
  } else {
    rt->embedder = std::make_unique<embed::HashedBagOfTokens>();
  }
  return rt;
}

kg::KnowledgeGraph load_graph(const RunConfig& c) {
  return kg::deserialize_tsv(read_file(c.paths.kg, "knowledge graph"));
}

std::vector<qa::QASample> load_dataset(const RunConfig& c) {
  return qa::parse_samples_jsonl(read_file(c.paths.dataset, "dataset"));
}

const std::vector<std::string>& keywords_of(const RunConfig& c) {
  return c.keywords.empty() ? bench::default_keywords() : c.keywords;
}

std::string predictions_jsonl(const std::vector<qa::Prediction>& predictions,
                              const kg::KnowledgeGraph& graph) {
  std::string out;
  for (const auto& p : predictions) out += qa::to_json(p, graph).dump() + "\n";
  return out;
}

void add_common(CLI::App* app, CommonFlags& f) {
  app->add_option("--config", f.config, "TOML-style run configuration");
  app->add_option("--provider-mode", f.provider_mode, "live | mock | replay | record");
  app->add_option("--upstream", f.upstream, "provider behind record mode: mock | live");
  app->add_option("--base-url", f.base_url, "chat / embedding endpoint base URL");
  app->add_option("--model", f.model, "model name sent with every request");
  app->add_option("--temperature", f.temperature);
  app->add_option("--max-tokens", f.max_tokens);
  app->add_option("--in-flight", f.in_flight, "maximum concurrent LLM calls");
  app->add_option("--embedder", f.embedder, "hashed | http");
  app->add_option("--hop-bound", f.hop_bound);
  app->add_option("--threshold", f.threshold, "neighbor relevance threshold");
  app->add_option("--max-triples", f.max_triples, "per-subgraph cap before reranking");
  app->add_option("--k", f.k, "triples kept by self-retrieval");
  app->add_option("--joint", f.joint, "rerank both subgraphs in one call (true/false)");
  app->add_option("--mode", f.mode, "dalk | no_self_retrieval | baseline");
  app->add_option("--entities-from-options", f.entities_from_options, "true/false");
  app->add_option("--cache", f.cache, "replay store (JSON lines)");
  app->add_option("--rules", f.rules, "scripted mock rules (JSON)");
  app->add_option("--templates", f.templates, "directory of <stage>.txt prompt overrides");
  app->add_option("--out", f.out, "output directory");
}

}  // namespace

RunConfig resolve_config(const CommonFlags& f) {
  RunConfig c;
  if (!f.config.empty()) c = load_run_config(f.config);
  ConfigTable t;
  auto set = [&](const char* key, const auto& opt) {
    if (opt) t[key] = *opt;
  };
  set("provider.mode", f.provider_mode);
  set("provider.upstream", f.upstream);
  set("provider.base_url", f.base_url);
  set("provider.model", f.model);
  set("provider.temperature", f.temperature);
  set("provider.max_tokens", f.max_tokens);
  set("provider.in_flight", f.in_flight);
  set("provider.embedder", f.embedder);
  set("sampler.hop_bound", f.hop_bound);
  set("sampler.relevance_threshold", f.threshold);
  set("sampler.max_triples", f.max_triples);
  set("retrieval.k", f.k);
  set("retrieval.joint", f.joint);
  set("pipeline.mode", f.mode);
  set("pipeline.entities_from_options", f.entities_from_options);
  set("construct.method", f.method);
  set("paths.cache", f.cache);
  set("paths.rules", f.rules);
  set("paths.templates", f.templates);
  set("paths.corpus", f.corpus);
  set("paths.years", f.years);
  set("paths.kg", f.kg);
  set("paths.dataset", f.dataset);
  set("paths.out", f.out);
  if (!f.keywords.empty()) t["bench.keywords"] = f.keywords;
  if (!f.ks.empty()) t["bench.ks"] = f.ks;
  if (!f.eval_years.empty()) t["bench.years"] = f.eval_years;
  c.apply(t);
  c.validate();
  return c;
}

int exit_code_for(const std::exception& e) {
  if (const auto* de = dynamic_cast<const Error*>(&e)) {
    switch (classify(de->code())) {
      case ErrorClass::Input: return 2;
      case ErrorClass::Provider: return 3;
      case ErrorClass::Internal: return 4;
    }
  }
  return 4;
}

int run(int argc, char** argv) {
  auto logger = spdlog::stderr_color_mt("dalk");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);

  CLI::App app{"Knowledge-graph augmented multiple-choice QA"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "debug logging");

  CommonFlags f;
  bool lenient = false;
  std::optional<int> default_year;
  bool dump_subgraphs = false;
  bool no_judge = false;

  auto* build = app.add_subcommand("build-kg", "Extract triples from an annotated corpus");
  add_common(build, f);
  build->add_option("--corpus", f.corpus, "PubTator file");
  build->add_option("--years", f.years, "doc_id<TAB>year file");
  build->add_option("--method", f.method, "generative | pairwise")
      ->check(CLI::IsMember({"generative", "pairwise"}));
  build->add_flag("--lenient", lenient, "drop malformed annotations instead of failing");
  build->add_option("--default-year", default_year, "year for documents missing from --years");

  auto* answer = app.add_subcommand("answer", "Answer every question in a JSON-lines file");
  add_common(answer, f);
  answer->add_option("--kg", f.kg, "knowledge graph TSV");
  answer->add_option("--question-file,--dataset", f.dataset, "JSON-lines questions");
  answer->add_flag("--dump-subgraphs", dump_subgraphs, "include sampled subgraphs");

  auto* eval = app.add_subcommand("eval", "Accuracy report over a benchmark");
  add_common(eval, f);
  eval->add_option("--kg", f.kg);
  eval->add_option("--dataset", f.dataset);
  eval->add_flag("--dump-subgraphs", dump_subgraphs, "include sampled subgraphs in predictions");

  auto* sweep = app.add_subcommand("sweep", "Accuracy for several retrieve_k values");
  add_common(sweep, f);
  sweep->add_option("--kg", f.kg);
  sweep->add_option("--dataset", f.dataset);
  sweep->add_option("--ks", f.ks, "k values (default 1 3 5 10 20 30)");

  auto* loo = app.add_subcommand("loo", "Leave-one-keyword-out evaluation");
  add_common(loo, f);
  loo->add_option("--kg", f.kg);
  loo->add_option("--dataset", f.dataset);
  loo->add_option("--keywords", f.keywords);

  auto* evolve = app.add_subcommand("evolve", "Accuracy against yearly graph snapshots");
  add_common(evolve, f);
  evolve->add_option("--kg", f.kg);
  evolve->add_option("--dataset", f.dataset);
  evolve->add_option("--years", f.eval_years, "snapshot years (default 2011..2021)");

  auto* filter = app.add_subcommand("filter-qa", "Keyword filter plus LLM relevance judge");
  add_common(filter, f);
  filter->add_option("--dataset", f.dataset);
  filter->add_option("--keywords", f.keywords);
  filter->add_flag("--no-judge", no_judge, "keyword filter only");

  auto* stats = app.add_subcommand("stats", "Graph and dataset statistics");
  add_common(stats, f);
  stats->add_option("--kg", f.kg);
  stats->add_option("--dataset", f.dataset);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  if (verbose) spdlog::set_level(spdlog::level::debug);

  try {
    const RunConfig config = resolve_config(f);

    if (build->parsed()) {
      auto docs = corpus::parse_pubtator(read_file(config.paths.corpus, "corpus"),
                                         lenient ? corpus::ParseMode::Lenient
                                                 : corpus::ParseMode::Strict);
      std::map<std::string, int> years;
      if (!config.paths.years.empty()) {
        years = corpus::parse_year_map(read_file(config.paths.years, "year map"));
      }
      corpus::YearAttachOptions year_options;
      if (default_year) {
        year_options.mode = corpus::ParseMode::Lenient;
        year_options.default_year = *default_year;
      }
      const auto attached = corpus::attach_years(docs.documents, years, year_options);
      auto rt = make_runtime(config);
      construct::ConstructOptions options;
      options.llm = config.llm_settings();
      options.include_title = config.include_title;
      auto result = construct::construct_kg(docs.documents, config.method, *rt->gateway, options);
      const auto dir = out_dir(config);
      write_file(dir / "kg.tsv", kg::serialize_tsv(result.graph));
      auto stats_j = kg::stats_json(result.graph.stats());
      stats_j["snapshot_id"] = result.graph.snapshot_id();
      write_file(dir / "stats.json", dump(stats_j));
      auto report = construct::to_json(result.report);
      report["dropped_annotations"] = docs.dropped_annotations;
      report["dropped_lines"] = docs.dropped_lines;
      report["dropped_documents"] = docs.dropped_documents;
      report["default_year_documents"] = attached.missing.size();
      write_file(dir / "build_report.json", dump(report));
      std::cout << dump(stats_j);
      return 0;
    }

    if (stats->parsed()) {
      nlohmann::json j = nlohmann::json::object();
      if (!config.paths.kg.empty()) {
        const auto graph = load_graph(config);
        j["graph"] = kg::stats_json(graph.stats());
        j["graph"]["snapshot_id"] = graph.snapshot_id();
      }
      if (!config.paths.dataset.empty()) {
        const auto samples = load_dataset(config);
        std::map<std::string, std::size_t> counts;
        for (const auto& s : samples) ++counts[s.dataset.name()];
        j["dataset"] = {{"samples", samples.size()},
                        {"per_dataset", counts},
                        {"avg_question_words", bench::query_length_stats(samples)}};
      }
      if (j.empty()) throw Error(ErrorCode::ConfigError, "stats needs --kg and/or --dataset");
      std::cout << dump(j);
      return 0;
    }

    if (filter->parsed()) {
      const auto samples = load_dataset(config);
      auto filtered = bench::keyword_filter(samples, keywords_of(config));
      std::vector<qa::QASample> accepted = filtered.candidates;
      nlohmann::json report{{"input", samples.size()}, {"keyword_candidates", filtered.candidates.size()}};
      if (!no_judge) {
        auto rt = make_runtime(config);
        auto judged = bench::llm_judge(filtered.candidates, *rt->gateway, config.llm_settings());
        accepted = judged.accepted;
        report["judge_unclear"] = judged.unclear;
        report["judge_failed"] = judged.failed;
      }
      std::map<std::string, std::size_t> counts;
      std::string lines;
      for (const auto& s : accepted) {
        ++counts[s.dataset.name()];
        lines += qa::to_json(s).dump() + "\n";
      }
      report["accepted"] = accepted.size();
      report["per_dataset"] = counts;
      const auto dir = out_dir(config);
      write_file(dir / "filtered.jsonl", lines);
      write_file(dir / "filter_report.json", dump(report));
      std::cout << dump(report);
      return 0;
    }

    const auto graph = load_graph(config);
    const auto samples = load_dataset(config);
    auto rt = make_runtime(config);
    const auto pipeline = config.pipeline_config();

    if (answer->parsed()) {
      qa::AnswerOptions options{dump_subgraphs};
      auto predictions = qa::answer_all(samples, graph, pipeline, rt->context(), 0, options);
      const auto lines = predictions_jsonl(predictions, graph);
      if (!config.paths.out.empty()) write_file(out_dir(config) / "predictions.jsonl", lines);
      std::cout << lines;
      const bool failed = std::any_of(predictions.begin(), predictions.end(),
                                      [](const auto& p) { return p.status == qa::Status::Failed; });
      return failed ? 3 : 0;
    }

    const auto dir = out_dir(config);
    if (eval->parsed()) {
      const auto fingerprint = bench::config_fingerprint(graph.snapshot_id(), pipeline);
      auto predictions = qa::answer_all(samples, graph, pipeline, rt->context(), 0,
                                        qa::AnswerOptions{dump_subgraphs});
      const auto report = bench::aggregate(samples, predictions, fingerprint);
      write_file(dir / "report.json", dump(bench::to_json(report)));
      write_file(dir / "predictions.jsonl", predictions_jsonl(predictions, graph));
      std::cout << dump(bench::to_json(report));
      return 0;
    }
    if (sweep->parsed()) {
      const auto& ks = config.ks.empty() ? bench::default_sweep_ks() : config.ks;
      const auto runs = bench::sweep_k(samples, graph, ks, pipeline, rt->context());
      nlohmann::json j = nlohmann::json::object();
      for (const auto& [k, report] : runs) j[std::to_string(k)] = bench::to_json(report);
      write_file(dir / "sweep.csv", bench::sweep_csv(runs));
      write_file(dir / "sweep.json", dump(j));
      std::cout << bench::sweep_csv(runs);
      return 0;
    }
    if (loo->parsed()) {
      const auto entries =
          bench::leave_one_out(samples, graph, keywords_of(config), pipeline, rt->context());
      nlohmann::json j = nlohmann::json::array();
      for (const auto& e : entries) {
        j.push_back({{"keyword", e.keyword},
                     {"removed", e.removed},
                     {"remaining", e.remaining},
                     {"report", e.report ? bench::to_json(*e.report) : nlohmann::json()}});
      }
      write_file(dir / "loo.csv", bench::loo_csv(entries));
      write_file(dir / "loo.json", dump(j));
      std::cout << bench::loo_csv(entries);
      return 0;
    }
    if (evolve->parsed()) {
      const auto years = config.years.empty() ? bench::default_years() : config.years;
      const auto rows = bench::evolution_curve(samples, graph, years, pipeline, rt->context());
      nlohmann::json j = nlohmann::json::array();
      for (const auto& r : rows) {
        j.push_back({{"year", r.year}, {"triples", r.triples}, {"report", bench::to_json(r.report)}});
      }
      write_file(dir / "evolution.csv", bench::evolution_csv(rows));
      write_file(dir / "evolution.json", dump(j));
      std::cout << bench::evolution_csv(rows);
      return 0;
    }
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return exit_code_for(e);
  }
  return 4;
}

}  // namespace dalk::cli
