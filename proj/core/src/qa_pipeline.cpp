#include "dalk/qa_pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <mutex>
#include <regex>
#include <set>
#include <sstream>
#include <thread>

#include "dalk/error.hpp"
#include "dalk/text.hpp"

namespace dalk::qa {

namespace {

std::string letters_of(const QASample& sample) {
  std::string out;
  for (const auto& [letter, _] : sample.options) out += letter;
  return out;
}

std::optional<char> last_legal(std::string_view text, const std::regex& re,
                               std::string_view letters) {
  std::optional<char> found;
  const std::string s(text);
  for (std::sregex_iterator it(s.begin(), s.end(), re), end; it != end; ++it) {
    const char c = (*it)[1].str().front();
    if (letters.find(c) != std::string_view::npos) found = c;
  }
  return found;
}

std::string evidence_block(std::string_view label, const std::vector<std::string>& sentences) {
  std::string out;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    if (i == 0) out += "###";
    out += std::string(label) + " " + std::to_string(i + 1) + ": " + sentences[i] + "\n";
  }
  return out;
}

retrieval::RankedEvidence unranked(const sampler::EvidenceSubgraph& subgraph) {
  retrieval::RankedEvidence e;
  e.triples = subgraph.triples;
  e.retrieve_k = subgraph.triples.size();
  return e;
}

nlohmann::json evidence_json(const retrieval::RankedEvidence& e, const kg::KnowledgeGraph& graph) {
  nlohmann::json triples = nlohmann::json::array();
  for (auto t : e.triples) triples.push_back(kg::render_arrow(graph.triples().at(t)));
  return {{"triples", std::move(triples)},
          {"retrieve_k", e.retrieve_k},
          {"unmatched_lines", e.unmatched_lines}};
}

}  // namespace

Dataset Dataset::parse(std::string_view s) {
  const auto lower = text::to_lower_ascii(text::trim(s));
  if (lower == "medqa") return {Kind::MedQA, {}};
  if (lower == "medmcqa") return {Kind::MedMCQA, {}};
  if (lower == "mmlu") return {Kind::MMLU, {}};
  if (lower == "qa4mre") return {Kind::QA4MRE, {}};
  return {Kind::Other, text::trim(s)};
}

std::string Dataset::name() const {
  switch (kind) {
    case Kind::MedQA: return "MedQA";
    case Kind::MedMCQA: return "MedMCQA";
    case Kind::MMLU: return "MMLU";
    case Kind::QA4MRE: return "QA4MRE";
    case Kind::Other: break;
  }
  return other.empty() ? "Other" : other;
}

void validate(const QASample& sample) {
  auto fail = [&](const std::string& why) {
    throw Error(ErrorCode::InvalidSample, "sample '" + sample.id + "': " + why);
  };
  if (sample.id.empty()) fail("empty id");
  if (text::trim(sample.question).empty()) fail("empty question");
  if (sample.options.size() < 2 || sample.options.size() > 5) fail("needs 2-5 options");
  char expected = 'A';
  for (const auto& [letter, _] : sample.options) {
    if (letter != expected) fail(std::string("option letters must run from A, missing ") + expected);
    ++expected;
  }
  if (!sample.options.count(sample.gold)) fail(std::string("gold '") + sample.gold + "' is not an option");
}

QASample sample_from_json(const nlohmann::json& j) {
  QASample s;
  try {
    s.id = j.at("id").is_string() ? j.at("id").get<std::string>() : j.at("id").dump();
    s.dataset = Dataset::parse(j.value("dataset", std::string("Other")));
    s.question = j.at("question").get<std::string>();
    for (const auto& [key, value] : j.at("options").items()) {
      if (key.size() != 1) throw Error(ErrorCode::InvalidSample, "option key '" + key + "'");
      s.options[key[0]] = value.get<std::string>();
    }
    const auto gold = j.at("gold").get<std::string>();
    if (gold.size() != 1) throw Error(ErrorCode::InvalidSample, "gold '" + gold + "'");
    s.gold = gold[0];
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidSample, e.what());
  }
  validate(s);
  return s;
}

nlohmann::json to_json(const QASample& sample) {
  nlohmann::json options = nlohmann::json::object();
  for (const auto& [letter, text] : sample.options) options[std::string(1, letter)] = text;
  return {{"id", sample.id},
          {"dataset", sample.dataset.name()},
          {"question", sample.question},
          {"options", std::move(options)},
          {"gold", std::string(1, sample.gold)}};
}

std::vector<QASample> parse_samples_jsonl(std::string_view text) {
  std::vector<QASample> out;
  std::set<std::string> ids;
  std::size_t line_no = 0;
  for (const auto& line : text::split_lines(text)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    try {
      auto sample = sample_from_json(nlohmann::json::parse(line));
      if (!ids.insert(sample.id).second) {
        throw Error(ErrorCode::InvalidSample, "duplicate id '" + sample.id + "'");
      }
      out.push_back(std::move(sample));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::InvalidSample, "line " + std::to_string(line_no) + ": " + e.what());
    } catch (const Error& e) {
      throw Error(ErrorCode::InvalidSample, "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::vector<QASample> load_samples(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::EmptyInput, "cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_samples_jsonl(ss.str());
}

std::string render_options(const QASample& sample) {
  std::string out;
  for (const auto& [letter, text] : sample.options) {
    if (!out.empty()) out += '\n';
    out += std::string(1, letter) + ". " + text;
  }
  return out;
}

std::string render_question(const QASample& sample) {
  return sample.question + "\n" + render_options(sample);
}

Mode parse_mode(std::string_view s) {
  const auto lower = text::to_lower_ascii(s);
  if (lower == "dalk") return Mode::Dalk;
  if (lower == "no_self_retrieval" || lower == "no-self-retrieval") return Mode::NoSelfRetrieval;
  if (lower == "baseline") return Mode::Baseline;
  throw Error(ErrorCode::ConfigError, "unknown mode '" + std::string(s) + "'");
}

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::Dalk: return "dalk";
    case Mode::NoSelfRetrieval: return "no_self_retrieval";
    case Mode::Baseline: return "baseline";
  }
  return "?";
}

llm::LlmRequest build_inference_prompt(const QASample& sample, const EvidenceSentences& evidence,
                                       const LlmSettings& settings) {
  std::string block;
  if (!evidence.path.empty() || !evidence.neighbor.empty()) {
    block = "\nYou have some medical knowledge information in the following:\n" +
            evidence_block(sampler::evidence_label(sampler::SubgraphKind::PathBased),
                           evidence.path) +
            evidence_block(sampler::evidence_label(sampler::SubgraphKind::NeighborBased),
                           evidence.neighbor);
  }
  auto prompt = fill_template(settings.templates.inference,
                              {{"question", render_question(sample)}, {"evidence", block}});
  return settings.request(std::move(prompt), "inference");
}

std::optional<char> extract_answer(std::string_view text, std::string_view letters) {
  static const std::regex kAnswerIs(
      R"([Aa][Nn][Ss][Ww][Ee][Rr]\s+[Ii][Ss]\s*:?\s*\(?(?:[Oo]ption\s+)?([A-Z])(?![A-Za-z]))");
  static const std::regex kOption(R"(\(\s*[Oo]ption\s+([A-Z])\s*\))");
  static const std::regex kLineInitial(R"((?:^|\n)[ \t]*([A-Z])\.)");
  for (const auto* re : {&kAnswerIs, &kOption, &kLineInitial}) {
    if (auto c = last_legal(text, *re, letters)) return c;
  }
  return std::nullopt;
}

std::optional<char> extract_answer(std::string_view text, const QASample& sample) {
  return extract_answer(text, letters_of(sample));
}

nlohmann::json to_json(const Prediction& p, const kg::KnowledgeGraph& graph) {
  nlohmann::json j{
      {"sample_id", p.sample_id},
      {"predicted", p.predicted ? nlohmann::json(std::string(1, *p.predicted)) : nlohmann::json()},
      {"mode", std::string(to_string(p.mode))},
      {"status", p.status == Status::Ok ? "ok" : "failed"},
      {"fell_back_to_baseline", p.fell_back_to_baseline},
      {"raw_response", p.raw_response},
      {"evidence",
       {{"path", evidence_json(p.path_evidence, graph)},
        {"neighbor", evidence_json(p.neighbor_evidence, graph)}}},
      {"sentences", {{"path", p.sentences.path}, {"neighbor", p.sentences.neighbor}}},
      {"trace", p.trace},
  };
  if (p.status == Status::Failed) j["failure"] = p.failure;
  if (p.subgraphs) j["subgraphs"] = *p.subgraphs;
  return j;
}

Prediction answer(const QASample& sample, const kg::KnowledgeGraph& graph,
                  const PipelineConfig& config, const PipelineContext& context,
                  const AnswerOptions& options) {
  Prediction p;
  p.sample_id = sample.id;
  p.mode = config.mode;
  auto* trace = &p.trace;
  auto& gateway = context.gateway;

  try {
    if (config.mode != Mode::Baseline && !graph.empty()) {
      const auto entity_text =
          config.entities_from_options ? render_question(sample) : sample.question;
      const auto entities =
          sampler::extract_question_entities(entity_text, gateway, config.llm, trace);
      std::vector<kg::NodeId> seeds;
      if (!entities.empty()) {
        for (const auto& link :
             embed::link_entities(entities, graph, context.embedder, context.cache, config.link)) {
          seeds.push_back(link.linked_node);
        }
      }
      std::sort(seeds.begin(), seeds.end());
      seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());

      if (seeds.empty()) {
        p.fell_back_to_baseline = true;
      } else {
        const auto question = render_question(sample);
        auto path = sampler::prune(sampler::explore_paths(graph, seeds, config.sampler),
                                   config.sampler);
        auto neighbor = sampler::prune(
            sampler::explore_neighbors(graph, seeds, question, config.sampler, context.embedder,
                                       context.cache),
            config.sampler);

        if (config.mode == Mode::Dalk) {
          auto [pe, ne] = retrieval::retrieve(question, graph, path, neighbor, gateway,
                                              config.llm, config.retrieve, trace);
          p.path_evidence = std::move(pe);
          p.neighbor_evidence = std::move(ne);
        } else {
          p.path_evidence = unranked(path);
          p.neighbor_evidence = unranked(neighbor);
        }
        p.sentences.path =
            sampler::verbalize(sampler::SubgraphKind::PathBased,
                               sampler::materialize(graph, p.path_evidence.triples), gateway,
                               config.llm, trace)
                .sentences;
        p.sentences.neighbor =
            sampler::verbalize(sampler::SubgraphKind::NeighborBased,
                               sampler::materialize(graph, p.neighbor_evidence.triples), gateway,
                               config.llm, trace)
                .sentences;
        if (options.dump_subgraphs) {
          p.subgraphs = nlohmann::json{{"path", sampler::to_json(graph, path)},
                                       {"neighbor", sampler::to_json(graph, neighbor)}};
        }
      }
    }

    const auto request = build_inference_prompt(sample, p.sentences, config.llm);
    p.raw_response = llm::complete_traced(gateway, request, trace);
    p.predicted = extract_answer(p.raw_response, sample);
  } catch (const Error& e) {
    if (classify(e.code()) != ErrorClass::Provider) throw;
    p.status = Status::Failed;
    p.failure = e.what();
    p.predicted.reset();
  }
  return p;
}

std::vector<Prediction> answer_all(const std::vector<QASample>& samples,
                                   const kg::KnowledgeGraph& graph, const PipelineConfig& config,
                                   const PipelineContext& context, std::size_t workers,
                                   const AnswerOptions& options) {
  std::vector<Prediction> out(samples.size());
  if (samples.empty()) return out;
  if (workers == 0) workers = static_cast<std::size_t>(std::max(1, context.gateway.in_flight_limit()));
  workers = std::min(workers, samples.size());

  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (;;) {
          const auto i = next.fetch_add(1);
          if (i >= samples.size()) return;
          try {
            out[i] = answer(samples[i], graph, config, context, options);
          } catch (...) {
            std::lock_guard lock(error_mu);
            if (!error) error = std::current_exception();
            next.store(samples.size());
            return;
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace dalk::qa
