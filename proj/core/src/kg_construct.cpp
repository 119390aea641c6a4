#include "dalk/kg_construct.hpp"

#include <regex>
#include <set>

#include <spdlog/spdlog.h>

#include "dalk/error.hpp"
#include "dalk/text.hpp"

namespace dalk::construct {

namespace {

std::string document_text(const corpus::AnnotatedDocument& doc, const ConstructOptions& o) {
  return o.include_title ? doc.full_text() : doc.abstract_text;
}

std::string join(const std::vector<std::string>& items, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += sep;
    out += items[i];
  }
  return out;
}

// Distinct entities (first mention wins) in mention order.
std::vector<const corpus::EntityMention*> distinct_mentions(const corpus::AnnotatedDocument& doc) {
  std::vector<const corpus::EntityMention*> out;
  std::set<std::string> seen;
  for (const auto& m : doc.mentions) {
    auto key = text::normalize_name(m.surface);
    if (key.empty()) continue;
    if (seen.insert(std::move(key)).second) out.push_back(&m);
  }
  return out;
}

// Splits on newlines and on commas that are not nested in (), [] or {}.
std::vector<std::string> split_top_level(std::string_view s) {
  std::vector<std::string> parts;
  std::string current;
  int depth = 0;
  for (char c : s) {
    if (c == '(' || c == '[' || c == '{') ++depth;
    if ((c == ')' || c == ']' || c == '}') && depth > 0) --depth;
    if (c == '\n' || (c == ',' && depth == 0)) {
      parts.push_back(std::move(current));
      current.clear();
      continue;
    }
    current.push_back(c);
  }
  parts.push_back(std::move(current));
  return parts;
}

std::string strip_candidate(std::string s) {
  s = text::trim(s);
  // List markers: "-", "*", "1.", "2)".
  static const std::regex kMarker(R"(^(?:[-*]|\d+[.)])\s+)");
  s = std::regex_replace(s, kMarker, "", std::regex_constants::format_first_only);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return text::trim(s);
}

std::string strip_quotes(std::string s) {
  s = text::trim(s);
  while (!s.empty() && (s.front() == '"' || s.front() == '\'')) s.erase(s.begin());
  while (!s.empty() && (s.back() == '"' || s.back() == '\'' || s.back() == '.')) s.pop_back();
  return text::trim(s);
}

kg::Triple stamp(std::string head, std::string relation, std::string tail,
                 const corpus::AnnotatedDocument& doc, kg::Method method) {
  kg::Triple t;
  t.head = std::move(head);
  t.relation = std::move(relation);
  t.tail = std::move(tail);
  t.source_doc = doc.doc_id;
  t.year = doc.year.value_or(0);
  t.method = method;
  return kg::tidy(std::move(t));
}

// Free-text predicate following the "others" letter: at most five words.
std::string others_predicate(std::string_view rest) {
  std::string s(rest.substr(0, rest.find('\n')));
  s = text::trim(s);
  static const std::regex kLead(R"(^[.:)\s]*(?:others?\b)?[\s,:;.-]*(?:please specify[^:]*:)?\s*)",
                                std::regex::icase);
  s = std::regex_replace(s, kLead, "", std::regex_constants::format_first_only);
  s = strip_quotes(s);
  std::vector<std::string> words;
  for (auto& w : text::split(text::collapse_whitespace(s), ' ')) {
    if (!w.empty()) words.push_back(w);
    if (words.size() == 5) break;
  }
  return join(words, " ");
}

}  // namespace

std::string_view to_string(HetionetType type) {
  switch (type) {
    case HetionetType::Genes: return "genes";
    case HetionetType::Compounds: return "compounds";
    case HetionetType::Diseases: return "diseases";
  }
  return "?";
}

const std::vector<TypeMatchEntry>& type_match_table() {
  static const std::vector<TypeMatchEntry> kTable = {
      {"Gene", HetionetType::Genes},
      {"Chemical", HetionetType::Compounds},
      {"Disease", HetionetType::Diseases},
  };
  return kTable;
}

const std::vector<RelationCandidateEntry>& relation_candidate_table() {
  static const std::vector<RelationCandidateEntry> kTable = {
      {"genes-genes", HetionetType::Genes, HetionetType::Genes,
       {"covaries", "interacts", "regulates"}},
      {"disease-disease", HetionetType::Diseases, HetionetType::Diseases, {"resembles"}},
      {"compounds-compounds", HetionetType::Compounds, HetionetType::Compounds, {"resembles"}},
      {"genes-diseases", HetionetType::Genes, HetionetType::Diseases,
       {"downregulates", "associates", "upregulates"}},
      {"genes-compounds", HetionetType::Genes, HetionetType::Compounds,
       {"binds", "upregulates", "downregulates"}},
      {"compounds-diseases", HetionetType::Compounds, HetionetType::Diseases,
       {"treats", "palliates"}},
  };
  return kTable;
}

std::optional<HetionetType> map_type(const corpus::EntityType& type) {
  const std::string name = type.name();
  for (const auto& e : type_match_table()) {
    if (type.kind != corpus::EntityType::Kind::Other && e.pubtator == name) return e.hetionet;
  }
  return std::nullopt;
}

std::optional<std::vector<std::string>> relation_candidates(HetionetType a, HetionetType b) {
  for (const auto& e : relation_candidate_table()) {
    if ((e.first == a && e.second == b) || (e.first == b && e.second == a)) {
      return std::vector<std::string>(e.relations.begin(), e.relations.end());
    }
  }
  return std::nullopt;
}

std::vector<std::string> entity_names(const corpus::AnnotatedDocument& doc) {
  std::vector<std::string> names;
  for (const auto* m : distinct_mentions(doc)) names.push_back(text::collapse_whitespace(m->surface));
  return names;
}

llm::LlmRequest build_generative_prompt(const corpus::AnnotatedDocument& doc,
                                        const ConstructOptions& options) {
  const auto names = entity_names(doc);
  if (names.size() < 2) {
    throw Error(ErrorCode::TooFewEntities,
                "doc " + doc.doc_id + " has " + std::to_string(names.size()) + " entities");
  }
  auto prompt = fill_template(options.llm.templates.generative,
                              {{"abstract", document_text(doc, options)},
                               {"entities", join(names, ", ")}});
  return options.llm.request(std::move(prompt), "re_generative");
}

GenerativeParse parse_generative_output(std::string_view text,
                                        const corpus::AnnotatedDocument& doc) {
  GenerativeParse out;
  for (auto& raw : split_top_level(text)) {
    std::string candidate = strip_candidate(raw);
    if (candidate.empty()) continue;
    ++out.candidates;
    auto fields = text::split(candidate, '|');
    if (fields.size() != 3) {
      ++out.rejected;
      continue;
    }
    auto t = stamp(strip_quotes(fields[0]), strip_quotes(fields[1]), strip_quotes(fields[2]),
                   doc, kg::Method::Generative);
    if (!kg::is_valid(t)) {
      ++out.rejected;
      continue;
    }
    out.triples.push_back(std::move(t));
  }
  return out;
}

PairEnumeration enumerate_pairs(const corpus::AnnotatedDocument& doc) {
  PairEnumeration out;
  const auto entities = distinct_mentions(doc);
  for (std::size_t i = 0; i < entities.size(); ++i) {
    for (std::size_t j = i + 1; j < entities.size(); ++j) {
      const auto a = map_type(entities[i]->entity_type);
      const auto b = map_type(entities[j]->entity_type);
      std::optional<std::vector<std::string>> candidates;
      if (a && b) candidates = relation_candidates(*a, *b);
      if (!candidates) {
        ++out.excluded;
        continue;
      }
      out.pairs.push_back(EntityPair{*entities[i], *entities[j], std::move(*candidates)});
    }
  }
  return out;
}

std::string render_pair_options(const std::vector<std::string>& candidates) {
  std::vector<std::string> options = candidates;
  options.emplace_back(kNoRelation);
  options.emplace_back(kOthersOption);
  std::string out;
  for (std::size_t i = 0; i < options.size(); ++i) {
    if (i > 0) out += ' ';
    out += static_cast<char>('A' + i);
    out += ". " + options[i];
  }
  return out;
}

llm::LlmRequest build_pairwise_prompt(const EntityPair& pair,
                                      const corpus::AnnotatedDocument& doc,
                                      const ConstructOptions& options) {
  if (pair.candidates.empty()) {
    throw Error(ErrorCode::PreconditionViolation, "pair has no candidate relations");
  }
  if (pair.candidates.size() + 2 > 26) {
    throw Error(ErrorCode::PreconditionViolation, "too many candidate relations");
  }
  auto prompt = fill_template(
      options.llm.templates.pairwise,
      {{"abstract", document_text(doc, options)},
       {"entities", join(entity_names(doc), ", ")},
       {"head", text::collapse_whitespace(pair.head.surface)},
       {"tail", text::collapse_whitespace(pair.tail.surface)},
       {"head_type", pair.head.entity_type.name()},
       {"tail_type", pair.tail.entity_type.name()},
       {"options", render_pair_options(pair.candidates)}});
  return options.llm.request(std::move(prompt), "re_pairwise");
}

PairwiseParse parse_pairwise_output(std::string_view text, const EntityPair& pair,
                                    const corpus::AnnotatedDocument& doc) {
  static const std::regex kAnswer(R"([Aa]nswer [Ii]s\s*:?\s*\(?([A-Z])(?![A-Za-z]))");
  const std::string s(text);
  std::smatch last;
  bool found = false;
  for (auto it = std::sregex_iterator(s.begin(), s.end(), kAnswer); it != std::sregex_iterator();
       ++it) {
    last = *it;
    found = true;
  }
  PairwiseParse out;
  if (!found) {
    out.warning = true;
    return out;
  }
  const std::size_t index = static_cast<std::size_t>(last.str(1)[0] - 'A');
  const std::size_t no_relation = pair.candidates.size();
  const std::size_t others = no_relation + 1;
  if (index < no_relation) {
    out.triple = stamp(pair.head.surface, pair.candidates[index], pair.tail.surface, doc,
                       kg::Method::PairWise);
  } else if (index == others) {
    const auto pos = static_cast<std::size_t>(last.position(0) + last.length(0));
    auto predicate = others_predicate(std::string_view(s).substr(pos));
    if (predicate.empty()) {
      out.warning = true;
      return out;
    }
    out.triple = stamp(pair.head.surface, predicate, pair.tail.surface, doc, kg::Method::PairWise);
    out.triple->generated = true;
  } else if (index != no_relation) {
    out.warning = true;
  }
  if (out.triple && !kg::is_valid(*out.triple)) {
    out.triple.reset();
    out.warning = true;
  }
  return out;
}

nlohmann::json to_json(const BuildReport& r) {
  return nlohmann::json{{"method", std::string(kg::to_string(r.method))},
                        {"documents", r.documents},
                        {"documents_processed", r.documents_processed},
                        {"documents_skipped", r.documents_skipped},
                        {"requests", r.requests},
                        {"raw_candidates", r.raw_candidates},
                        {"triples_extracted", r.triples_extracted},
                        {"triples_kept", r.triples_kept},
                        {"rejected", r.rejected},
                        {"warnings", r.warnings},
                        {"excluded_pairs", r.excluded_pairs}};
}

BuildResult construct_kg(const std::vector<corpus::AnnotatedDocument>& docs, kg::Method method,
                         llm::Gateway& gateway, const ConstructOptions& options) {
  BuildReport report;
  report.method = method;
  report.documents = docs.size();

  struct Job {
    const corpus::AnnotatedDocument* doc;
    std::optional<EntityPair> pair;
  };
  std::vector<Job> jobs;
  std::vector<llm::LlmRequest> requests;

  for (const auto& doc : docs) {
    if (!doc.year) throw Error(ErrorCode::MissingYear, doc.doc_id);
    if (method == kg::Method::Generative) {
      if (entity_names(doc).size() < 2) {
        ++report.documents_skipped;
        continue;
      }
      requests.push_back(build_generative_prompt(doc, options));
      jobs.push_back(Job{&doc, std::nullopt});
    } else {
      auto enumeration = enumerate_pairs(doc);
      report.excluded_pairs += enumeration.excluded;
      if (enumeration.pairs.empty()) {
        ++report.documents_skipped;
        continue;
      }
      for (auto& pair : enumeration.pairs) {
        requests.push_back(build_pairwise_prompt(pair, doc, options));
        jobs.push_back(Job{&doc, std::move(pair)});
      }
    }
    ++report.documents_processed;
  }
  report.requests = requests.size();

  const auto responses = gateway.complete_batch(requests);

  std::vector<kg::Triple> triples;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const auto& job = jobs[i];
    if (!job.pair) {
      auto parsed = parse_generative_output(responses[i], *job.doc);
      report.raw_candidates += parsed.candidates;
      report.rejected += parsed.rejected;
      if (parsed.rejected > 0) {
        spdlog::debug("doc {}: {} malformed generative segments", job.doc->doc_id,
                      parsed.rejected);
      }
      for (auto& t : parsed.triples) triples.push_back(std::move(t));
    } else {
      ++report.raw_candidates;
      auto parsed = parse_pairwise_output(responses[i], *job.pair, *job.doc);
      if (parsed.warning) {
        ++report.warnings;
        spdlog::debug("doc {}: unparseable pair-wise answer for ({}, {})", job.doc->doc_id,
                      job.pair->head.surface, job.pair->tail.surface);
      }
      if (parsed.triple) triples.push_back(std::move(*parsed.triple));
    }
  }
  report.triples_extracted = triples.size();
  BuildResult result{kg::KnowledgeGraph::from_triples(std::move(triples)), report};
  result.report.triples_kept = result.graph.triples().size();
  return result;
}

}  // namespace dalk::construct
