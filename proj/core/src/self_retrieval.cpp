#include "dalk/self_retrieval.hpp"

#include <algorithm>
#include <map>
#include <regex>
#include <set>

#include "dalk/error.hpp"
#include "dalk/text.hpp"

namespace dalk::retrieval {

namespace {

std::string clean_field(const std::string& s) {
  std::string out = text::normalize_name(s);
  while (!out.empty() && (out.back() == '.' || out.back() == ',' || out.back() == ';')) {
    out.pop_back();
  }
  return text::trim(out);
}

std::vector<std::string> split_arrows(const std::string& payload) {
  static const std::regex kArrow(R"(\s*(?:——>|—>|-->|->|→)\s*)");
  std::vector<std::string> parts;
  std::sregex_token_iterator it(payload.begin(), payload.end(), kArrow, -1);
  for (; it != std::sregex_token_iterator(); ++it) parts.push_back(clean_field(*it));
  return parts;
}

RankedEvidence rerank_one(const std::string& question, const kg::KnowledgeGraph& graph,
                          const std::vector<std::size_t>& candidates, std::size_t k,
                          llm::Gateway& gateway, const LlmSettings& settings,
                          std::vector<std::string>* trace) {
  if (candidates.empty()) {
    RankedEvidence empty;
    empty.retrieve_k = k;
    return empty;
  }
  auto request =
      build_rerank_prompt(question, sampler::materialize(graph, candidates), k, settings);
  return parse_rerank_output(llm::complete_traced(gateway, request, trace), graph, candidates, k);
}

}  // namespace

llm::LlmRequest build_rerank_prompt(const std::string& question,
                                    const std::vector<kg::Triple>& triples, std::size_t retrieve_k,
                                    const LlmSettings& settings) {
  if (triples.empty()) throw Error(ErrorCode::EmptySubgraph, "nothing to rerank");
  if (retrieve_k == 0) throw Error(ErrorCode::PreconditionViolation, "retrieve_k must be >= 1");
  std::string graph_lines;
  for (std::size_t i = 0; i < triples.size(); ++i) {
    if (i > 0) graph_lines += '\n';
    graph_lines += kg::render_arrow(triples[i]);
  }
  std::string format;
  for (std::size_t i = 1; i <= retrieve_k; ++i) {
    if (i > 1) format += '\n';
    format += "Reranked Triple" + std::to_string(i) + ": xxx ——> xxx";
  }
  auto prompt = fill_template(settings.templates.rerank, {{"graph", graph_lines},
                                                          {"question", question},
                                                          {"k", std::to_string(retrieve_k)},
                                                          {"format", format}});
  return settings.request(std::move(prompt), "self_retrieve");
}

RankedEvidence parse_rerank_output(std::string_view text, const kg::KnowledgeGraph& graph,
                                   const std::vector<std::size_t>& candidates,
                                   std::size_t retrieve_k) {
  static const std::regex kLine(R"(^\s*Reranked Triples?\s*(\d+)\s*:\s*(.*)$)", std::regex::icase);

  RankedEvidence out;
  out.retrieve_k = retrieve_k;
  out.raw_response = std::string(text);

  std::map<std::tuple<std::string, std::string, std::string>, std::size_t> by_triple;
  std::map<std::pair<std::string, std::string>, std::size_t> by_pair;
  for (auto index : candidates) {
    const auto& t = graph.triples().at(index);
    by_triple.emplace(std::make_tuple(clean_field(t.head), clean_field(t.relation),
                                      clean_field(t.tail)),
                      index);
    by_pair.emplace(std::make_pair(clean_field(t.head), clean_field(t.tail)), index);
  }

  std::vector<std::pair<unsigned long, std::string>> lines;
  for (const auto& line : text::split_lines(text)) {
    std::smatch m;
    if (!std::regex_match(line, m, kLine)) continue;
    unsigned long rank = 0;
    try {
      rank = std::stoul(m.str(1));
    } catch (const std::exception&) {
      rank = ~0UL;
    }
    lines.emplace_back(rank, m.str(2));
  }
  std::stable_sort(lines.begin(), lines.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });

  std::set<std::size_t> chosen;
  for (const auto& [rank, payload] : lines) {
    if (out.triples.size() >= retrieve_k) break;
    const auto parts = split_arrows(payload);
    std::optional<std::size_t> match;
    if (parts.size() == 3) {
      auto it = by_triple.find(std::make_tuple(parts[0], parts[1], parts[2]));
      if (it != by_triple.end()) match = it->second;
    }
    if (!match && (parts.size() == 2 || parts.size() == 3)) {
      auto it = by_pair.find(std::make_pair(parts.front(), parts.back()));
      if (it != by_pair.end()) match = it->second;
    }
    if (!match) {
      ++out.unmatched_lines;
      continue;
    }
    if (chosen.insert(*match).second) out.triples.push_back(*match);
  }
  out.warning = out.triples.empty();
  return out;
}

std::pair<RankedEvidence, RankedEvidence> retrieve(const std::string& question,
                                                   const kg::KnowledgeGraph& graph,
                                                   const sampler::EvidenceSubgraph& path,
                                                   const sampler::EvidenceSubgraph& neighbor,
                                                   llm::Gateway& gateway,
                                                   const LlmSettings& settings,
                                                   const RetrieveOptions& options,
                                                   std::vector<std::string>* trace) {
  const std::size_t k = options.retrieve_k;
  if (!options.joint) {
    auto p = rerank_one(question, graph, path.triples, k, gateway, settings, trace);
    auto n = rerank_one(question, graph, neighbor.triples, k, gateway, settings, trace);
    return {std::move(p), std::move(n)};
  }

  std::vector<std::size_t> all = path.triples;
  const std::set<std::size_t> in_path(path.triples.begin(), path.triples.end());
  for (auto t : neighbor.triples) {
    if (!in_path.count(t)) all.push_back(t);
  }
  auto joint = rerank_one(question, graph, all, k, gateway, settings, trace);
  RankedEvidence p = joint;
  RankedEvidence n = joint;
  p.triples.clear();
  n.triples.clear();
  for (auto t : joint.triples) (in_path.count(t) ? p : n).triples.push_back(t);
  p.warning = p.triples.empty();
  n.warning = n.triples.empty();
  return {std::move(p), std::move(n)};
}

}  // namespace dalk::retrieval
