#include "dalk/evidence_sampler.hpp"

#include <algorithm>
#include <map>
#include <regex>
#include <set>

#include "dalk/error.hpp"
#include "dalk/text.hpp"

namespace dalk::sampler {

namespace {

constexpr int kUnreached = -1;

// Bounded BFS over the undirected view. Distances for touched nodes only.
class BoundedBfs {
 public:
  explicit BoundedBfs(const kg::KnowledgeGraph& graph)
      : graph_(graph), dist_(graph.nodes().size(), kUnreached) {}

  void run(kg::NodeId source, int bound) {
    for (auto id : touched_) dist_[id] = kUnreached;
    touched_.clear();
    dist_[source] = 0;
    touched_.push_back(source);
    std::size_t head = 0;
    while (head < touched_.size()) {
      const kg::NodeId u = touched_[head++];
      if (dist_[u] == bound) continue;
      for (const auto& e : graph_.incident_edges(u)) {
        if (dist_[e.neighbor] != kUnreached) continue;
        dist_[e.neighbor] = dist_[u] + 1;
        touched_.push_back(e.neighbor);
      }
    }
  }

  int dist(kg::NodeId id) const { return dist_[id]; }

 private:
  const kg::KnowledgeGraph& graph_;
  std::vector<int> dist_;
  std::vector<kg::NodeId> touched_;
};

std::vector<kg::NodeId> checked_seeds(const kg::KnowledgeGraph& graph,
                                      const std::vector<kg::NodeId>& seeds) {
  if (seeds.empty()) throw Error(ErrorCode::PreconditionViolation, "no seeds given");
  for (auto s : seeds) {
    if (s >= graph.nodes().size()) {
      throw Error(ErrorCode::UnknownSeed, "node id " + std::to_string(s));
    }
  }
  std::vector<kg::NodeId> sorted = seeds;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  return sorted;
}

std::string strip_list_marker(std::string s) {
  static const std::regex kMarker(R"(^(?:[-*]|\d+[.)])\s*)");
  s = std::regex_replace(text::trim(s), kMarker, "", std::regex_constants::format_first_only);
  s = text::trim(s);
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) {
    s = s.substr(1, s.size() - 2);
  }
  while (!s.empty() && s.back() == '.') s.pop_back();
  return text::trim(s);
}

bool is_zero(const embed::EmbeddingVector& v) {
  return std::all_of(v.values.begin(), v.values.end(), [](double x) { return x == 0.0; });
}

}  // namespace

void SamplerConfig::validate() const {
  if (hop_bound < 1) throw Error(ErrorCode::ConfigError, "hop_bound must be >= 1");
  if (!(relevance_threshold >= -1.0 && relevance_threshold <= 1.01)) {
    // Values just above 1 disable the second hop; keep that escape hatch.
    throw Error(ErrorCode::ConfigError, "relevance_threshold outside [-1, 1.01]");
  }
  if (max_triples_per_subgraph < 1) {
    throw Error(ErrorCode::ConfigError, "max_triples_per_subgraph must be >= 1");
  }
}

std::string_view to_string(SubgraphKind kind) {
  return kind == SubgraphKind::PathBased ? "path" : "neighbor";
}

std::vector<std::string> parse_entity_list(std::string_view text) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  std::string normalized_text(text);
  std::replace(normalized_text.begin(), normalized_text.end(), '\n', ',');
  for (auto& part : text::split(normalized_text, ',')) {
    auto name = strip_list_marker(part);
    auto key = text::normalize_name(name);
    if (key.empty() || !seen.insert(key).second) continue;
    out.push_back(text::collapse_whitespace(name));
  }
  return out;
}

std::vector<std::string> extract_question_entities(const std::string& question,
                                                   llm::Gateway& gateway,
                                                   const LlmSettings& settings,
                                                   std::vector<std::string>* trace) {
  auto request = settings.request(
      fill_template(settings.templates.entity_extract, {{"question", question}}),
      "entity_extract");
  return parse_entity_list(llm::complete_traced(gateway, request, trace));
}

EvidenceSubgraph explore_paths(const kg::KnowledgeGraph& graph,
                               const std::vector<kg::NodeId>& seeds,
                               const SamplerConfig& config) {
  config.validate();
  std::vector<kg::NodeId> candidates = checked_seeds(graph, seeds);

  EvidenceSubgraph out;
  out.kind = SubgraphKind::PathBased;
  BoundedBfs from_start(graph);
  BoundedBfs from_target(graph);

  kg::NodeId start = candidates.front();
  candidates.erase(candidates.begin());
  PathSegment segment{{start}, {}};

  while (!candidates.empty()) {
    from_start.run(start, config.hop_bound);
    std::optional<kg::NodeId> target;
    for (auto c : candidates) {  // ascending, so '<' keeps the smallest on ties
      const int d = from_start.dist(c);
      if (d == kUnreached) continue;
      if (!target || d < from_start.dist(*target)) target = c;
    }
    if (!target) {
      out.segments.push_back(std::move(segment));
      start = candidates.front();
      candidates.erase(candidates.begin());
      segment = PathSegment{{start}, {}};
      continue;
    }

    // Walk forward choosing the smallest (node, triple) that stays on a
    // shortest path to the target.
    const int length = from_start.dist(*target);
    from_target.run(*target, length);
    kg::NodeId u = start;
    for (int step = 0; step < length; ++step) {
      std::optional<std::pair<kg::NodeId, std::size_t>> best;
      for (const auto& e : graph.incident_edges(u)) {
        if (from_start.dist(e.neighbor) != step + 1) continue;
        if (from_target.dist(e.neighbor) != length - step - 1) continue;
        const auto option = std::make_pair(e.neighbor, e.triple);
        if (!best || option < *best) best = option;
      }
      segment.nodes.push_back(best->first);
      segment.triples.push_back(best->second);
      u = best->first;
    }
    start = *target;
    candidates.erase(std::find(candidates.begin(), candidates.end(), *target));
  }
  out.segments.push_back(std::move(segment));

  std::set<std::size_t> seen;
  for (const auto& s : out.segments) {
    for (auto t : s.triples) {
      if (seen.insert(t).second) out.triples.push_back(t);
    }
  }
  return out;
}

EvidenceSubgraph explore_neighbors(const kg::KnowledgeGraph& graph,
                                   const std::vector<kg::NodeId>& seeds,
                                   const RelevanceFn& relevance, const SamplerConfig& config) {
  config.validate();
  const auto seed_list = checked_seeds(graph, seeds);
  const std::set<kg::NodeId> seed_set(seed_list.begin(), seed_list.end());

  std::set<std::size_t> first_hop;
  std::set<kg::NodeId> neighbors;
  for (auto s : seed_list) {
    for (const auto& e : graph.incident_edges(s)) {
      first_hop.insert(e.triple);
      if (!seed_set.count(e.neighbor)) neighbors.insert(e.neighbor);
    }
  }
  std::set<std::size_t> expanded;
  for (auto n : neighbors) {
    if (relevance(n) < config.relevance_threshold) continue;
    for (const auto& e : graph.incident_edges(n)) {
      if (!first_hop.count(e.triple)) expanded.insert(e.triple);
    }
  }

  EvidenceSubgraph out;
  out.kind = SubgraphKind::NeighborBased;
  for (auto t : first_hop) {
    out.triples.push_back(t);
    out.tiers.push_back(Tier::SeedAdjacent);
  }
  for (auto t : expanded) {
    out.triples.push_back(t);
    out.tiers.push_back(Tier::Expanded);
  }
  return out;
}

EvidenceSubgraph explore_neighbors(const kg::KnowledgeGraph& graph,
                                   const std::vector<kg::NodeId>& seeds,
                                   const std::string& question, const SamplerConfig& config,
                                   embed::EmbeddingProvider& provider,
                                   embed::EmbeddingCache& cache) {
  const auto nodes = cache.node_embeddings(graph, provider);
  const auto q = cache.get(provider, {question}).front();
  const bool q_zero = is_zero(q);
  auto relevance = [&](kg::NodeId id) {
    const auto& v = (*nodes)[id];
    if (q_zero || is_zero(v)) return 0.0;
    return embed::cosine(v, q);
  };
  return explore_neighbors(graph, seeds, relevance, config);
}

EvidenceSubgraph prune(EvidenceSubgraph subgraph, const SamplerConfig& config) {
  const std::size_t cap = config.max_triples_per_subgraph;
  if (subgraph.kind == SubgraphKind::PathBased) {
    std::vector<std::size_t> flat;
    std::set<std::size_t> seen;
    for (const auto& s : subgraph.segments) {
      for (auto t : s.triples) {
        if (seen.insert(t).second) flat.push_back(t);
      }
    }
    if (flat.size() > cap) flat.resize(cap);
    const std::set<std::size_t> kept(flat.begin(), flat.end());
    for (auto& s : subgraph.segments) {
      std::size_t keep = 0;
      while (keep < s.triples.size() && kept.count(s.triples[keep])) ++keep;
      s.triples.resize(keep);
      s.nodes.resize(keep + 1);
    }
    subgraph.triples = std::move(flat);
    return subgraph;
  }

  std::vector<std::pair<Tier, std::size_t>> items;
  std::set<std::size_t> seen;
  for (std::size_t i = 0; i < subgraph.triples.size(); ++i) {
    const Tier tier = i < subgraph.tiers.size() ? subgraph.tiers[i] : Tier::Expanded;
    if (seen.insert(subgraph.triples[i]).second) items.emplace_back(tier, subgraph.triples[i]);
  }
  std::sort(items.begin(), items.end());
  if (items.size() > cap) items.resize(cap);
  subgraph.triples.clear();
  subgraph.tiers.clear();
  for (const auto& [tier, t] : items) {
    subgraph.tiers.push_back(tier);
    subgraph.triples.push_back(t);
  }
  return subgraph;
}

std::vector<kg::Triple> materialize(const kg::KnowledgeGraph& graph,
                                    const std::vector<std::size_t>& triple_indices) {
  std::vector<kg::Triple> out;
  out.reserve(triple_indices.size());
  for (auto i : triple_indices) out.push_back(graph.triples().at(i));
  return out;
}

std::string_view evidence_label(SubgraphKind kind) {
  return kind == SubgraphKind::PathBased ? "Path-based Evidence" : "Neighbor-based Evidence";
}

std::string fallback_sentence(const kg::Triple& t) {
  return "'" + t.head + "' " + t.relation + " '" + t.tail + "'.";
}

std::vector<std::string> parse_verbalized(std::string_view text) {
  static const std::regex kLine(R"(^\s*(?:Path|Neighbor)-based Evidence\s*\d+\s*:\s*(.*)$)",
                                std::regex::icase);
  std::vector<std::string> sentences;
  bool open = false;
  for (const auto& line : text::split_lines(text)) {
    std::smatch m;
    if (std::regex_match(line, m, kLine)) {
      sentences.push_back(text::trim(m.str(1)));
      open = true;
      continue;
    }
    const auto trimmed = text::trim(line);
    if (trimmed.empty()) {
      open = false;
    } else if (open) {
      sentences.back() += (sentences.back().empty() ? "" : " ") + trimmed;
    }
  }
  sentences.erase(std::remove_if(sentences.begin(), sentences.end(),
                                 [](const std::string& s) { return s.empty(); }),
                  sentences.end());
  return sentences;
}

Verbalization verbalize(SubgraphKind kind, const std::vector<kg::Triple>& triples,
                        llm::Gateway& gateway, const LlmSettings& settings,
                        std::vector<std::string>* trace) {
  Verbalization out;
  if (triples.empty()) return out;
  std::string graph_lines;
  for (std::size_t i = 0; i < triples.size(); ++i) {
    if (i > 0) graph_lines += '\n';
    graph_lines += kg::render_arrow(triples[i]);
  }
  auto request = settings.request(
      fill_template(settings.templates.verbalize,
                    {{"graph", graph_lines}, {"label", std::string(evidence_label(kind))}}),
      "verbalize");
  out.sentences = parse_verbalized(llm::complete_traced(gateway, request, trace));
  if (out.sentences.empty()) {
    out.used_fallback = true;
    for (const auto& t : triples) out.sentences.push_back(fallback_sentence(t));
  }
  return out;
}

nlohmann::json to_json(const kg::KnowledgeGraph& graph, const EvidenceSubgraph& subgraph) {
  nlohmann::json j;
  j["kind"] = std::string(to_string(subgraph.kind));
  nlohmann::json segments = nlohmann::json::array();
  for (const auto& s : subgraph.segments) {
    nlohmann::json nodes = nlohmann::json::array();
    for (auto n : s.nodes) nodes.push_back(graph.node(n).display);
    nlohmann::json edges = nlohmann::json::array();
    for (auto t : s.triples) edges.push_back(kg::render_arrow(graph.triples().at(t)));
    segments.push_back({{"nodes", std::move(nodes)}, {"triples", std::move(edges)}});
  }
  j["segments"] = std::move(segments);
  nlohmann::json triples = nlohmann::json::array();
  for (std::size_t i = 0; i < subgraph.triples.size(); ++i) {
    nlohmann::json item{{"triple", kg::render_arrow(graph.triples().at(subgraph.triples[i]))}};
    if (i < subgraph.tiers.size()) {
      item["tier"] = subgraph.tiers[i] == Tier::SeedAdjacent ? "seed" : "expanded";
    }
    triples.push_back(std::move(item));
  }
  j["triples"] = std::move(triples);
  j["sentences"] = subgraph.verbalized ? nlohmann::json(*subgraph.verbalized) : nlohmann::json(nullptr);
  return j;
}

}  // namespace dalk::sampler
