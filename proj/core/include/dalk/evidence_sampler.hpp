#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dalk/embed_link.hpp"
#include "dalk/kg_store.hpp"
#include "dalk/llm_gateway.hpp"
#include "dalk/prompts.hpp"

namespace dalk::sampler {

struct SamplerConfig {
  int hop_bound = 2;                      // path exploration depth
  double relevance_threshold = 0.5;       // second-hop cutoff for neighbor exploration
  std::size_t max_triples_per_subgraph = 40;

  // Throws ConfigError.
  void validate() const;
};

enum class SubgraphKind { PathBased, NeighborBased };

std::string_view to_string(SubgraphKind kind);

// A connected chain: nodes[i] and nodes[i + 1] are joined by triples[i].
struct PathSegment {
  std::vector<kg::NodeId> nodes;
  std::vector<std::size_t> triples;

  friend bool operator==(const PathSegment&, const PathSegment&) = default;
};

enum class Tier : std::uint8_t { SeedAdjacent = 0, Expanded = 1 };

struct EvidenceSubgraph {
  SubgraphKind kind = SubgraphKind::PathBased;
  std::vector<PathSegment> segments;  // path-based only
  std::vector<std::size_t> triples;   // unique triple indices in priority order
  std::vector<Tier> tiers;            // neighbor-based only, parallel to `triples`
  std::optional<std::vector<std::string>> verbalized;

  friend bool operator==(const EvidenceSubgraph&, const EvidenceSubgraph&) = default;
};

// Comma / newline separated names, trimmed, list markers stripped, deduped by
// normalized name.
std::vector<std::string> parse_entity_list(std::string_view text);

std::vector<std::string> extract_question_entities(const std::string& question,
                                                   llm::Gateway& gateway,
                                                   const LlmSettings& settings,
                                                   std::vector<std::string>* trace = nullptr);

// Chains the seeds together through bounded-hop paths on the undirected view.
//
// Start at the smallest seed; repeatedly BFS up to hop_bound for the nearest
// remaining seed (ties: distance, then smallest target, then the smallest
// (node, triple) step sequence) and extend the current segment to it. When nothing is reachable the segment closes and the smallest remaining
// seed starts a new one.
EvidenceSubgraph explore_paths(const kg::KnowledgeGraph& graph,
                               const std::vector<kg::NodeId>& seeds,
                               const SamplerConfig& config);

// Similarity of a node to the question, compared against the threshold.
using RelevanceFn = std::function<double(kg::NodeId)>;

// All 1-hop triples of every seed, plus the 1-hop triples of each non-seed
// neighbor whose relevance reaches the threshold.
EvidenceSubgraph explore_neighbors(const kg::KnowledgeGraph& graph,
                                   const std::vector<kg::NodeId>& seeds,
                                   const RelevanceFn& relevance, const SamplerConfig& config);

// Relevance = cosine(embed(node name), embed(question)); 0 when either
// embedding is the zero vector.
EvidenceSubgraph explore_neighbors(const kg::KnowledgeGraph& graph,
                                   const std::vector<kg::NodeId>& seeds,
                                   const std::string& question, const SamplerConfig& config,
                                   embed::EmbeddingProvider& provider,
                                   embed::EmbeddingCache& cache);

// Dedupes and truncates to max_triples_per_subgraph by priority: segment
// order for path-based, (tier, triple index) for neighbor-based. Idempotent.
EvidenceSubgraph prune(EvidenceSubgraph subgraph, const SamplerConfig& config);

std::vector<kg::Triple> materialize(const kg::KnowledgeGraph& graph,
                                    const std::vector<std::size_t>& triple_indices);

// "Path-based Evidence" / "Neighbor-based Evidence".
std::string_view evidence_label(SubgraphKind kind);

// "'head' relation 'tail'."
std::string fallback_sentence(const kg::Triple& t);

// Sentences from "<Kind>-based Evidence N: ..." lines; continuation lines are
// folded into the previous sentence.
std::vector<std::string> parse_verbalized(std::string_view text);

struct Verbalization {
  std::vector<std::string> sentences;
  bool used_fallback = false;
};

// No LLM call for an empty triple list.
Verbalization verbalize(SubgraphKind kind, const std::vector<kg::Triple>& triples,
                        llm::Gateway& gateway, const LlmSettings& settings,
                        std::vector<std::string>* trace = nullptr);

nlohmann::json to_json(const kg::KnowledgeGraph& graph, const EvidenceSubgraph& subgraph);

}  // namespace dalk::sampler
