#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "dalk/evidence_sampler.hpp"
#include "dalk/kg_store.hpp"

namespace dalk::testing {

// Endpoints recomputed from the raw triple list by name lookup.
struct RawEdge {
  kg::NodeId head = 0;
  kg::NodeId tail = 0;
};

std::vector<RawEdge> raw_edges(const kg::KnowledgeGraph& graph);

// Seed chaining by exhaustive enumeration of simple walks of length
// <= hop_bound, keyed on (length, target, (node, triple) step sequence).
sampler::EvidenceSubgraph path_oracle(const kg::KnowledgeGraph& graph,
                                      std::vector<kg::NodeId> seeds, int hop_bound);

// Two-phase expansion with plain sets: seed-incident triples, then triples
// incident to relevant non-seed neighbors.
sampler::EvidenceSubgraph neighbor_oracle(const kg::KnowledgeGraph& graph,
                                          const std::vector<kg::NodeId>& seeds,
                                          const std::function<double(kg::NodeId)>& relevance,
                                          double threshold);

// Neighbors of `id` by scanning every triple.
std::vector<kg::Neighbor> neighbor_scan(const kg::KnowledgeGraph& graph, kg::NodeId id,
                                        kg::Direction direction);

struct OracleReport {
  std::size_t graphs = 0;
  std::size_t path_mismatches = 0;
  std::size_t neighbor_mismatches = 0;
  double seconds = 0.0;
};

// Runs both explorations against the oracles on `graphs` random graphs.
OracleReport run_graph_oracles(std::size_t graphs, unsigned long long seed);

}  // namespace dalk::testing
