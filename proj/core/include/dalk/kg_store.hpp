#pragma once

#include <cstddef>
#include <cstdint>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dalk/triple.hpp"

namespace dalk::kg {

using NodeId = std::uint32_t;

struct Node {
  NodeId id = 0;
  std::string display;
  std::string normalized;
};

struct Edge {
  NodeId neighbor = 0;
  std::size_t triple = 0;  // index into KnowledgeGraph::triples()
};

enum class Direction { Out, In, Both };

struct Neighbor {
  std::string relation;
  NodeId neighbor = 0;
  std::size_t triple = 0;

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

struct GraphStats {
  std::size_t corpus = 0;  // distinct source documents
  std::size_t nodes = 0;
  std::size_t relations = 0;  // distinct normalized relation strings
  std::size_t triples = 0;
};

// Immutable triple store.
//
// Triples are deduplicated on their normalized (head, relation, tail) key,
// keeping the earliest-year provenance, and stored in canonical key order.
// Node ids follow the lexicographic order of normalized names, so comparing
// ids compares names. Traversal helpers treat the graph as undirected while
// triples keep their direction for display.
class KnowledgeGraph {
 public:
  KnowledgeGraph();

  static KnowledgeGraph from_triples(std::vector<Triple> triples);

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Triple>& triples() const { return triples_; }
  bool empty() const { return triples_.empty(); }

  const Node& node(NodeId id) const;
  std::optional<NodeId> find(std::string_view name) const;

  NodeId head_of(std::size_t triple) const { return endpoints_.at(triple).first; }
  NodeId tail_of(std::size_t triple) const { return endpoints_.at(triple).second; }

  const std::vector<Edge>& out_edges(NodeId id) const;
  const std::vector<Edge>& in_edges(NodeId id) const;
  // Out and in edges merged in triple-index order.
  const std::vector<Edge>& incident_edges(NodeId id) const;

  std::vector<Neighbor> neighbors(NodeId id, Direction direction) const;

  // Digest of the canonical triple list.
  const std::string& snapshot_id() const { return snapshot_id_; }
  GraphStats stats() const;

  // Triples with year <= `year`.
  KnowledgeGraph snapshot_until(int year) const;

 private:
  void check(NodeId id) const;

  std::vector<Node> nodes_;
  std::vector<Triple> triples_;
  std::vector<std::pair<NodeId, NodeId>> endpoints_;
  std::vector<std::vector<Edge>> out_;
  std::vector<std::vector<Edge>> in_;
  std::vector<std::vector<Edge>> both_;
  std::string snapshot_id_;
};

inline constexpr std::string_view kTsvHeader = "head\trelation\ttail\tsource_doc\tyear\tmethod";

std::string serialize_tsv(const KnowledgeGraph& graph);
// Throws MalformedRow with the 1-based line number.
KnowledgeGraph deserialize_tsv(std::string_view tsv);

nlohmann::json stats_json(const GraphStats& stats);

}  // namespace dalk::kg
