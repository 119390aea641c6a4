#include "dalk/kg_store.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <set>

#include "dalk/digest.hpp"
#include "dalk/error.hpp"
#include "dalk/text.hpp"

namespace dalk::kg {

namespace {

// Total order used to pick the surviving provenance among duplicates, so the
// result does not depend on input order.
auto provenance_rank(const Triple& t) {
  return std::tie(t.year, t.source_doc, t.method, t.head, t.relation, t.tail, t.generated);
}

std::string tsv_row(const Triple& t) {
  std::string row;
  row += text::escape_tsv(t.head) + '\t';
  row += text::escape_tsv(t.relation) + '\t';
  row += text::escape_tsv(t.tail) + '\t';
  row += text::escape_tsv(t.source_doc) + '\t';
  row += std::to_string(t.year) + '\t';
  row += std::string(to_string(t.method));
  return row;
}

}  // namespace

KnowledgeGraph::KnowledgeGraph() : snapshot_id_(sha256_hex("")) {}

KnowledgeGraph KnowledgeGraph::from_triples(std::vector<Triple> input) {
  std::map<TripleKey, Triple> unique;
  for (auto& raw : input) {
    Triple t = tidy(std::move(raw));
    if (!is_valid(t)) {
      throw Error(ErrorCode::PreconditionViolation,
                  "invalid triple '" + render_arrow(t) + "'");
    }
    auto k = key_of(t);
    auto it = unique.find(k);
    if (it == unique.end()) {
      unique.emplace(std::move(k), std::move(t));
    } else if (provenance_rank(t) < provenance_rank(it->second)) {
      it->second = std::move(t);
    }
  }

  KnowledgeGraph g;
  std::map<std::string, std::string> display_of;  // normalized -> display
  std::vector<std::pair<std::string, std::string>> keys;
  g.triples_.reserve(unique.size());
  keys.reserve(unique.size());
  for (auto& [k, t] : unique) {
    display_of.emplace(k.head, t.head);
    display_of.emplace(k.tail, t.tail);
    keys.emplace_back(k.head, k.tail);
    g.triples_.push_back(std::move(t));
  }

  std::map<std::string, NodeId> id_of;
  for (auto& [normalized, display] : display_of) {
    const auto id = static_cast<NodeId>(g.nodes_.size());
    id_of.emplace(normalized, id);
    g.nodes_.push_back(Node{id, display, normalized});
  }

  g.out_.resize(g.nodes_.size());
  g.in_.resize(g.nodes_.size());
  g.both_.resize(g.nodes_.size());
  g.endpoints_.reserve(g.triples_.size());
  for (std::size_t i = 0; i < g.triples_.size(); ++i) {
    const NodeId h = id_of.at(keys[i].first);
    const NodeId t = id_of.at(keys[i].second);
    g.endpoints_.emplace_back(h, t);
    g.out_[h].push_back(Edge{t, i});
    g.in_[t].push_back(Edge{h, i});
    g.both_[h].push_back(Edge{t, i});
    g.both_[t].push_back(Edge{h, i});
  }
  g.snapshot_id_ = sha256_hex(serialize_tsv(g));
  return g;
}

void KnowledgeGraph::check(NodeId id) const {
  if (id >= nodes_.size()) {
    throw Error(ErrorCode::UnknownNode, "node id " + std::to_string(id));
  }
}

const Node& KnowledgeGraph::node(NodeId id) const {
  check(id);
  return nodes_[id];
}

std::optional<NodeId> KnowledgeGraph::find(std::string_view name) const {
  const std::string key = text::normalize_name(name);
  auto it = std::lower_bound(nodes_.begin(), nodes_.end(), key,
                             [](const Node& n, const std::string& k) { return n.normalized < k; });
  if (it == nodes_.end() || it->normalized != key) return std::nullopt;
  return it->id;
}

const std::vector<Edge>& KnowledgeGraph::out_edges(NodeId id) const {
  check(id);
  return out_[id];
}

const std::vector<Edge>& KnowledgeGraph::in_edges(NodeId id) const {
  check(id);
  return in_[id];
}

const std::vector<Edge>& KnowledgeGraph::incident_edges(NodeId id) const {
  check(id);
  return both_[id];
}

std::vector<Neighbor> KnowledgeGraph::neighbors(NodeId id, Direction direction) const {
  check(id);
  const auto& edges = direction == Direction::Out  ? out_[id]
                      : direction == Direction::In ? in_[id]
                                                   : both_[id];
  std::vector<Neighbor> out;
  out.reserve(edges.size());
  for (const auto& e : edges) {
    out.push_back(Neighbor{triples_[e.triple].relation, e.neighbor, e.triple});
  }
  return out;
}

GraphStats KnowledgeGraph::stats() const {
  std::set<std::string> docs;
  std::set<std::string> relations;
  for (const auto& t : triples_) {
    docs.insert(t.source_doc);
    relations.insert(text::normalize_name(t.relation));
  }
  return GraphStats{docs.size(), nodes_.size(), relations.size(), triples_.size()};
}

KnowledgeGraph KnowledgeGraph::snapshot_until(int year) const {
  std::vector<Triple> kept;
  for (const auto& t : triples_) {
    if (t.year <= year) kept.push_back(t);
  }
  return from_triples(std::move(kept));
}

std::string serialize_tsv(const KnowledgeGraph& graph) {
  std::string out(kTsvHeader);
  out += '\n';
  for (const auto& t : graph.triples()) {
    out += tsv_row(t);
    out += '\n';
  }
  return out;
}

KnowledgeGraph deserialize_tsv(std::string_view tsv) {
  auto lines = text::split_lines(tsv);
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty() || lines.front() != kTsvHeader) {
    throw Error(ErrorCode::MalformedRow, "line 1: missing KG TSV header");
  }
  std::vector<Triple> triples;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    auto row_error = [&](const std::string& why) {
      return Error(ErrorCode::MalformedRow, "line " + std::to_string(line_no) + ": " + why);
    };
    auto fields = text::split(lines[i], '\t');
    if (fields.size() != 6) {
      throw row_error("expected 6 columns, got " + std::to_string(fields.size()));
    }
    Triple t;
    t.head = text::unescape_tsv(fields[0]);
    t.relation = text::unescape_tsv(fields[1]);
    t.tail = text::unescape_tsv(fields[2]);
    t.source_doc = text::unescape_tsv(fields[3]);
    auto [ptr, ec] =
        std::from_chars(fields[4].data(), fields[4].data() + fields[4].size(), t.year);
    if (ec != std::errc() || ptr != fields[4].data() + fields[4].size()) {
      throw row_error("bad year '" + fields[4] + "'");
    }
    if (fields[5] == "generative") {
      t.method = Method::Generative;
    } else if (fields[5] == "pairwise") {
      t.method = Method::PairWise;
    } else {
      throw row_error("bad method '" + fields[5] + "'");
    }
    if (!is_valid(t)) throw row_error("invalid triple");
    triples.push_back(std::move(t));
  }
  return KnowledgeGraph::from_triples(std::move(triples));
}

nlohmann::json stats_json(const GraphStats& s) {
  return nlohmann::json{{"corpus", s.corpus},
                        {"nodes", s.nodes},
                        {"relations", s.relations},
                        {"triples", s.triples}};
}

}  // namespace dalk::kg
