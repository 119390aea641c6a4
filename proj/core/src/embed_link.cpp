#include "dalk/embed_link.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <mutex>
#include <nlohmann/json.hpp>
#include <set>

#include "dalk/error.hpp"
#include "dalk/text.hpp"

namespace dalk::embed {

namespace {

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

bool is_token_char(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
         c >= 0x80;
}

bool is_zero(const EmbeddingVector& v) {
  for (double x : v.values) {
    if (x != 0.0) return false;
  }
  return true;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (is_token_char(c)) {
      current.push_back((c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : ch);
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

HashedBagOfTokens::HashedBagOfTokens(std::size_t dimension) : dimension_(dimension) {
  if (dimension_ == 0) throw Error(ErrorCode::ConfigError, "embedding dimension must be > 0");
}

std::string HashedBagOfTokens::id() const {
  return "hashed-bow-" + std::to_string(dimension_);
}

std::pair<std::size_t, double> HashedBagOfTokens::slot(std::string_view token) const {
  const std::uint64_t h = fnv1a64(token);
  return {static_cast<std::size_t>(h % dimension_), (h >> 63) ? -1.0 : 1.0};
}

std::vector<EmbeddingVector> HashedBagOfTokens::embed(const std::vector<std::string>& texts) {
  if (texts.empty()) throw Error(ErrorCode::EmptyInput, "embed() called with no texts");
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (const auto& text : texts) {
    EmbeddingVector v{std::vector<double>(dimension_, 0.0)};
    for (const auto& token : tokenize(text)) {
      auto [index, sign] = slot(token);
      v.values[index] += sign;
    }
    out.push_back(std::move(v));
  }
  return out;
}

double cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.dimension() != b.dimension()) {
    throw Error(ErrorCode::DimensionMismatch, std::to_string(a.dimension()) + " vs " +
                                                  std::to_string(b.dimension()));
  }
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.dimension(); ++i) {
    dot += a.values[i] * b.values[i];
    na += a.values[i] * a.values[i];
    nb += b.values[i] * b.values[i];
  }
  if (na == 0.0 || nb == 0.0) throw Error(ErrorCode::ZeroVector, "cosine of a zero vector");
  const double c = dot / std::sqrt(na * nb);
  return std::clamp(c, -1.0, 1.0);
}

std::vector<EmbeddingVector> EmbeddingCache::get(EmbeddingProvider& provider,
                                                 const std::vector<std::string>& names) {
  const std::string pid = provider.id();
  std::vector<std::string> missing;
  {
    std::shared_lock lock(mu_);
    auto it = by_provider_.find(pid);
    std::set<std::string> queued;
    for (const auto& n : names) {
      const bool cached = it != by_provider_.end() && it->second.count(n) > 0;
      if (!cached && queued.insert(n).second) missing.push_back(n);
    }
  }
  if (!missing.empty()) {
    auto vectors = provider.embed(missing);
    std::unique_lock lock(mu_);
    auto& table = by_provider_[pid];
    for (std::size_t i = 0; i < missing.size(); ++i) {
      table.emplace(missing[i], std::move(vectors[i]));
    }
  }
  std::shared_lock lock(mu_);
  const auto& table = by_provider_.at(pid);
  std::vector<EmbeddingVector> out;
  out.reserve(names.size());
  for (const auto& n : names) out.push_back(table.at(n));
  return out;
}

std::shared_ptr<const std::vector<EmbeddingVector>> EmbeddingCache::node_embeddings(
    const kg::KnowledgeGraph& graph, EmbeddingProvider& provider) {
  const auto key = std::make_pair(graph.snapshot_id(), provider.id());
  {
    std::shared_lock lock(mu_);
    auto it = nodes_.find(key);
    if (it != nodes_.end()) return it->second;
  }
  std::vector<std::string> names;
  names.reserve(graph.nodes().size());
  for (const auto& n : graph.nodes()) names.push_back(n.display);
  auto vectors = names.empty() ? std::vector<EmbeddingVector>{} : get(provider, names);
  auto shared = std::make_shared<const std::vector<EmbeddingVector>>(std::move(vectors));
  std::unique_lock lock(mu_);
  return nodes_.emplace(key, std::move(shared)).first->second;
}

void EmbeddingCache::save_jsonl(const std::filesystem::path& path,
                                const std::string& provider_id) const {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::ConfigError, "cannot write " + path.string());
  std::shared_lock lock(mu_);
  auto it = by_provider_.find(provider_id);
  if (it == by_provider_.end()) return;
  for (const auto& [name, vec] : it->second) {
    out << nlohmann::json{{"name", name}, {"vector", vec.values}}.dump() << '\n';
  }
}

std::size_t EmbeddingCache::load_jsonl(const std::filesystem::path& path,
                                       const std::string& provider_id) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot read " + path.string());
  std::size_t loaded = 0;
  std::size_t line_no = 0;
  std::string line;
  std::unique_lock lock(mu_);
  auto& table = by_provider_[provider_id];
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    try {
      auto j = nlohmann::json::parse(line);
      table.insert_or_assign(j.at("name").get<std::string>(),
                             EmbeddingVector{j.at("vector").get<std::vector<double>>()});
      ++loaded;
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::MalformedLine,
                  path.string() + " line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return loaded;
}

std::size_t EmbeddingCache::size(const std::string& provider_id) const {
  std::shared_lock lock(mu_);
  auto it = by_provider_.find(provider_id);
  return it == by_provider_.end() ? 0 : it->second.size();
}

std::vector<LinkResult> link_entities(const std::vector<std::string>& query_entities,
                                      const kg::KnowledgeGraph& graph,
                                      EmbeddingProvider& provider, EmbeddingCache& cache,
                                      const LinkOptions& options) {
  if (graph.nodes().empty()) throw Error(ErrorCode::EmptyGraph, "cannot link into an empty graph");
  std::vector<LinkResult> results;
  if (query_entities.empty()) return results;

  const auto node_vectors = cache.node_embeddings(graph, provider);
  const auto query_vectors = cache.get(provider, query_entities);
  std::set<kg::NodeId> linked;

  for (std::size_t q = 0; q < query_entities.size(); ++q) {
    std::optional<LinkResult> best;
    if (auto exact = graph.find(query_entities[q])) {
      best = LinkResult{query_entities[q], *exact, 1.0};
    } else if (!is_zero(query_vectors[q])) {
      // Node ids ascend with normalized names, so strict '>' keeps the
      // lexicographically smallest among equal similarities.
      for (kg::NodeId id = 0; id < node_vectors->size(); ++id) {
        const auto& nv = (*node_vectors)[id];
        if (is_zero(nv)) continue;
        const double sim = cosine(query_vectors[q], nv);
        if (!best || sim > best->similarity) best = LinkResult{query_entities[q], id, sim};
      }
    }
    if (!best) continue;
    if (options.min_similarity && best->similarity < *options.min_similarity) continue;
    if (linked.insert(best->linked_node).second) results.push_back(std::move(*best));
  }
  return results;
}

}  // namespace dalk::embed
