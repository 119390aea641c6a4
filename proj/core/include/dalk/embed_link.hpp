#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "dalk/kg_store.hpp"

namespace dalk::embed {

struct EmbeddingVector {
  std::vector<double> values;

  std::size_t dimension() const { return values.size(); }
  friend bool operator==(const EmbeddingVector&, const EmbeddingVector&) = default;
};

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  // Stable identifier; part of the node-embedding cache key.
  virtual std::string id() const = 0;
  // One vector per text. Throws EmptyInput for an empty list.
  virtual std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) = 0;
};

// Lowercased runs of ASCII letters/digits; bytes >= 0x80 count as letters so
// UTF-8 words stay whole.
std::vector<std::string> tokenize(std::string_view text);

// Offline deterministic embedding: each token adds +1 or -1 (by hash sign) at
// a hashed coordinate. Token order does not matter.
class HashedBagOfTokens : public EmbeddingProvider {
 public:
  explicit HashedBagOfTokens(std::size_t dimension = 256);

  std::string id() const override;
  std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) override;

  // Coordinate and sign a token contributes to.
  std::pair<std::size_t, double> slot(std::string_view token) const;

 private:
  std::size_t dimension_;
};

// dot(a, b) / (|a| |b|), clamped to [-1, 1]. Throws DimensionMismatch or
// ZeroVector.
double cosine(const EmbeddingVector& a, const EmbeddingVector& b);

// Name-level embedding memo per provider plus per-snapshot node matrices.
// Lookups take a shared lock; population takes an exclusive one.
class EmbeddingCache {
 public:
  // Embeddings for `names` in order, embedding only those not yet cached.
  std::vector<EmbeddingVector> get(EmbeddingProvider& provider,
                                   const std::vector<std::string>& names);

  // Embeddings of every node display name, indexed by NodeId. Cached per
  // (snapshot id, provider id).
  std::shared_ptr<const std::vector<EmbeddingVector>> node_embeddings(
      const kg::KnowledgeGraph& graph, EmbeddingProvider& provider);

  // JSON lines {"name": ..., "vector": [...]} for one provider.
  void save_jsonl(const std::filesystem::path& path, const std::string& provider_id) const;
  std::size_t load_jsonl(const std::filesystem::path& path, const std::string& provider_id);

  std::size_t size(const std::string& provider_id) const;

 private:
  mutable std::shared_mutex mu_;
  std::map<std::string, std::map<std::string, EmbeddingVector>> by_provider_;
  std::map<std::pair<std::string, std::string>,
           std::shared_ptr<const std::vector<EmbeddingVector>>>
      nodes_;
};

struct LinkResult {
  std::string query_entity;
  kg::NodeId linked_node = 0;
  double similarity = 0.0;
};

struct LinkOptions {
  // Links below this similarity are dropped. Unset: always link.
  std::optional<double> min_similarity;
};

// Links every query entity to its nearest graph node by cosine similarity.
// A case/whitespace-insensitive exact name match wins outright with
// similarity 1.0; ties go to the lexicographically smallest node name; the
// output keeps the first query per linked node. Queries whose embedding is
// the zero vector only link through the exact-match rule.
std::vector<LinkResult> link_entities(const std::vector<std::string>& query_entities,
                                      const kg::KnowledgeGraph& graph,
                                      EmbeddingProvider& provider, EmbeddingCache& cache,
                                      const LinkOptions& options = {});

}  // namespace dalk::embed
