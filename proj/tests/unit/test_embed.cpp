#include <doctest.h>

#include <cmath>
#include <map>
#include <random>
#include <set>

#include "dalk/embed_link.hpp"
#include "dalk/error.hpp"
#include "dalk/text.hpp"
#include "support.hpp"

using namespace dalk;
using embed::EmbeddingVector;

namespace {

// Vectors looked up by exact text, optionally scaled.
class TableProvider : public embed::EmbeddingProvider {
 public:
  explicit TableProvider(std::map<std::string, std::vector<double>> table, double scale = 1.0)
      : table_(std::move(table)), scale_(scale) {}
  std::string id() const override { return "table-" + std::to_string(scale_); }
  std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) override {
    if (texts.empty()) throw Error(ErrorCode::EmptyInput, "none");
    ++batches;
    std::vector<EmbeddingVector> out;
    for (const auto& t : texts) {
      auto v = table_.at(t);
      for (auto& x : v) x *= scale_;
      out.push_back(EmbeddingVector{v});
      ++embedded;
    }
    return out;
  }
  int batches = 0;
  int embedded = 0;

 private:
  std::map<std::string, std::vector<double>> table_;
  double scale_;
};

long double reference_cosine(const std::vector<double>& a, const std::vector<double>& b) {
  long double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += static_cast<long double>(a[i]) * b[i];
    na += static_cast<long double>(a[i]) * a[i];
    nb += static_cast<long double>(b[i]) * b[i];
  }
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

kg::Triple tri(std::string h, std::string tl) { return kg::Triple{std::move(h), "r", std::move(tl), "d", 2015}; }

}  // namespace

TEST_SUITE("embed") {
  TEST_CASE("tokenizer lowercases and keeps UTF-8 words whole") {
    CHECK(embed::tokenize("APOE-4 and Abeta(1-40)") ==
          std::vector<std::string>{"apoe", "4", "and", "abeta", "1", "40"});
    CHECK(embed::tokenize("Alzheimer\xE2\x80\x99s") == std::vector<std::string>{"alzheimer\xE2\x80\x99s"});
    CHECK(embed::tokenize("  ").empty());
  }

  TEST_CASE("hashed provider is deterministic and rejects empty input") {
    embed::HashedBagOfTokens p;
    CHECK(p.embed({"x"}) == p.embed({"x"}));
    CHECK(p.embed({"x"})[0].dimension() == 256);
    CHECK_THROWS_AS(p.embed({}), Error);
    CHECK_THROWS_AS(embed::HashedBagOfTokens(0), Error);
  }

  TEST_CASE("bag of tokens equals an explicit token count construction") {
    embed::HashedBagOfTokens p(64);
    const std::vector<std::string> sentences = {"tau binds tau in the entorhinal cortex",
                                                "cortex entorhinal the in tau binds tau",
                                                "Amyloid beta, APOE4; amyloid!"};
    for (const auto& s : sentences) {
      std::map<std::string, int> counts;
      for (const auto& tok : embed::tokenize(s)) ++counts[tok];
      std::vector<double> expected(64, 0.0);
      for (const auto& [tok, n] : counts) {
        const auto [i, sign] = p.slot(tok);
        expected[i] += sign * n;
      }
      CHECK(p.embed({s})[0].values == expected);
    }
    CHECK(p.embed({sentences[0]}) == p.embed({sentences[1]}));
  }

  TEST_CASE("cosine identities and errors") {
    const EmbeddingVector v{{0.3, -2.0, 5.0}};
    CHECK(embed::cosine(v, v) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(embed::cosine(EmbeddingVector{{1, 0}}, EmbeddingVector{{0, 1}}) == 0.0);
    CHECK(embed::cosine(EmbeddingVector{{1, 1}}, EmbeddingVector{{-2, -2}}) == -1.0);
    CHECK_THROWS_AS(embed::cosine(EmbeddingVector{{1, 0}}, EmbeddingVector{{1}}), Error);
    CHECK_THROWS_AS(embed::cosine(EmbeddingVector{{0, 0}}, EmbeddingVector{{1, 1}}), Error);
  }

  TEST_CASE("cosine agrees with an extended precision reference") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    for (int i = 0; i < 1000; ++i) {
      std::vector<double> a(8), b(8);
      for (auto& x : a) x = u(rng);
      for (auto& x : b) x = u(rng);
      const double got = embed::cosine(EmbeddingVector{a}, EmbeddingVector{b});
      CHECK(std::fabs(static_cast<long double>(got) - reference_cosine(a, b)) < 1e-12L);
      CHECK(got <= 1.0);
      CHECK(got >= -1.0);
    }
  }

  TEST_CASE("exact name match short-circuits") {
    const auto g = kg::KnowledgeGraph::from_triples({tri("alzheimer's disease", "tau")});
    embed::HashedBagOfTokens p;
    embed::EmbeddingCache cache;
    const auto links = embed::link_entities({"Alzheimer’s  Disease"}, g, p, cache);
    REQUIRE(links.size() == 1);
    CHECK(links[0].linked_node == *g.find("alzheimer's disease"));
    CHECK(links[0].similarity == 1.0);
  }

  TEST_CASE("equal vectors tie to the smaller name") {
    const auto g = kg::KnowledgeGraph::from_triples({tri("beta node", "alpha node")});
    TableProvider p({{"beta node", {1, 0}}, {"alpha node", {1, 0}}, {"query", {2, 0}}});
    embed::EmbeddingCache cache;
    const auto links = embed::link_entities({"query"}, g, p, cache);
    REQUIRE(links.size() == 1);
    CHECK(g.node(links[0].linked_node).display == "alpha node");
  }

  TEST_CASE("links dedupe by node and honor the similarity floor") {
    const auto g = kg::KnowledgeGraph::from_triples({tri("a", "b")});
    TableProvider p({{"a", {1, 0}}, {"b", {0, 1}}, {"q1", {1, 0.1}}, {"q2", {1, 0.2}},
                     {"q3", {-1, 1}}});
    embed::EmbeddingCache cache;
    const auto links = embed::link_entities({"q1", "q2", "q3"}, g, p, cache);
    REQUIRE(links.size() == 2);
    CHECK(links[0].query_entity == "q1");
    CHECK(links[1].query_entity == "q3");
    embed::LinkOptions floor{0.8};
    const auto strict = embed::link_entities({"q1", "q3"}, g, p, cache, floor);
    REQUIRE(strict.size() == 1);
    CHECK(strict[0].query_entity == "q1");
    CHECK(embed::link_entities({}, g, p, cache).empty());
    CHECK_THROWS_AS(embed::link_entities({"q1"}, kg::KnowledgeGraph{}, p, cache), Error);
  }

  TEST_CASE("random graphs link to the exhaustive argmax, at any scale") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 30; ++trial) {
      std::map<std::string, std::vector<double>> table;
      std::vector<kg::Triple> triples;
      for (int i = 0; i < 20; ++i) {
        const std::string name = "n" + std::to_string((i * 37 + trial) % 101);
        table[name] = {u(rng), u(rng), u(rng), u(rng)};
        if (i > 0) triples.push_back(tri(name, triples.empty() ? "n-root" : triples.back().head));
      }
      table["n-root"] = {u(rng), u(rng), u(rng), u(rng)};
      std::vector<std::string> queries;
      for (int q = 0; q < 5; ++q) {
        queries.push_back("query " + std::to_string(q));
        table[queries.back()] = {u(rng), u(rng), u(rng), u(rng)};
      }
      const auto g = kg::KnowledgeGraph::from_triples(triples);

      TableProvider unit(table);
      TableProvider scaled(table, 37.5);
      embed::EmbeddingCache cache;
      const auto got = embed::link_entities(queries, g, unit, cache);
      const auto got_scaled = embed::link_entities(queries, g, scaled, cache);
      REQUIRE(got.size() == got_scaled.size());
      for (std::size_t i = 0; i < got.size(); ++i) {
        CHECK(got[i].linked_node == got_scaled[i].linked_node);
      }

      std::set<kg::NodeId> used;
      std::vector<std::pair<std::string, kg::NodeId>> expected;
      for (const auto& q : queries) {
        kg::NodeId best = 0;
        long double best_sim = -2;
        for (const auto& n : g.nodes()) {
          const auto sim = reference_cosine(table.at(q), table.at(n.display));
          if (sim > best_sim + 1e-12L ||
              (std::fabs(sim - best_sim) <= 1e-12L && n.normalized < g.node(best).normalized)) {
            best = n.id;
            best_sim = sim;
          }
        }
        if (used.insert(best).second) expected.emplace_back(q, best);
      }
      REQUIRE(got.size() == expected.size());
      for (std::size_t i = 0; i < got.size(); ++i) {
        CHECK(got[i].query_entity == expected[i].first);
        CHECK(got[i].linked_node == expected[i].second);
      }
    }
  }

  TEST_CASE("cache embeds each name once and persists to json lines") {
    TableProvider p({{"a", {1, 0}}, {"b", {0, 1}}});
    embed::EmbeddingCache cache;
    cache.get(p, {"a", "a", "b"});
    cache.get(p, {"b", "a"});
    CHECK(p.embedded == 2);
    CHECK(p.batches == 1);
    CHECK(cache.size(p.id()) == 2);

    const auto g = kg::KnowledgeGraph::from_triples({tri("a", "b")});
    auto first = cache.node_embeddings(g, p);
    CHECK(cache.node_embeddings(g, p) == first);
    CHECK(p.batches == 1);

    testing::TempDir dir("dalk-embed");
    cache.save_jsonl(dir / "e.jsonl", p.id());
    embed::EmbeddingCache fresh;
    CHECK(fresh.load_jsonl(dir / "e.jsonl", p.id()) == 2);
    CHECK(fresh.get(p, {"a"})[0].values == std::vector<double>{1, 0});
    CHECK(p.batches == 1);
  }
}
