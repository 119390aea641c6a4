#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "dalk/error.hpp"
#include "dalk/evidence_sampler.hpp"
#include "oracles/graph_oracles.hpp"
#include "oracles/random_graphs.hpp"
#include "oracles/reference_texts.hpp"
#include "support.hpp"

using namespace dalk;
using namespace dalk::sampler;
namespace ref = dalk::testing::reference;

namespace {

kg::Triple tri(std::string h, std::string r, std::string t) {
  return kg::Triple{std::move(h), std::move(r), std::move(t), "d", 2015};
}

SamplerConfig config(int hops, double tau = 0.5, std::size_t cap = 40) {
  SamplerConfig c;
  c.hop_bound = hops;
  c.relevance_threshold = tau;
  c.max_triples_per_subgraph = cap;
  return c;
}

std::set<std::size_t> as_set(const std::vector<std::size_t>& v) { return {v.begin(), v.end()}; }

}  // namespace

TEST_SUITE("sampler") {
  TEST_CASE("entity lists split, trim and dedupe") {
    CHECK(parse_entity_list("entorhinal cortex, temporal lobe") ==
          std::vector<std::string>{"entorhinal cortex", "temporal lobe"});
    CHECK(parse_entity_list("").empty());
    CHECK(parse_entity_list("APOE, apoe") == std::vector<std::string>{"APOE"});
    CHECK(parse_entity_list("1. tau\n- \"amyloid beta\"\n* microglia.") ==
          std::vector<std::string>{"tau", "amyloid beta", "microglia"});
  }

  TEST_CASE("extraction goes through the gateway with its own tag") {
    llm::Gateway g(llm::GatewayMode::Mock,
                   testing::scripted({testing::rule("entity_extract", {"Which gene"}, "APOE, tau")}));
    std::vector<std::string> trace;
    const auto ents = extract_question_entities("Which gene?", g, LlmSettings{}, &trace);
    CHECK(ents == std::vector<std::string>{"APOE", "tau"});
    CHECK(trace.size() == 1);
  }

  TEST_CASE("single seed gives one empty segment") {
    const auto g = kg::KnowledgeGraph::from_triples({tri("a", "r", "b")});
    const auto sub = explore_paths(g, {*g.find("a")}, config(2));
    REQUIRE(sub.segments.size() == 1);
    CHECK(sub.segments[0].nodes == std::vector<kg::NodeId>{*g.find("a")});
    CHECK(sub.triples.empty());
    CHECK(sub.kind == SubgraphKind::PathBased);
  }

  TEST_CASE("chain a-b-c is walked through b") {
    const auto g = kg::KnowledgeGraph::from_triples({tri("a", "r", "b"), tri("c", "s", "b")});
    const auto a = *g.find("a"), b = *g.find("b"), c = *g.find("c");
    const auto sub = explore_paths(g, {c, a}, config(2));
    REQUIRE(sub.segments.size() == 1);
    CHECK(sub.segments[0].nodes == std::vector<kg::NodeId>{a, b, c});
    CHECK(sub.triples.size() == 2);

    const auto split = explore_paths(g, {a, c}, config(1));
    REQUIRE(split.segments.size() == 2);
    CHECK(split.segments[0].nodes == std::vector<kg::NodeId>{a});
    CHECK(split.segments[1].nodes == std::vector<kg::NodeId>{c});
    CHECK(split.triples.empty());
  }

  TEST_CASE("bad seeds") {
    const auto g = kg::KnowledgeGraph::from_triples({tri("a", "r", "b")});
    try {
      explore_paths(g, {7}, config(2));
      FAIL("expected UnknownSeed");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::UnknownSeed);
    }
    CHECK_THROWS_AS(explore_neighbors(g, {9}, [](kg::NodeId) { return 0.0; }, config(2)), Error);
    CHECK_THROWS_AS(explore_paths(g, {}, config(2)), Error);
    CHECK_THROWS_AS(explore_paths(g, {0}, config(0)), Error);
  }

  TEST_CASE("both explorations match brute-force oracles on 200 random graphs") {
    const auto report = testing::run_graph_oracles(200, 20240101);
    CHECK(report.graphs == 200);
    CHECK(report.path_mismatches == 0);
    CHECK(report.neighbor_mismatches == 0);
  }

  TEST_CASE("segments are valid walks with at most hop_bound steps between seeds") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 200; ++trial) {
      const auto g = kg::KnowledgeGraph::from_triples(testing::random_triples(rng));
      const auto seeds = testing::random_seeds(rng, g);
      const int hops = 1 + trial % 3;
      const auto sub = explore_paths(g, seeds, config(hops));
      const std::set<kg::NodeId> seed_set(seeds.begin(), seeds.end());
      std::set<kg::NodeId> visited_seeds;
      for (const auto& s : sub.segments) {
        REQUIRE(s.nodes.size() == s.triples.size() + 1);
        CHECK(seed_set.count(s.nodes.front()));
        int since_seed = 0;
        for (std::size_t i = 0; i < s.triples.size(); ++i) {
          const auto h = g.head_of(s.triples[i]), t = g.tail_of(s.triples[i]);
          CHECK(((h == s.nodes[i] && t == s.nodes[i + 1]) || (t == s.nodes[i] && h == s.nodes[i + 1])));
          ++since_seed;
          if (seed_set.count(s.nodes[i + 1]) && !visited_seeds.count(s.nodes[i + 1])) {
            CHECK(since_seed <= hops);
            since_seed = 0;
          }
          if (seed_set.count(s.nodes[i])) visited_seeds.insert(s.nodes[i]);
        }
        CHECK(since_seed == 0);
        visited_seeds.insert(s.nodes.back());
      }
      CHECK(visited_seeds == seed_set);
      for (auto t : sub.triples) CHECK(t < g.triples().size());
    }
  }

  TEST_CASE("unreachable threshold keeps exactly the seed-adjacent triples") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 50; ++trial) {
      const auto g = kg::KnowledgeGraph::from_triples(testing::random_triples(rng));
      const auto seeds = testing::random_seeds(rng, g);
      const std::set<kg::NodeId> seed_set(seeds.begin(), seeds.end());
      std::set<std::size_t> one_hop, two_hop;
      std::set<kg::NodeId> ring;
      for (std::size_t i = 0; i < g.triples().size(); ++i) {
        if (seed_set.count(g.head_of(i)) || seed_set.count(g.tail_of(i))) {
          one_hop.insert(i);
          ring.insert(g.head_of(i));
          ring.insert(g.tail_of(i));
        }
      }
      for (std::size_t i = 0; i < g.triples().size(); ++i) {
        if (ring.count(g.head_of(i)) || ring.count(g.tail_of(i))) two_hop.insert(i);
      }
      auto rel = [](kg::NodeId) { return 1.0; };
      const auto closed = explore_neighbors(g, seeds, rel, config(2, 1.01));
      CHECK(as_set(closed.triples) == one_hop);
      CHECK(std::all_of(closed.tiers.begin(), closed.tiers.end(),
                        [](Tier t) { return t == Tier::SeedAdjacent; }));
      auto low = [](kg::NodeId) { return -1.0; };
      CHECK(as_set(explore_neighbors(g, seeds, low, config(2, -1.0)).triples) == two_hop);
    }
  }

  TEST_CASE("raising the threshold never adds triples") {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
      const auto g = kg::KnowledgeGraph::from_triples(testing::random_triples(rng));
      const auto seeds = testing::random_seeds(rng, g);
      std::vector<double> scores(g.nodes().size());
      for (auto& s : scores) s = u(rng);
      auto rel = [&](kg::NodeId id) { return scores[id]; };
      std::set<std::size_t> previous;
      bool first = true;
      for (double tau : {-1.0, -0.5, 0.0, 0.25, 0.5, 0.75, 1.0, 1.01}) {
        const auto now = as_set(explore_neighbors(g, seeds, rel, config(2, tau)).triples);
        if (!first) CHECK(std::includes(previous.begin(), previous.end(), now.begin(), now.end()));
        previous = now;
        first = false;
      }
    }
  }

  TEST_CASE("embedding relevance runs on the case study graph") {
    const auto g = testing::case_study_graph();
    embed::HashedBagOfTokens p;
    embed::EmbeddingCache cache;
    const auto seed = *g.find("Alzheimer's disease");
    const auto sub = explore_neighbors(g, {seed}, "Alzheimer's disease and the brain", config(2),
                                       p, cache);
    CHECK(sub.kind == SubgraphKind::NeighborBased);
    CHECK(sub.triples.size() == sub.tiers.size());
    std::set<std::size_t> adjacent;
    for (const auto& e : g.incident_edges(seed)) adjacent.insert(e.triple);
    std::set<std::size_t> got_adjacent;
    for (std::size_t i = 0; i < sub.triples.size(); ++i) {
      if (sub.tiers[i] == Tier::SeedAdjacent) got_adjacent.insert(sub.triples[i]);
    }
    CHECK(got_adjacent == adjacent);
  }

  TEST_CASE("prune leaves small subgraphs alone") {
    const auto g = testing::case_study_graph();
    const auto path = explore_paths(g, {0, 3, 7}, config(3));
    CHECK(prune(path, config(3)) == path);
    const auto nb = explore_neighbors(g, {0}, [](kg::NodeId) { return 1.0; }, config(2));
    CHECK(prune(nb, config(2)) == nb);
  }

  TEST_CASE("prune keeps seed-adjacent triples first") {
    std::vector<kg::Triple> triples;
    for (int i = 0; i < 30; ++i) {
      const auto leaf = "leaf" + std::to_string(100 + i);
      triples.push_back(tri("hub", "r", leaf));
      for (int j = 0; j < 2; ++j) {
        triples.push_back(tri(leaf, "s", "far" + std::to_string(1000 + i * 3 + j)));
      }
      if (i < 10) triples.push_back(tri(leaf, "t", "far" + std::to_string(5000 + i)));
    }
    const auto g = kg::KnowledgeGraph::from_triples(triples);
    REQUIRE(g.triples().size() == 100);
    const auto all = explore_neighbors(g, {*g.find("hub")}, [](kg::NodeId) { return 1.0; },
                                       config(2, 0.5, 40));
    REQUIRE(all.triples.size() == 100);
    const auto pruned = prune(all, config(2, 0.5, 40));
    REQUIRE(pruned.triples.size() == 40);
    for (std::size_t i = 0; i < 30; ++i) CHECK(pruned.tiers[i] == Tier::SeedAdjacent);
    for (std::size_t i = 30; i < 40; ++i) CHECK(pruned.tiers[i] == Tier::Expanded);
    CHECK(std::is_sorted(pruned.triples.begin(), pruned.triples.begin() + 30));
  }

  TEST_CASE("prune is idempotent and respects the cap") {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 100; ++trial) {
      const auto g = kg::KnowledgeGraph::from_triples(testing::random_triples(rng));
      const auto seeds = testing::random_seeds(rng, g);
      const auto cfg = config(1 + trial % 3, 0.0, 1 + trial % 12);
      auto rel = [](kg::NodeId id) { return (id % 3) - 1.0; };
      for (const auto& sub : {explore_paths(g, seeds, cfg), explore_neighbors(g, seeds, rel, cfg)}) {
        const auto once = prune(sub, cfg);
        CHECK(prune(once, cfg) == once);
        CHECK(once.triples.size() <= cfg.max_triples_per_subgraph);
        CHECK(as_set(once.triples).size() == once.triples.size());
        const auto before = as_set(sub.triples);
        for (auto t : once.triples) CHECK(before.count(t));
        for (const auto& s : once.segments) CHECK(s.nodes.size() == s.triples.size() + 1);
      }
    }
  }

  TEST_CASE("verbalization parses labelled lines") {
    CHECK(parse_verbalized(ref::kVerbalizeOutput) ==
          std::vector<std::string>{"'Entorhinal cortex' is a part of 'brain'.",
                                   "'Entorhinal cortex' associates 'mouse' with 'Alzheimer's disease'.",
                                   "'Temporal lobe' is affected by 'Alzheimer's disease'."});
    CHECK(parse_verbalized("Path-based Evidence 1: 'Entorhinal cortex' is a part of 'brain'.") ==
          std::vector<std::string>{"'Entorhinal cortex' is a part of 'brain'."});
    CHECK(parse_verbalized("Neighbor-based Evidence 1: 'tangles' are 'FORMED BY' '\n"
                           "microtubule-associated protein tau'.") ==
          std::vector<std::string>{"'tangles' are 'FORMED BY' ' microtubule-associated protein tau'."});
    CHECK(parse_verbalized("nothing useful").empty());
  }

  TEST_CASE("verbalize falls back to templates and skips empty input") {
    const auto g = testing::case_study_graph();
    const auto triples = materialize(g, {0, 1});
    llm::Gateway good(llm::GatewayMode::Mock,
                      testing::scripted({testing::rule("verbalize", {"Path-based Evidence 1, Path-based Evidence 2"},
                                                       std::string(ref::kVerbalizeOutput))}));
    std::vector<std::string> trace;
    const auto v = verbalize(SubgraphKind::PathBased, triples, good, LlmSettings{}, &trace);
    CHECK(v.sentences.size() == 3);
    CHECK_FALSE(v.used_fallback);
    CHECK(trace.size() == 1);

    llm::Gateway junk(llm::GatewayMode::Mock,
                      testing::scripted({testing::rule("verbalize", {""}, "I am not sure.")}));
    const auto fb = verbalize(SubgraphKind::NeighborBased, triples, junk, LlmSettings{});
    CHECK(fb.used_fallback);
    REQUIRE(fb.sentences.size() == 2);
    CHECK(fb.sentences[0] == fallback_sentence(triples[0]));
    CHECK(fallback_sentence(tri("tau", "binds", "THK")) == "'tau' binds 'THK'.");

    const auto none = verbalize(SubgraphKind::PathBased, {}, junk, LlmSettings{}, &trace);
    CHECK(none.sentences.empty());
    CHECK(trace.size() == 1);
    CHECK(junk.calls() == 1);
  }

  TEST_CASE("subgraph json names nodes and tiers") {
    const auto g = kg::KnowledgeGraph::from_triples({tri("a", "r", "b"), tri("b", "s", "c")});
    const auto path = explore_paths(g, {*g.find("a"), *g.find("c")}, config(2));
    const auto j = to_json(g, path);
    CHECK(j["kind"] == "path");
    CHECK(j["segments"][0]["nodes"] == nlohmann::json({"a", "b", "c"}));
    CHECK(j["segments"][0]["triples"][1] == "b->s->c");
    const auto nb = explore_neighbors(g, {*g.find("a")}, [](kg::NodeId) { return 1.0; }, config(2));
    const auto jn = to_json(g, nb);
    CHECK(jn["triples"][0]["tier"] == "seed");
    CHECK(jn["triples"][1]["tier"] == "expanded");
    CHECK(evidence_label(SubgraphKind::NeighborBased) == "Neighbor-based Evidence");
  }
}
