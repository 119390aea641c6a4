#include <benchmark/benchmark.h>

#include <fstream>
#include <random>
#include <sstream>

#include "dalk/corpus.hpp"
#include "dalk/embed_link.hpp"
#include "dalk/evidence_sampler.hpp"
#include "dalk/kg_construct.hpp"
#include "dalk/kg_store.hpp"
#include "oracles/random_graphs.hpp"
#include "oracles/reference_texts.hpp"

using namespace dalk;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<kg::Triple> triples_of_size(std::size_t nodes, std::size_t triples) {
  std::mt19937_64 rng(42);
  testing::RandomGraphSpec spec;
  spec.max_nodes = nodes;
  spec.max_triples = triples;
  return testing::random_triples(rng, spec);
}

void BM_FromTriples(benchmark::State& state) {
  const auto triples = triples_of_size(state.range(0) / 2, state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(kg::KnowledgeGraph::from_triples(triples));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(triples.size()));
}
BENCHMARK(BM_FromTriples)->Arg(100)->Arg(1000)->Arg(10000);

void BM_ExplorePaths(benchmark::State& state) {
  const auto g = kg::KnowledgeGraph::from_triples(triples_of_size(state.range(0) / 2, state.range(0)));
  std::mt19937_64 rng(1);
  const auto seeds = testing::random_seeds(rng, g);
  sampler::SamplerConfig config;
  config.hop_bound = 3;
  for (auto _ : state) benchmark::DoNotOptimize(sampler::explore_paths(g, seeds, config));
}
BENCHMARK(BM_ExplorePaths)->Arg(120)->Arg(1000)->Arg(10000);

void BM_ExploreNeighbors(benchmark::State& state) {
  const auto g = kg::KnowledgeGraph::from_triples(triples_of_size(state.range(0) / 2, state.range(0)));
  std::mt19937_64 rng(2);
  const auto seeds = testing::random_seeds(rng, g);
  sampler::SamplerConfig config;
  auto relevance = [](kg::NodeId id) { return (id % 7) / 6.0; };
  for (auto _ : state) benchmark::DoNotOptimize(sampler::explore_neighbors(g, seeds, relevance, config));
}
BENCHMARK(BM_ExploreNeighbors)->Arg(120)->Arg(1000)->Arg(10000);

void BM_LinkEntities(benchmark::State& state) {
  const auto g = kg::KnowledgeGraph::from_triples(triples_of_size(state.range(0) / 2, state.range(0)));
  embed::HashedBagOfTokens provider;
  embed::EmbeddingCache cache;
  const std::vector<std::string> queries{"node 3", "amyloid beta", "node 17 tau", "APOE"};
  embed::link_entities(queries, g, provider, cache);
  for (auto _ : state) benchmark::DoNotOptimize(embed::link_entities(queries, g, provider, cache));
}
BENCHMARK(BM_LinkEntities)->Arg(120)->Arg(10000);

void BM_ParseGenerative(benchmark::State& state) {
  corpus::AnnotatedDocument doc;
  doc.doc_id = "d";
  doc.year = 2015;
  for (auto _ : state) {
    benchmark::DoNotOptimize(construct::parse_generative_output(testing::reference::kGenerativeOutput, doc));
  }
}
BENCHMARK(BM_ParseGenerative);

void BM_ParsePubtator(benchmark::State& state) {
  const auto text = read_file(std::string(DALK_SOURCE_DIR) + "/data/mini/corpus.pubtator");
  for (auto _ : state) benchmark::DoNotOptimize(corpus::parse_pubtator(text));
  state.SetBytesProcessed(state.iterations() * static_cast<int64_t>(text.size()));
}
BENCHMARK(BM_ParsePubtator);

}  // namespace

BENCHMARK_MAIN();
