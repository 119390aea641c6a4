#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dalk/evidence_sampler.hpp"
#include "dalk/kg_store.hpp"
#include "dalk/llm_gateway.hpp"
#include "dalk/prompts.hpp"

namespace dalk::retrieval {

inline constexpr std::size_t kDefaultRetrieveK = 5;

// Triples the model chose for itself, in its order. Always a duplicate-free
// subset of the candidates, at most retrieve_k long.
struct RankedEvidence {
  std::vector<std::size_t> triples;  // graph triple indices
  std::size_t retrieve_k = kDefaultRetrieveK;
  std::string raw_response;
  std::size_t unmatched_lines = 0;
  bool warning = false;  // no line matched any candidate

  friend bool operator==(const RankedEvidence&, const RankedEvidence&) = default;
};

// Throws EmptySubgraph when `triples` is empty.
llm::LlmRequest build_rerank_prompt(const std::string& question,
                                    const std::vector<kg::Triple>& triples, std::size_t retrieve_k,
                                    const LlmSettings& settings = {});

// Total parser. Reads "Reranked Triple(s) N: a -> r -> b" lines in ascending
// N, matches each against the candidates by normalized (head, relation,
// tail), falling back to (head, tail), and keeps the first retrieve_k.
RankedEvidence parse_rerank_output(std::string_view text, const kg::KnowledgeGraph& graph,
                                   const std::vector<std::size_t>& candidates,
                                   std::size_t retrieve_k);

struct RetrieveOptions {
  std::size_t retrieve_k = kDefaultRetrieveK;
  // One call over both subgraphs instead of one per subgraph.
  bool joint = false;
};

// Reranks the path-based and neighbor-based subgraphs. An empty subgraph
// yields empty evidence without an LLM call.
std::pair<RankedEvidence, RankedEvidence> retrieve(const std::string& question,
                                                   const kg::KnowledgeGraph& graph,
                                                   const sampler::EvidenceSubgraph& path,
                                                   const sampler::EvidenceSubgraph& neighbor,
                                                   llm::Gateway& gateway,
                                                   const LlmSettings& settings,
                                                   const RetrieveOptions& options = {},
                                                   std::vector<std::string>* trace = nullptr);

}  // namespace dalk::retrieval
