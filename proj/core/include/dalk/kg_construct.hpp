#pragma once

#include <cstddef>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dalk/corpus.hpp"
#include "dalk/kg_store.hpp"
#include "dalk/llm_gateway.hpp"
#include "dalk/prompts.hpp"
#include "dalk/triple.hpp"

namespace dalk::construct {

enum class HetionetType { Genes, Compounds, Diseases };

std::string_view to_string(HetionetType type);

// PubTator type -> Hetionet type.
struct TypeMatchEntry {
  std::string_view pubtator;
  HetionetType hetionet;
};

// Unordered Hetionet type pair -> candidate relations. `label` is the row
// name as printed in the source table.
struct RelationCandidateEntry {
  std::string_view label;
  HetionetType first;
  HetionetType second;
  std::vector<std::string_view> relations;
};

const std::vector<TypeMatchEntry>& type_match_table();
const std::vector<RelationCandidateEntry>& relation_candidate_table();

std::optional<HetionetType> map_type(const corpus::EntityType& type);

// Symmetric lookup; nullopt when the pair has no row.
std::optional<std::vector<std::string>> relation_candidates(HetionetType a, HetionetType b);

inline constexpr std::string_view kNoRelation = "no-relation";
inline constexpr std::string_view kOthersOption =
    "others, please specify by generating a short predicate in 5 words";

struct ConstructOptions {
  LlmSettings llm;
  // Prompts carry the abstract only unless set.
  bool include_title = false;
};

// Entity surfaces deduplicated by normalized name, in mention order.
std::vector<std::string> entity_names(const corpus::AnnotatedDocument& doc);

// Throws TooFewEntities when the document has fewer than two distinct
// entities.
llm::LlmRequest build_generative_prompt(const corpus::AnnotatedDocument& doc,
                                        const ConstructOptions& options = {});

struct GenerativeParse {
  std::vector<kg::Triple> triples;
  std::size_t candidates = 0;  // non-empty segments seen
  std::size_t rejected = 0;
};

// Total: never throws. Segments are split on newlines and on commas outside
// brackets; each must be exactly "head | relation | tail".
GenerativeParse parse_generative_output(std::string_view text,
                                        const corpus::AnnotatedDocument& doc);

struct EntityPair {
  corpus::EntityMention head;
  corpus::EntityMention tail;
  std::vector<std::string> candidates;
};

struct PairEnumeration {
  std::vector<EntityPair> pairs;
  std::size_t excluded = 0;  // pairs involving a type with no Hetionet mapping
};

PairEnumeration enumerate_pairs(const corpus::AnnotatedDocument& doc);

// "A. c1 B. c2 ... X. no-relation Y. others, please specify ..."
std::string render_pair_options(const std::vector<std::string>& candidates);

// Throws PreconditionViolation for an empty candidate list.
llm::LlmRequest build_pairwise_prompt(const EntityPair& pair,
                                      const corpus::AnnotatedDocument& doc,
                                      const ConstructOptions& options = {});

struct PairwiseParse {
  std::optional<kg::Triple> triple;
  bool warning = false;  // no usable answer letter / empty free-text predicate
};

PairwiseParse parse_pairwise_output(std::string_view text, const EntityPair& pair,
                                    const corpus::AnnotatedDocument& doc);

struct BuildReport {
  kg::Method method = kg::Method::Generative;
  std::size_t documents = 0;
  std::size_t documents_processed = 0;
  std::size_t documents_skipped = 0;  // fewer than two entities / no mappable pair
  std::size_t requests = 0;
  std::size_t raw_candidates = 0;
  std::size_t triples_extracted = 0;  // before deduplication
  std::size_t triples_kept = 0;
  std::size_t rejected = 0;
  std::size_t warnings = 0;
  std::size_t excluded_pairs = 0;
};

nlohmann::json to_json(const BuildReport& report);

struct BuildResult {
  kg::KnowledgeGraph graph;
  BuildReport report;
};

// Every document must carry a year (MissingYear otherwise). Gateway failures
// propagate as BatchError.
BuildResult construct_kg(const std::vector<corpus::AnnotatedDocument>& docs, kg::Method method,
                         llm::Gateway& gateway, const ConstructOptions& options = {});

}  // namespace dalk::construct
