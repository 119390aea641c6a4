#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dalk::corpus {

// PubTator bioconcept type. Anything outside the six known kinds is kept
// verbatim as Other.
struct EntityType {
  enum class Kind { Gene, Chemical, Disease, Mutation, Species, CellLine, Other };

  Kind kind = Kind::Other;
  std::string other;  // original spelling when kind == Other

  static EntityType parse(std::string_view s);
  std::string name() const;

  friend bool operator==(const EntityType&, const EntityType&) = default;
};

struct EntityMention {
  std::string surface;
  std::size_t start = 0;  // code point offset into title + ' ' + abstract
  std::size_t end = 0;    // exclusive
  EntityType entity_type;
  std::optional<std::string> concept_id;  // absent when the column is missing

  friend bool operator==(const EntityMention&, const EntityMention&) = default;
};

struct AnnotatedDocument {
  std::string doc_id;
  std::optional<int> year;
  std::string title;
  std::string abstract_text;
  std::vector<EntityMention> mentions;  // sorted by (start, end)

  // The string annotation offsets index into.
  std::string full_text() const { return title + " " + abstract_text; }

  friend bool operator==(const AnnotatedDocument&, const AnnotatedDocument&) = default;
};

enum class ParseMode { Strict, Lenient };

struct ParseReport {
  std::vector<AnnotatedDocument> documents;
  std::size_t dropped_annotations = 0;
  std::size_t dropped_lines = 0;      // stray / malformed non-annotation lines
  std::size_t dropped_documents = 0;  // blocks without title/abstract, duplicates
};

// Parses PubTator text. Strict mode throws dalk::Error on the first problem;
// lenient mode drops the offending annotation (or block) and counts it.
ParseReport parse_pubtator(std::string_view text, ParseMode mode = ParseMode::Strict);

// Inverse of parse_pubtator for well-formed input: blocks separated by one
// blank line, each line terminated by '\n'.
std::string serialize_pubtator(const std::vector<AnnotatedDocument>& docs);

constexpr int kMinYear = 1900;
constexpr int kMaxYear = 2100;

// doc_id<TAB>year per line. Blank lines and lines starting with '#' skipped.
std::map<std::string, int> parse_year_map(std::string_view tsv);

struct YearAttachOptions {
  ParseMode mode = ParseMode::Strict;
  int default_year = 2011;
};

struct YearAttachReport {
  std::vector<std::string> missing;  // doc ids that received the default
};

YearAttachReport attach_years(std::vector<AnnotatedDocument>& docs,
                              const std::map<std::string, int>& year_map,
                              const YearAttachOptions& options = {});

}  // namespace dalk::corpus
