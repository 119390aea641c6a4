#include "dalk/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <set>

#include "dalk/error.hpp"
#include "dalk/text.hpp"

namespace dalk::corpus {

namespace {

struct TypeName {
  EntityType::Kind kind;
  std::string_view name;
};

constexpr TypeName kTypeNames[] = {
    {EntityType::Kind::Gene, "Gene"},
    {EntityType::Kind::Chemical, "Chemical"},
    {EntityType::Kind::Disease, "Disease"},
    {EntityType::Kind::Mutation, "Mutation"},
    {EntityType::Kind::Species, "Species"},
    {EntityType::Kind::CellLine, "CellLine"},
};

template <typename Int>
std::optional<Int> parse_int(std::string_view s) {
  Int value{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return value;
}

struct Block {
  std::vector<std::pair<std::size_t, std::string>> lines;  // (1-based line no, text)
};

// Splits the input into blank-line separated blocks.
std::vector<Block> split_blocks(std::string_view text) {
  std::vector<Block> blocks;
  Block current;
  std::size_t line_no = 0;
  for (auto& line : text::split_lines(text)) {
    ++line_no;
    if (text::trim(line).empty()) {
      if (!current.lines.empty()) blocks.push_back(std::move(current));
      current = Block{};
      continue;
    }
    current.lines.emplace_back(line_no, std::move(line));
  }
  if (!current.lines.empty()) blocks.push_back(std::move(current));
  return blocks;
}

// Recognizes "PMID|t|text" / "PMID|a|text".
bool split_text_line(const std::string& line, char tag, std::string& pmid,
                     std::string& payload) {
  auto first = line.find('|');
  if (first == std::string::npos || first == 0) return false;
  if (line.size() < first + 3 || line[first + 1] != tag || line[first + 2] != '|') {
    return false;
  }
  pmid = line.substr(0, first);
  payload = line.substr(first + 3);
  return true;
}

class BlockParser {
 public:
  BlockParser(ParseMode mode, ParseReport& report) : mode_(mode), report_(report) {}

  std::optional<AnnotatedDocument> parse(const Block& block) {
    AnnotatedDocument doc;
    std::string pmid;
    bool have_title = false;
    bool have_abstract = false;
    std::vector<std::pair<std::size_t, std::string>> annotation_lines;

    for (const auto& [line_no, line] : block.lines) {
      std::string payload;
      if (!have_title && split_text_line(line, 't', pmid, payload)) {
        doc.doc_id = pmid;
        doc.title = payload;
        have_title = true;
      } else if (have_title && !have_abstract &&
                 split_text_line(line, 'a', pmid, payload) && pmid == doc.doc_id) {
        doc.abstract_text = payload;
        have_abstract = true;
      } else if (have_abstract && line.find('\t') != std::string::npos) {
        annotation_lines.emplace_back(line_no, line);
      } else {
        fail_line(line_no, "unexpected line in block");
        ++report_.dropped_lines;
      }
    }
    if (!have_title || !have_abstract || doc.doc_id.empty()) {
      fail_line(block.lines.front().first, "block lacks PMID|t| and PMID|a| lines");
      ++report_.dropped_documents;
      return std::nullopt;
    }

    const std::string full = doc.full_text();
    const auto offsets = text::codepoint_offsets(full);
    const std::size_t length = offsets.size() - 1;

    for (const auto& [line_no, line] : annotation_lines) {
      auto fields = text::split(line, '\t');
      if ((fields.size() != 5 && fields.size() != 6) || fields[0] != doc.doc_id) {
        fail_line(line_no, "annotation needs 5 or 6 tab-separated fields for this PMID");
        ++report_.dropped_annotations;
        continue;
      }
      auto start = parse_int<std::size_t>(fields[1]);
      auto end = parse_int<std::size_t>(fields[2]);
      if (!start || !end) {
        fail_line(line_no, "non-numeric offset");
        ++report_.dropped_annotations;
        continue;
      }
      if (!(*start < *end && *end <= length)) {
        if (mode_ == ParseMode::Strict) {
          throw Error(ErrorCode::OffsetOutOfRange,
                      "doc " + doc.doc_id + " span [" + fields[1] + ", " + fields[2] +
                          ") outside text of length " + std::to_string(length));
        }
        ++report_.dropped_annotations;
        continue;
      }
      const std::string referenced =
          full.substr(offsets[*start], offsets[*end] - offsets[*start]);
      if (text::collapse_whitespace(referenced) != text::collapse_whitespace(fields[3])) {
        if (mode_ == ParseMode::Strict) {
          throw Error(ErrorCode::MentionMismatch,
                      "doc " + doc.doc_id + " line " + std::to_string(line_no) +
                          ": mention '" + fields[3] + "' does not match text '" +
                          referenced + "'");
        }
        ++report_.dropped_annotations;
        continue;
      }
      EntityMention mention;
      mention.surface = fields[3];
      mention.start = *start;
      mention.end = *end;
      mention.entity_type = EntityType::parse(fields[4]);
      if (fields.size() == 6) mention.concept_id = fields[5];
      doc.mentions.push_back(std::move(mention));
    }
    std::stable_sort(doc.mentions.begin(), doc.mentions.end(),
                     [](const EntityMention& a, const EntityMention& b) {
                       return std::tie(a.start, a.end) < std::tie(b.start, b.end);
                     });
    return doc;
  }

 private:
  void fail_line(std::size_t line_no, const std::string& why) const {
    if (mode_ == ParseMode::Strict) {
      throw Error(ErrorCode::MalformedLine,
                  "line " + std::to_string(line_no) + ": " + why);
    }
  }

  ParseMode mode_;
  ParseReport& report_;
};

}  // namespace

EntityType EntityType::parse(std::string_view s) {
  for (const auto& t : kTypeNames) {
    if (t.name == s) return EntityType{t.kind, {}};
  }
  return EntityType{Kind::Other, std::string(s)};
}

std::string EntityType::name() const {
  for (const auto& t : kTypeNames) {
    if (t.kind == kind) return std::string(t.name);
  }
  return other;
}

ParseReport parse_pubtator(std::string_view text, ParseMode mode) {
  ParseReport report;
  BlockParser parser(mode, report);
  std::set<std::string> seen;
  for (const auto& block : split_blocks(text)) {
    auto doc = parser.parse(block);
    if (!doc) continue;
    if (!seen.insert(doc->doc_id).second) {
      if (mode == ParseMode::Strict) {
        throw Error(ErrorCode::DuplicateDocId, doc->doc_id);
      }
      ++report.dropped_documents;
      continue;
    }
    report.documents.push_back(std::move(*doc));
  }
  return report;
}

std::string serialize_pubtator(const std::vector<AnnotatedDocument>& docs) {
  std::string out;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    const auto& doc = docs[i];
    if (i > 0) out += '\n';
    out += doc.doc_id + "|t|" + doc.title + '\n';
    out += doc.doc_id + "|a|" + doc.abstract_text + '\n';
    for (const auto& m : doc.mentions) {
      out += doc.doc_id + '\t' + std::to_string(m.start) + '\t' + std::to_string(m.end) +
             '\t' + m.surface + '\t' + m.entity_type.name();
      if (m.concept_id) out += '\t' + *m.concept_id;
      out += '\n';
    }
  }
  return out;
}

std::map<std::string, int> parse_year_map(std::string_view tsv) {
  std::map<std::string, int> years;
  std::size_t line_no = 0;
  for (const auto& raw : text::split_lines(tsv)) {
    ++line_no;
    const std::string line = text::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    auto fields = text::split(line, '\t');
    std::optional<int> year;
    if (fields.size() == 2) year = parse_int<int>(text::trim(fields[1]));
    if (fields.size() != 2 || text::trim(fields[0]).empty() || !year ||
        *year < kMinYear || *year > kMaxYear) {
      throw Error(ErrorCode::MalformedLine,
                  "year map line " + std::to_string(line_no) + ": expected doc_id<TAB>year");
    }
    years[text::trim(fields[0])] = *year;
  }
  return years;
}

YearAttachReport attach_years(std::vector<AnnotatedDocument>& docs,
                              const std::map<std::string, int>& year_map,
                              const YearAttachOptions& options) {
  if (options.default_year < kMinYear || options.default_year > kMaxYear) {
    throw Error(ErrorCode::ConfigError, "default year out of range");
  }
  YearAttachReport report;
  for (auto& doc : docs) {
    auto it = year_map.find(doc.doc_id);
    if (it != year_map.end()) {
      doc.year = it->second;
      continue;
    }
    if (options.mode == ParseMode::Strict) {
      throw Error(ErrorCode::MissingYear, doc.doc_id);
    }
    doc.year = options.default_year;
    report.missing.push_back(doc.doc_id);
  }
  return report;
}

}  // namespace dalk::corpus
