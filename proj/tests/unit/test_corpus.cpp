#include <doctest.h>

#include <random>

#include "dalk/corpus.hpp"
#include "dalk/error.hpp"
#include "dalk/text.hpp"
#include "support.hpp"

using namespace dalk;
using corpus::ParseMode;

namespace {

const std::string kThreeDocs =
    "101|t|Tau and amyloid.\n"
    "101|a|APOE4 raises risk of Alzheimer disease.\n"
    "101\t0\t3\tTau\tGene\t4137\n"
    "101\t17\t22\tAPOE4\tGene\t348\n"
    "101\t38\t55\tAlzheimer disease\tDisease\tMESH:D000544\n"
    "\n"
    "102|t|Caf\xC3\xA9 study.\n"
    "102|a|Caffeine in mice with dementia.\n"
    "102\t12\t20\tCaffeine\tChemical\tMESH:D002110\n"
    "102\t24\t28\tmice\tSpecies\n"
    "102\t34\t42\tdementia\tDisease\tMESH:D003704\n"
    "\n"
    "103|t|Empty.\n"
    "103|a|No annotations here.\n";

std::string random_word(std::mt19937_64& rng) {
  static const std::vector<std::string> pieces = {"tau", "APOE", "amyloid", "\xC3\xA9", "beta",
                                                  "\xE2\x80\x99s", "cortex", "42", "-", "("};
  std::uniform_int_distribution<std::size_t> pick(0, pieces.size() - 1);
  std::uniform_int_distribution<int> len(1, 3);
  std::string w;
  for (int i = len(rng); i > 0; --i) w += pieces[pick(rng)];
  return w;
}

std::string random_sentence(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> words(1, 12);
  std::string s;
  for (int i = words(rng); i > 0; --i) {
    if (!s.empty()) s += ' ';
    s += random_word(rng);
  }
  return s + '.';
}

corpus::AnnotatedDocument random_document(std::mt19937_64& rng, const std::string& id) {
  static const std::vector<std::string> types = {"Gene",    "Chemical", "Disease",
                                                 "Species", "CellLine", "Mutation",
                                                 "DNAMutation"};
  corpus::AnnotatedDocument doc;
  doc.doc_id = id;
  doc.title = random_sentence(rng);
  doc.abstract_text = random_sentence(rng);
  const std::string full = doc.full_text();
  const auto offsets = text::codepoint_offsets(full);
  const std::size_t length = offsets.size() - 1;
  std::uniform_int_distribution<std::size_t> pos(0, length - 1);
  std::uniform_int_distribution<int> count(0, 6);
  std::uniform_int_distribution<std::size_t> type(0, types.size() - 1);
  std::uniform_int_distribution<int> coin(0, 1);
  for (int i = count(rng); i > 0; --i) {
    std::size_t a = pos(rng);
    std::uniform_int_distribution<std::size_t> span(1, std::min<std::size_t>(8, length - a));
    std::size_t b = a + span(rng);
    corpus::EntityMention m;
    m.start = a;
    m.end = b;
    m.surface = full.substr(offsets[a], offsets[b] - offsets[a]);
    if (text::trim(m.surface) != m.surface || m.surface.empty()) continue;
    m.entity_type = corpus::EntityType::parse(types[type(rng)]);
    if (coin(rng)) m.concept_id = "MESH:" + std::to_string(a * 31 + b);
    doc.mentions.push_back(m);
  }
  std::stable_sort(doc.mentions.begin(), doc.mentions.end(), [](const auto& x, const auto& y) {
    return std::tie(x.start, x.end) < std::tie(y.start, y.end);
  });
  return doc;
}

}  // namespace

TEST_SUITE("corpus") {
  TEST_CASE("minimal block parses to a document without mentions") {
    const auto report = corpus::parse_pubtator("1|t|T.\n1|a|A.\n");
    REQUIRE(report.documents.size() == 1);
    CHECK(report.documents[0].doc_id == "1");
    CHECK(report.documents[0].title == "T.");
    CHECK(report.documents[0].abstract_text == "A.");
    CHECK(report.documents[0].mentions.empty());
    CHECK_FALSE(report.documents[0].year.has_value());
  }

  TEST_CASE("degenerate span is out of range") {
    const std::string text = "1|t|Tau.\n1|a|Amyloid.\n1\t3\t3\tx\tGene\n";
    try {
      corpus::parse_pubtator(text);
      FAIL("expected OffsetOutOfRange");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::OffsetOutOfRange);
    }
    const auto lenient = corpus::parse_pubtator(text, ParseMode::Lenient);
    REQUIRE(lenient.documents.size() == 1);
    CHECK(lenient.dropped_annotations == 1);
  }

  TEST_CASE("span past the end and mismatched surface") {
    const std::string past = "1|t|Tau.\n1|a|Amyloid.\n1\t0\t99\tTau\tGene\n";
    CHECK_THROWS_AS(corpus::parse_pubtator(past), Error);
    const std::string wrong = "1|t|Tau.\n1|a|Amyloid.\n1\t0\t3\tTAU\tGene\n";
    try {
      corpus::parse_pubtator(wrong);
      FAIL("expected MentionMismatch");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::MentionMismatch);
    }
  }

  TEST_CASE("duplicate document ids") {
    const std::string text = "1|t|A.\n1|a|B.\n\n1|t|C.\n1|a|D.\n";
    try {
      corpus::parse_pubtator(text);
      FAIL("expected DuplicateDocId");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::DuplicateDocId);
    }
    const auto lenient = corpus::parse_pubtator(text, ParseMode::Lenient);
    CHECK(lenient.documents.size() == 1);
    CHECK(lenient.dropped_documents == 1);
  }

  TEST_CASE("stray lines fail strict parsing and are counted leniently") {
    const std::string text = "1|t|A.\n1|a|B.\ngarbage\n";
    try {
      corpus::parse_pubtator(text);
      FAIL("expected MalformedLine");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::MalformedLine);
      CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
    const auto lenient = corpus::parse_pubtator(text, ParseMode::Lenient);
    CHECK(lenient.documents.size() == 1);
    CHECK(lenient.dropped_lines == 1);
  }

  TEST_CASE("offsets are code points over title, one space, abstract") {
    const auto report = corpus::parse_pubtator(kThreeDocs);
    REQUIRE(report.documents.size() == 3);
    const auto& cafe = report.documents[1];
    REQUIRE(cafe.mentions.size() == 3);
    CHECK(cafe.mentions[0].surface == "Caffeine");
    CHECK(cafe.mentions[1].entity_type.kind == corpus::EntityType::Kind::Species);
    CHECK_FALSE(cafe.mentions[1].concept_id.has_value());
    CHECK(cafe.mentions[2].concept_id == "MESH:D003704");
  }

  TEST_CASE("unknown entity types are kept verbatim") {
    const auto t = corpus::EntityType::parse("DNAMutation");
    CHECK(t.kind == corpus::EntityType::Kind::Other);
    CHECK(t.name() == "DNAMutation");
    CHECK(corpus::EntityType::parse("Gene").name() == "Gene");
  }

  TEST_CASE("three document fixture round-trips byte for byte") {
    const auto docs = corpus::parse_pubtator(kThreeDocs).documents;
    CHECK(corpus::serialize_pubtator(docs) == kThreeDocs);
    CHECK(corpus::serialize_pubtator(corpus::parse_pubtator(kThreeDocs + "\n\n").documents) ==
          kThreeDocs);
    std::string crlf;
    for (char c : kThreeDocs) {
      if (c == '\n') crlf += '\r';
      crlf += c;
    }
    CHECK(corpus::serialize_pubtator(corpus::parse_pubtator(crlf).documents) == kThreeDocs);
  }

  TEST_CASE("random documents round-trip and every span indexes its surface") {
    std::mt19937_64 rng(20240611);
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<corpus::AnnotatedDocument> docs;
      std::uniform_int_distribution<int> n(1, 4);
      for (int i = n(rng); i > 0; --i) docs.push_back(random_document(rng, std::to_string(i)));
      const std::string text = corpus::serialize_pubtator(docs);
      const auto parsed = corpus::parse_pubtator(text).documents;
      REQUIRE(parsed == docs);
      CHECK(corpus::serialize_pubtator(parsed) == text);
      for (const auto& d : parsed) {
        const auto full = d.full_text();
        const auto offsets = text::codepoint_offsets(full);
        for (const auto& m : d.mentions) {
          REQUIRE(m.end < offsets.size());
          CHECK(full.substr(offsets[m.start], offsets[m.end] - offsets[m.start]) == m.surface);
        }
      }
    }
  }

  TEST_CASE("years attach from the map") {
    auto docs = corpus::parse_pubtator(kThreeDocs).documents;
    const auto years = corpus::parse_year_map("# id year\n101\t2015\n102\t2019\n\n103\t2011\n");
    CHECK(years.at("101") == 2015);
    const auto report = corpus::attach_years(docs, years);
    CHECK(report.missing.empty());
    CHECK(docs[0].year == 2015);
    CHECK(docs[2].year == 2011);
  }

  TEST_CASE("missing years: strict throws, lenient applies the default") {
    auto docs = corpus::parse_pubtator(kThreeDocs).documents;
    try {
      corpus::attach_years(docs, {});
      FAIL("expected MissingYear");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::MissingYear);
    }
    corpus::YearAttachOptions lenient{ParseMode::Lenient, 2011};
    const auto report = corpus::attach_years(docs, {{"102", 2020}}, lenient);
    CHECK(report.missing == std::vector<std::string>{"101", "103"});
    CHECK(docs[0].year == 2011);
    CHECK(docs[1].year == 2020);
  }

  TEST_CASE("malformed year lines") {
    CHECK_THROWS_AS(corpus::parse_year_map("101 2015\n"), Error);
    CHECK_THROWS_AS(corpus::parse_year_map("101\tsoon\n"), Error);
    CHECK_THROWS_AS(corpus::parse_year_map("101\t1500\n"), Error);
  }

  TEST_CASE("bundled mini corpus parses strictly with a year for every document") {
    auto docs = corpus::parse_pubtator(
                    testing::read_file(testing::data_dir() / "mini" / "corpus.pubtator"))
                    .documents;
    CHECK(docs.size() == 20);
    const auto years = corpus::parse_year_map(
        testing::read_file(testing::data_dir() / "mini" / "years.tsv"));
    CHECK(corpus::attach_years(docs, years).missing.empty());
    for (const auto& d : docs) {
      REQUIRE(d.year.has_value());
      CHECK(*d.year >= 2011);
      CHECK(*d.year <= 2021);
    }
  }
}
