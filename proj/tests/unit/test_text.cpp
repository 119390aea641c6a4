#include <doctest.h>

#include "dalk/digest.hpp"
#include "dalk/error.hpp"
#include "dalk/text.hpp"
#include "dalk/triple.hpp"

using namespace dalk;

TEST_SUITE("text") {
  TEST_CASE("normalize_name folds case, whitespace and typographic quotes") {
    CHECK(text::normalize_name("  Alzheimer’s   Disease ") == "alzheimer's disease");
    CHECK(text::normalize_name("“APOE”") == "\"apoe\"");
    CHECK(text::normalize_name("\tTau\nprotein") == "tau protein");
  }

  TEST_CASE("split_lines drops carriage returns") {
    const auto lines = text::split_lines("a\r\nb\nc");
    REQUIRE(lines.size() == 3);
    CHECK(lines[0] == "a");
    CHECK(lines[1] == "b");
    CHECK(lines[2] == "c");
  }

  TEST_CASE("contains_ci matches inside longer words") {
    CHECK(text::contains_ci("Alzheimer's disease", "alzheimer"));
    CHECK_FALSE(text::contains_ci("dementia", "aging"));
  }

  TEST_CASE("codepoint offsets count scalar values") {
    const std::string s = "a\xC3\xA9\xE2\x80\x99z";  // a, e-acute, right quote, z
    const auto offsets = text::codepoint_offsets(s);
    REQUIRE(offsets.size() == 5);
    CHECK(offsets == std::vector<std::size_t>{0, 1, 3, 6, 7});
    CHECK(text::codepoint_count(s) == 4);
  }

  TEST_CASE("tsv escaping round-trips control characters") {
    const std::string raw = "tab\there\nnew\\line\r";
    const auto escaped = text::escape_tsv(raw);
    CHECK(escaped.find('\t') == std::string::npos);
    CHECK(escaped.find('\n') == std::string::npos);
    CHECK(text::unescape_tsv(escaped) == raw);
  }

  TEST_CASE("word_count splits on whitespace runs") {
    CHECK(text::word_count("one two  three\tfour\nfive") == 5);
    CHECK(text::word_count("   ") == 0);
  }

  TEST_CASE("sha256 matches the standard test vectors") {
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  }

  TEST_CASE("triple validity and identity") {
    kg::Triple t{"Tau", "BINDS", "THK", "d1", 2015};
    CHECK(kg::is_valid(t));
    CHECK(kg::render_arrow(t) == "Tau->BINDS->THK");
    kg::Triple same{" tau ", "binds", "thk", "d2", 2011};
    CHECK(kg::key_of(t) == kg::key_of(same));
    CHECK_FALSE(kg::is_valid(kg::Triple{"x", "r", "X", "d"}));
    CHECK_FALSE(kg::is_valid(kg::Triple{"x", " ", "y", "d"}));
    CHECK(kg::tidy(kg::Triple{"  a  b ", "r", "c", "d"}).head == "a b");
  }

  TEST_CASE("method names parse both ways") {
    CHECK(kg::parse_method("generative") == kg::Method::Generative);
    CHECK(kg::parse_method("pairwise") == kg::Method::PairWise);
    CHECK(kg::to_string(kg::Method::PairWise) == "pairwise");
    CHECK_THROWS_AS(kg::parse_method("relation-extraction"), Error);
  }

  TEST_CASE("error classes map to the exit code families") {
    CHECK(classify(ErrorCode::MalformedLine) == ErrorClass::Input);
    CHECK(classify(ErrorCode::ConfigError) == ErrorClass::Input);
    CHECK(classify(ErrorCode::CacheMiss) == ErrorClass::Provider);
    CHECK(classify(ErrorCode::UnmatchedPrompt) == ErrorClass::Provider);
    CHECK(classify(ErrorCode::PreconditionViolation) == ErrorClass::Internal);
  }
}
