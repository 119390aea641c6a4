#include <doctest.h>

#include <functional>

#include "cli.hpp"
#include "dalk/error.hpp"
#include "dalk/run_config.hpp"
#include "support.hpp"

using namespace dalk;

namespace {

void expect_config_error(const std::function<void()>& fn, const std::string& fragment) {
  try {
    fn();
    FAIL("expected ConfigError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ConfigError);
    CHECK_MESSAGE(std::string(e.what()).find(fragment) != std::string::npos, e.what());
  }
}

}  // namespace

TEST_SUITE("config") {
  TEST_CASE("the subset parser reads every value kind") {
    const auto t = parse_config(
        "# top comment\n"
        "top = 1\n"
        "[provider]\n"
        "mode = \"replay\"   # trailing comment\n"
        "model = 'gpt-4'\n"
        "temperature = 0.25\n"
        "[ bench ]\n"
        "keywords = [\"APOE\", \"tau # not a comment\"]\n"
        "ks = [1, 3]\n"
        "empty = []\n"
        "flag = false\n"
        "escaped = \"a\\\"b\\n\"\n");
    CHECK(t.at("top") == 1);
    CHECK(t.at("provider.mode") == "replay");
    CHECK(t.at("provider.model") == "gpt-4");
    CHECK(t.at("provider.temperature") == 0.25);
    CHECK(t.at("bench.keywords") == nlohmann::json({"APOE", "tau # not a comment"}));
    CHECK(t.at("bench.ks") == nlohmann::json({1, 3}));
    CHECK(t.at("bench.empty").empty());
    CHECK(t.at("bench.flag") == false);
    CHECK(t.at("bench.escaped") == "a\"b\n");
    CHECK(parse_config("").empty());
  }

  TEST_CASE("malformed config lines name the line") {
    expect_config_error([] { parse_config("[a]\nkey value\n"); }, "line 2");
    expect_config_error([] { parse_config("[a\n"); }, "line 1");
    expect_config_error([] { parse_config("k = \"open\n"); }, "unterminated");
    expect_config_error([] { parse_config("k = [1, 2\n"); }, "line 1");
    expect_config_error([] { parse_config("k = 1\nk = 2\n"); }, "duplicate");
    expect_config_error([] { parse_config("k = 1 2\n"); }, "trailing");
    expect_config_error([] { parse_config("k = maybe\n"); }, "maybe");
    expect_config_error([] { parse_config("a b = 1\n"); }, "invalid key");
    expect_config_error([] { parse_config("k =\n"); }, "missing value");
  }

  TEST_CASE("apply maps keys onto fields and rejects the rest") {
    RunConfig c;
    c.apply(parse_config("[sampler]\nhop_bound = 3\nrelevance_threshold = 0.2\nmax_triples = 12\n"
                         "[retrieval]\nk = 7\njoint = true\n[pipeline]\nmode = \"baseline\"\n"
                         "[construct]\nmethod = \"pairwise\"\n[bench]\nyears = [2015, 2016]\n"
                         "[paths]\nkg = \"out/kg.tsv\"\n"),
            "/base");
    CHECK(c.sampler.hop_bound == 3);
    CHECK(c.sampler.relevance_threshold == 0.2);
    CHECK(c.sampler.max_triples_per_subgraph == 12);
    CHECK(c.retrieve_k == 7);
    CHECK(c.joint_rerank);
    CHECK(c.mode == qa::Mode::Baseline);
    CHECK(c.method == kg::Method::PairWise);
    CHECK(c.years == std::vector<int>{2015, 2016});
    CHECK(c.paths.kg == std::filesystem::path("/base/out/kg.tsv"));
    const auto p = c.pipeline_config();
    CHECK(p.retrieve.retrieve_k == 7);
    CHECK(p.retrieve.joint);
    CHECK(p.sampler.hop_bound == 3);

    expect_config_error([] { RunConfig().apply(parse_config("[sampler]\nhops = 2\n")); }, "sampler.hops");
    expect_config_error([] { RunConfig().apply(parse_config("[retrieval]\nk = \"five\"\n")); }, "retrieval.k");
    expect_config_error([] { RunConfig().apply(parse_config("[retrieval]\nk = -1\n")); }, "non-negative");
    expect_config_error([] { RunConfig().apply(parse_config("[sampler]\nmax_triples = -4\n")); }, "non-negative");
    expect_config_error([] { RunConfig().apply(parse_config("[bench]\nks = [5, -1]\n")); }, "bench.ks");
    expect_config_error([] { RunConfig().apply(parse_config("[retrieval]\njoint = 1\n")); }, "boolean");
    expect_config_error([] { RunConfig().apply(parse_config("[provider]\nmode = \"psychic\"\n")); }, "psychic");
  }

  TEST_CASE("validate catches out-of-range values") {
    CHECK_NOTHROW(RunConfig().validate());
    auto with = [](const char* text) {
      RunConfig c;
      c.apply(parse_config(text));
      return c;
    };
    CHECK_THROWS_AS(with("[retrieval]\nk = 0\n").validate(), Error);
    CHECK_THROWS_AS(with("[provider]\nin_flight = 0\n").validate(), Error);
    CHECK_THROWS_AS(with("[provider]\ntemperature = 2.5\n").validate(), Error);
    CHECK_THROWS_AS(with("[provider]\nupstream = \"other\"\n").validate(), Error);
    CHECK_THROWS_AS(with("[provider]\nembedder = \"other\"\n").validate(), Error);
    CHECK_THROWS_AS(with("[sampler]\nhop_bound = 0\n").validate(), Error);
    CHECK_THROWS_AS(with("[bench]\nks = [0]\n").validate(), Error);
  }

  TEST_CASE("flags beat the file, which beats the defaults") {
    testing::TempDir dir("dalk-config");
    testing::write_file(dir / "run.toml",
                        "[sampler]\nhop_bound = 3\nrelevance_threshold = 0.1\n"
                        "[retrieval]\nk = 9\n[paths]\nkg = \"graph.tsv\"\n");
    const RunConfig defaults;

    cli::CommonFlags f;
    f.config = dir / "run.toml";
    auto c = cli::resolve_config(f);
    CHECK(c.sampler.hop_bound == 3);
    CHECK(c.sampler.relevance_threshold == 0.1);
    CHECK(c.retrieve_k == 9);
    CHECK(c.paths.kg == (dir / "graph.tsv").lexically_normal());
    CHECK(c.sampler.max_triples_per_subgraph == defaults.sampler.max_triples_per_subgraph);
    CHECK(c.provider.model == defaults.provider.model);

    f.hop_bound = 1;
    f.k = 2;
    f.kg = "/elsewhere/kg.tsv";
    f.model = "gpt-4";
    c = cli::resolve_config(f);
    CHECK(c.sampler.hop_bound == 1);
    CHECK(c.retrieve_k == 2);
    CHECK(c.paths.kg == std::filesystem::path("/elsewhere/kg.tsv"));
    CHECK(c.provider.model == "gpt-4");
    CHECK(c.sampler.relevance_threshold == 0.1);

    cli::CommonFlags bad;
    bad.config = dir / "missing.toml";
    expect_config_error([&] { cli::resolve_config(bad); }, "missing.toml");
    cli::CommonFlags zero;
    zero.k = 0;
    expect_config_error([&] { cli::resolve_config(zero); }, "retrieval.k");
  }

  TEST_CASE("bundled configs load") {
    for (const char* name : {"mini", "case_study"}) {
      const auto c = load_run_config(testing::data_dir() / name / "config.toml");
      CHECK_NOTHROW(c.validate());
      CHECK(std::filesystem::exists(c.paths.rules));
      CHECK(std::filesystem::exists(c.paths.dataset));
    }
  }

  TEST_CASE("exit codes follow the error class") {
    CHECK(cli::exit_code_for(Error(ErrorCode::ConfigError, "x")) == 2);
    CHECK(cli::exit_code_for(Error(ErrorCode::CacheMiss, "x")) == 3);
    CHECK(cli::exit_code_for(Error(ErrorCode::PreconditionViolation, "x")) == 4);
    CHECK(cli::exit_code_for(std::runtime_error("x")) == 4);
  }
}
