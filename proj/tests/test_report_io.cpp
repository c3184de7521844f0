#include <doctest.h>

#include <string>

#include "concord/io.hpp"
#include "concord/report.hpp"
#include "concord/simulation.hpp"

using namespace concord;

namespace {

SimulationReport small_report() {
  SimConfig a;
  a.scenario = Scenario{2, 10, 0.4, std::nullopt};
  a.replicates = 300;
  a.seed = 17;
  SimConfig b = a;
  b.scenario.kappa_target = 1.0;  // exercises the "na" relatives
  return run_grid({a, b});
}

}  // namespace

TEST_CASE("report CSV round-trips every numeric field exactly") {
  const SimulationReport original = small_report();
  const std::string csv = report_to_csv(original);
  const SimulationReport parsed = report_from_csv(csv);

  REQUIRE(parsed.cells.size() == original.cells.size());
  for (std::size_t i = 0; i < parsed.cells.size(); ++i) {
    const SimulationCell& x = original.cells[i];
    const SimulationCell& y = parsed.cells[i];
    CHECK(x.K == y.K);
    CHECK(x.n == y.n);
    CHECK(x.kappa_target == y.kappa_target);
    CHECK(x.v_e_hat == y.v_e_hat);
    CHECK(x.v_exact == y.v_exact);
    CHECK(x.va_exact == y.va_exact);
    CHECK(x.v_bar == y.v_bar);
    CHECK(x.va_bar == y.va_bar);
    CHECK(x.rel_v == y.rel_v);
    CHECK(x.rel_va == y.rel_va);
    CHECK(x.rel_vbar == y.rel_vbar);
    CHECK(x.rel_vabar == y.rel_vabar);
    CHECK(x.degenerate_count == y.degenerate_count);
    CHECK(x.used_replicates == y.used_replicates);
  }
  CHECK(original.summary.rel_v_pct == parsed.summary.rel_v_pct);
  CHECK(report_to_csv(parsed) == csv);
}

TEST_CASE("report JSON and text carry the headline fields") {
  const SimulationReport report = small_report();
  const std::string json = report_to_json(report);
  CHECK(json.find("\"cells\"") != std::string::npos);
  CHECK(json.find("\"v_e_hat\"") != std::string::npos);
  CHECK(json.find("\"summary\"") != std::string::npos);
  const std::string text = report_to_text(report);
  CHECK(text.find("V_E_hat") != std::string::npos);
  CHECK(text.find("VA_exact") != std::string::npos);
}

TEST_CASE("ingest matrix files") {
  const IngestedRatings in = ingest_ratings_text("4,1\n2,3\n", RatingsFormat::matrix);
  REQUIRE(in.is_contingency());
  const ContingencyTable& t = in.contingency();
  CHECK(t.n() == 10);
  CHECK(t.x(0, 0) == 4);
  CHECK(t.x(1, 0) == 2);

  CHECK_THROWS_AS(ingest_ratings_text("", RatingsFormat::matrix), IngestError);
  CHECK_THROWS_AS(ingest_ratings_text("1,2\n3\n", RatingsFormat::matrix), IngestError);
  CHECK_THROWS_AS(ingest_ratings_text("1,x\n3,4\n", RatingsFormat::matrix), IngestError);
  CHECK_THROWS_AS(ingest_ratings_text("1,-2\n3,4\n", RatingsFormat::matrix), IngestError);

  try {
    ingest_ratings_text("1,2\n3,4,5\n", RatingsFormat::matrix);
    FAIL("expected IngestError");
  } catch (const IngestError& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("ingest long-format files") {
  const std::string text =
      "subject,rater,category\n"
      "1,A,1\n1,B,1\n"
      "2,A,2\n2,B,2\n";
  const IngestedRatings in = ingest_ratings_text(text, RatingsFormat::long_format);
  REQUIRE(in.is_contingency());
  CHECK(in.contingency().x(0, 0) == 1);
  CHECK(in.contingency().x(1, 1) == 1);
  CHECK(in.contingency().x(0, 1) == 0);
  CHECK(in.categories == std::vector<std::string>{"1", "2"});
  CHECK(in.raters == std::vector<std::string>{"A", "B"});
}

TEST_CASE("long format with three raters yields a multi-rater table") {
  const std::string text =
      "subject,rater,category\n"
      "s1,A,x\ns1,B,x\ns1,C,y\n"
      "s2,A,y\ns2,B,y\ns2,C,y\n";
  const IngestedRatings in = ingest_ratings_text(text, RatingsFormat::long_format);
  REQUIRE_FALSE(in.is_contingency());
  const MultiRaterTable& mr = in.multi_rater();
  CHECK(mr.R() == 3);
  CHECK(mr.n() == 2);
  CHECK(mr.count(0, 0) == 2);  // subject s1: two ratings in category x
  CHECK(mr.count(1, 1) == 3);
}

TEST_CASE("long format error paths") {
  CHECK_THROWS_AS(ingest_ratings_text("subject,rater\n", RatingsFormat::long_format),
                  IngestError);
  // varying raters per subject
  const std::string varying =
      "subject,rater,category\n"
      "1,A,1\n1,B,1\n1,C,2\n"
      "2,A,2\n2,B,2\n";
  try {
    ingest_ratings_text(varying, RatingsFormat::long_format);
    FAIL("expected IngestError");
  } catch (const IngestError& e) {
    CHECK(std::string(e.what()).find("varying raters") != std::string::npos);
  }
  // duplicate rater for one subject
  const std::string dup =
      "subject,rater,category\n"
      "1,A,1\n1,A,2\n";
  CHECK_THROWS_AS(ingest_ratings_text(dup, RatingsFormat::long_format), IngestError);
  // a single category cannot build a table
  const std::string mono =
      "subject,rater,category\n"
      "1,A,1\n1,B,1\n";
  CHECK_THROWS_AS(ingest_ratings_text(mono, RatingsFormat::long_format), IngestError);
}

TEST_CASE("parse_config: the paper grid comes out in Table-6 order") {
  const std::string text = R"({
    "grid": {"K": [2, 3, 5], "n": [10, 20, 50, 100], "kappa": [0.4, 0.8]},
    "replicates": 10000,
    "seed": 12345
  })";
  const std::vector<SimConfig> configs = parse_config_text(text);
  REQUIRE(configs.size() == 24);
  CHECK(configs[0].scenario.K == 2);
  CHECK(configs[0].scenario.n == 10);
  CHECK(configs[0].scenario.kappa_target == 0.4);
  CHECK(configs[1].scenario.kappa_target == 0.8);  // kappa innermost
  CHECK(configs[2].scenario.n == 20);              // n middle
  CHECK(configs[8].scenario.K == 3);               // K outermost
  CHECK(configs[23].scenario.K == 5);
  CHECK(configs[23].scenario.n == 100);
  CHECK(configs[23].scenario.kappa_target == 0.8);
  for (const SimConfig& cfg : configs) {
    CHECK(cfg.replicates == 10000);
    CHECK(cfg.seed == 12345);
    CHECK(cfg.policy == DegeneratePolicy::redraw);
  }
}

TEST_CASE("parse_config: single-scenario form and validation errors") {
  const std::vector<SimConfig> one =
      parse_config_text(R"({"K": 2, "n": 100, "kappa": 0.4, "replicates": 50})");
  REQUIRE(one.size() == 1);
  CHECK(one[0].scenario.n == 100);

  CHECK_THROWS_AS(parse_config_text(R"({"grid": {"K": [2], "n": [10], "kappa": [1.5]}})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config_text(R"({"K": 2, "n": 10, "kappa": 0.4, "bogus": 1})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config_text("not json"), ConfigError);
  CHECK_THROWS_AS(
      parse_config_text(R"({"grid": {"K": [2, 3], "n": [10], "kappa": [0.4]},
                            "marginals": [0.5, 0.5]})"),
      ConfigError);

  try {
    parse_config_text(R"({"grid": {"K": [2], "n": [10], "kappa": [0.4, 2.0]}})");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.key_path() == "grid.kappa[1]");
  }
}

TEST_CASE("parse_config: marginals and policy flow into the scenarios") {
  const std::vector<SimConfig> configs = parse_config_text(R"({
    "grid": {"K": [2], "n": [10, 20], "kappa": [0.4]},
    "marginals": [0.6, 0.4],
    "degenerate_policy": "drop",
    "seed": 9
  })");
  REQUIRE(configs.size() == 2);
  REQUIRE(configs[0].scenario.marginals.has_value());
  CHECK((*configs[0].scenario.marginals)[0] == 0.6);
  CHECK(configs[0].policy == DegeneratePolicy::drop);
}
