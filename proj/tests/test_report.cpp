#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "thinlab/errors.hpp"
#include "thinlab/report.hpp"
#include "thinlab/suite.hpp"

using namespace thinlab;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("family spec round-trips through JSON") {
  std::mt19937 rng(314);
  for (int trial = 0; trial < 40; ++trial) {
    CoefficientSequence seq = [&]() {
      switch (rng() % 4) {
        case 0:
          return CoefficientSequence::poisson();
        case 1:
          return CoefficientSequence::binomial(1 + static_cast<int>(rng() % 20));
        case 2:
          return CoefficientSequence::negative_binomial(
              0.5 + (rng() % 100) / 10.0);
        default: {
          std::vector<double> coeffs = {1.0};
          int len = static_cast<int>(rng() % 5);
          for (int i = 0; i < len; ++i) coeffs.push_back((rng() % 50) / 10.0);
          if (rng() % 2 && coeffs.back() > 0.0)
            return CoefficientSequence::custom(coeffs, 0.5);
          return CoefficientSequence::custom(coeffs);
        }
      }
    }();
    json j = family_to_json(seq);
    CoefficientSequence back = family_from_json(j);
    CHECK(family_to_json(back) == j);
    CHECK(back.id() == seq.id());
  }
}

TEST_CASE("family spec rejects malformed documents by field") {
  CHECK_THROWS_AS(family_from_json(json::parse("{}")), UsageError);
  CHECK_THROWS_AS(family_from_json(json::parse(R"({"kind":"zeta"})")), UsageError);
  CHECK_THROWS_AS(family_from_json(json::parse(R"({"kind":"binomial"})")),
                  UsageError);
  CHECK_THROWS_AS(family_from_json(json::parse(R"({"kind":"custom","coeffs":[2]})")),
                  UsageError);
  try {
    family_from_json(json::parse(R"({"kind":"negbin"})"));
  } catch (const UsageError& e) {
    CHECK(e.field() == "family.r");
  }
}

TEST_CASE("thinning report serializes its fields verbatim") {
  ThinningReport rep{"poisson", 2.0, 0.3, 0.6, 1e-12, -3e-13, true};
  json j = report_to_json(rep);
  CHECK(j["family_id"] == "poisson");
  CHECK(j["theta"] == 2.0);
  CHECK(j["p"] == 0.3);
  CHECK(j["fitted_theta_prime"] == 0.6);
  CHECK(j["tv"] == 1e-12);
  CHECK(j["phi_identity_residual"] == -3e-13);
  CHECK(j["passed"] == true);
}

TEST_CASE("config parsing validates fields") {
  RunConfig cfg = parse_config_json(json::parse(
      R"({"command":"invariance","family":{"kind":"poisson"},
          "theta_grid":[0.5,1],"p_grid":[0.3],"seed":7})"));
  CHECK(cfg.command == RunConfig::Command::Invariance);
  CHECK(cfg.theta_grid == std::vector<double>{0.5, 1.0});
  CHECK(cfg.seed_source == "config");

  CHECK_THROWS_AS(parse_config_json(json::parse(R"({"command":"meow"})")),
                  UsageError);
  CHECK_THROWS_AS(parse_config_json(json::parse(
                      R"({"command":"invariance","theta_grid":[]})")),
                  UsageError);
  CHECK_THROWS_AS(parse_config_json(json::parse(
                      R"({"command":"thin","invariance_tol":-1})")),
                  UsageError);
  // Monte Carlo without a seed is an error, not a default
  try {
    parse_config_json(json::parse(
        R"({"command":"thin","family":{"kind":"poisson"},
            "theta":2,"p":0.3,"mc":true,"samples":1000})"));
    CHECK(false);
  } catch (const UsageError& e) {
    CHECK(e.field() == "seed");
  }
}

TEST_CASE("grid argument parser accepts lists and ranges") {
  CHECK(parse_grid_arg("theta-grid", "0.5,1,2") ==
        std::vector<double>{0.5, 1.0, 2.0});
  CHECK(parse_grid_arg("grid", "0:1:0.5") == std::vector<double>{0.0, 0.5, 1.0});
  CHECK_THROWS_AS(parse_grid_arg("p-grid", ""), UsageError);
  CHECK_THROWS_AS(parse_grid_arg("p-grid", "0.1,zebra"), UsageError);
}

TEST_CASE("plot export is byte-stable and rejects bad input") {
  PmfVector pv = pmf(CoefficientSequence::poisson(), 1.5);
  auto rows = rows_from_pmf(pv);
  const std::string p1 = "/tmp/thinlab_test_plot1.csv";
  const std::string p2 = "/tmp/thinlab_test_plot2.csv";
  export_plot_data(rows, p1);
  export_plot_data(rows, p2);
  std::string c1 = slurp(p1);
  CHECK(c1 == slurp(p2));
  CHECK(c1.rfind("x,series,value\n", 0) == 0);
  std::remove(p1.c_str());
  std::remove(p2.c_str());

  CHECK_THROWS_AS(export_plot_data({}, p1), UsageError);
  CHECK_THROWS_AS(export_plot_data(rows, "/nonexistent-dir/x.csv"), IoError);
}

TEST_CASE("number formatting is fixed at 12 significant digits") {
  CHECK(format_number(0.5) == "0.5");
  CHECK(format_number(1.0 / 3.0) == "0.333333333333");
  CHECK(format_number(1024.0) == "1024");
}

TEST_CASE("suite flags a family that does not stay in its class") {
  SuiteConfig cfg;
  cfg.seed = 7;
  cfg.extra_invariance_families.push_back(
      CoefficientSequence::custom({1.0, 1.0, 1.0}));
  SuiteResult res = run_acceptance_battery(cfg);
  CHECK_FALSE(res.overall);
  bool found = false;
  for (const auto& c : res.checks) {
    if (c.name.rfind("extra_invariance", 0) == 0) {
      found = true;
      CHECK_FALSE(c.passed);
      CHECK(c.worst > 1e-8);
    } else {
      CHECK(c.passed);
    }
  }
  CHECK(found);
}

TEST_CASE("suite config picks up run config fields") {
  RunConfig run;
  run.command = RunConfig::Command::Suite;
  run.seed = 123;
  run.invariance_families.push_back(json::parse(R"({"kind":"poisson"})"));
  SuiteConfig cfg = suite_config_from_run(run);
  CHECK(cfg.seed == 123);
  REQUIRE(cfg.extra_invariance_families.size() == 1);
  CHECK(cfg.extra_invariance_families[0].id() == "poisson");

  RunConfig no_seed;
  no_seed.command = RunConfig::Command::Suite;
  CHECK_THROWS_AS(suite_config_from_run(no_seed), UsageError);
}
