#ifndef THINLAB_SUITE_HPP
#define THINLAB_SUITE_HPP

#include <string>
#include <vector>

#include "thinlab/report.hpp"

namespace thinlab {

struct CheckResult {
  std::string name;
  bool passed = false;
  double worst = 0.0;   // worst residual/distance observed, if meaningful
  std::string detail;   // deterministic one-line summary
  double runtime_ms = 0.0;  // informational; kept out of the JSON report
};

struct SuiteResult {
  std::vector<CheckResult> checks;
  bool overall = false;  // conjunction of member verdicts
};

struct SuiteConfig {
  unsigned long long seed = 20250809ULL;
  double invariance_tol = 1e-8;
  double identity_tol = 1e-8;
  double trunc_tol = 1e-12;
  // Families beyond the named three that the invariance battery must
  // accept; each failing family fails the suite.
  std::vector<CoefficientSequence> extra_invariance_families;
  std::vector<double> extra_theta_grid = {0.2, 0.5};
  std::vector<double> extra_p_grid = {0.3, 0.7};
};

/// Runs the full verification battery (invariance, series identities,
/// generating-function composition, Monte Carlo consistency, functional
/// equation suites, rigidity, duality) deterministically for the given
/// seed. One CheckResult per criterion.
SuiteResult run_acceptance_battery(const SuiteConfig& cfg);

/// Battery plus the determinism criterion (the battery is re-run and the
/// two serialized reports compared byte for byte).
SuiteResult run_suite(const SuiteConfig& cfg);

SuiteConfig suite_config_from_run(const RunConfig& run);

/// Canonical JSON form; byte-identical across runs for a fixed config.
/// Runtimes deliberately excluded.
json suite_to_json(const SuiteResult& result, const SuiteConfig& cfg,
                   const std::string& seed_source = "config");

}  // namespace thinlab

#endif
