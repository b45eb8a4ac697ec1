#ifndef THINLAB_REPORT_HPP
#define THINLAB_REPORT_HPP

#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "thinlab/cgs.hpp"
#include "thinlab/power_series.hpp"
#include "thinlab/thinning.hpp"

namespace thinlab {

using json = nlohmann::ordered_json;

// Family specification wire format (field names are fixed):
//   {"kind": "poisson"}
//   {"kind": "binomial", "n": 10}
//   {"kind": "negbin", "r": 3.0}
//   {"kind": "custom", "coeffs": [1,1,1]} with optional "decay": d
CoefficientSequence family_from_json(const json& j);
json family_to_json(const CoefficientSequence& seq);

json report_to_json(const ThinningReport& rep);
json pmf_to_json(const PmfVector& pmf);
json residual_stats_to_json(const ResidualStats& stats);

/// Fixed 12-significant-digit formatting with '.' separator; shared by
/// every CSV writer so outputs diff byte-stably.
std::string format_number(double x);

struct PlotRow {
  double x = 0.0;
  std::string series;
  double value = 0.0;
};

/// Writes header "x,series,value" plus one row per entry. Rejects empty
/// input (UsageError) and unwritable paths (IoError).
void export_plot_data(const std::vector<PlotRow>& rows,
                      const std::string& path);

std::vector<PlotRow> rows_from_pmf(const PmfVector& pmf);
std::vector<PlotRow> rows_from_reports(const std::vector<ThinningReport>& reps);
std::vector<PlotRow> rows_from_residual_grid(
    const std::vector<std::pair<Point, Point>>& grid,
    const std::vector<double>& residuals);

/// One parsed run request. Tolerances must be positive, and Monte Carlo
/// runs must carry an explicit seed (flag, config, or THINLAB_SEED with
/// the source recorded); a missing seed is an error, never a default.
struct RunConfig {
  enum class Command { Thin, Invariance, Cgs, Suite };
  Command command = Command::Suite;

  json family;  // thin/invariance family spec
  double theta = 0.0;
  double p = 0.0;
  bool mc = false;
  long long samples = 0;

  std::optional<unsigned long long> seed;
  std::string seed_source;  // "flag" | "config" | "env:THINLAB_SEED"

  std::vector<double> theta_grid, p_grid;
  double invariance_tol = 1e-8;
  double identity_tol = 1e-8;
  double trunc_tol = 1e-12;

  std::string equation = "rew";       // cgs: equ|rew
  std::string cgs_family;             // theorem1a|theorem1b|linear|log
  std::string magma_name = "reals";
  json params;                        // cgs family parameters
  std::string grid_spec = "0:10:0.5"; // cgs grid "start:stop:step"

  std::string out_format = "json";  // json|csv
  std::string output_path;          // empty -> stdout

  std::vector<json> invariance_families;  // suite: families that must pass
};

/// Validates and normalizes a config document; throws UsageError naming
/// the bad field.
RunConfig parse_config_json(const json& j);

/// Comma list "0.5,1,2" or range "start:stop:step".
std::vector<double> parse_grid_arg(const std::string& field,
                                   const std::string& arg);

}  // namespace thinlab

#endif
