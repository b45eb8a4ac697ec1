#include "thinlab/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "thinlab/errors.hpp"

namespace thinlab {

CoefficientSequence family_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
    throw UsageError("family.kind", "missing or non-string kind");
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "poisson") return CoefficientSequence::poisson();
  if (kind == "binomial") {
    if (!j.contains("n") || !j["n"].is_number_integer())
      throw UsageError("family.n", "binomial requires integer n");
    return CoefficientSequence::binomial(j["n"].get<int>());
  }
  if (kind == "negbin") {
    if (!j.contains("r") || !j["r"].is_number())
      throw UsageError("family.r", "negbin requires numeric r");
    return CoefficientSequence::negative_binomial(j["r"].get<double>());
  }
  if (kind == "custom") {
    if (!j.contains("coeffs") || !j["coeffs"].is_array())
      throw UsageError("family.coeffs", "custom requires a coefficient array");
    std::vector<double> coeffs;
    for (const auto& c : j["coeffs"]) {
      if (!c.is_number()) throw UsageError("family.coeffs", "non-numeric entry");
      coeffs.push_back(c.get<double>());
    }
    std::optional<double> decay;
    if (j.contains("decay")) {
      if (!j["decay"].is_number())
        throw UsageError("family.decay", "decay must be numeric");
      decay = j["decay"].get<double>();
    }
    try {
      return CoefficientSequence::custom(std::move(coeffs), decay);
    } catch (const std::invalid_argument& e) {
      throw UsageError("family.coeffs", e.what());
    }
  }
  throw UsageError("family.kind", "unknown kind '" + kind + "'");
}

json family_to_json(const CoefficientSequence& seq) {
  json j;
  switch (seq.kind()) {
    case CoefficientSequence::Kind::Poisson:
      j["kind"] = "poisson";
      break;
    case CoefficientSequence::Kind::Binomial:
      j["kind"] = "binomial";
      j["n"] = seq.binomial_n();
      break;
    case CoefficientSequence::Kind::NegativeBinomial:
      j["kind"] = "negbin";
      j["r"] = seq.negbin_r();
      break;
    case CoefficientSequence::Kind::Custom:
      j["kind"] = "custom";
      j["coeffs"] = seq.coeffs();
      if (seq.decay()) j["decay"] = *seq.decay();
      break;
  }
  return j;
}

json report_to_json(const ThinningReport& rep) {
  json j;
  j["family_id"] = rep.family_id;
  j["theta"] = rep.theta;
  j["p"] = rep.p;
  j["fitted_theta_prime"] = rep.fitted_theta_prime;
  j["tv"] = rep.tv;
  j["phi_identity_residual"] = rep.phi_identity_residual;
  j["passed"] = rep.passed;
  return j;
}

json pmf_to_json(const PmfVector& pmf) {
  json j;
  j["masses"] = pmf.masses;
  j["tail_bound"] = pmf.tail_bound;
  return j;
}

json residual_stats_to_json(const ResidualStats& stats) {
  json j;
  j["max_residual"] = stats.max_residual;
  j["n_points"] = stats.n_points;
  j["n_exceeding"] = stats.n_exceeding;
  auto point_json = [](const Point& p) {
    std::vector<double> v(p.c.begin(), p.c.begin() + p.dim);
    return json(v);
  };
  j["worst_point"] = json{{"s", point_json(stats.worst_s)},
                          {"t", point_json(stats.worst_t)}};
  return j;
}

std::string format_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

void export_plot_data(const std::vector<PlotRow>& rows,
                      const std::string& path) {
  if (rows.empty()) throw UsageError("result", "nothing to export");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("export_plot_data: cannot open '" + path + "'");
  out << "x,series,value\n";
  for (const auto& row : rows)
    out << format_number(row.x) << ',' << row.series << ','
        << format_number(row.value) << '\n';
  if (!out) throw IoError("export_plot_data: write failed on '" + path + "'");
}

std::vector<PlotRow> rows_from_pmf(const PmfVector& pmf) {
  std::vector<PlotRow> rows;
  rows.reserve(pmf.masses.size());
  for (size_t k = 0; k < pmf.masses.size(); ++k)
    rows.push_back({static_cast<double>(k), "mass", pmf.masses[k]});
  return rows;
}

std::vector<PlotRow> rows_from_reports(
    const std::vector<ThinningReport>& reps) {
  std::vector<PlotRow> rows;
  rows.reserve(2 * reps.size());
  for (const auto& rep : reps) {
    std::string tag = "p=" + format_number(rep.p);
    rows.push_back({rep.theta, "tv@" + tag, rep.tv});
    rows.push_back({rep.theta, "theta_prime@" + tag, rep.fitted_theta_prime});
  }
  return rows;
}

std::vector<PlotRow> rows_from_residual_grid(
    const std::vector<std::pair<Point, Point>>& grid,
    const std::vector<double>& residuals) {
  std::vector<PlotRow> rows;
  rows.reserve(grid.size());
  for (size_t i = 0; i < grid.size() && i < residuals.size(); ++i)
    rows.push_back({grid[i].first.c[0],
                    "t=" + format_number(grid[i].second.c[0]), residuals[i]});
  return rows;
}

namespace {

std::vector<double> grid_from_json(const json& j, const std::string& field) {
  if (!j.is_array()) throw UsageError(field, "expected an array");
  std::vector<double> g;
  for (const auto& v : j) {
    if (!v.is_number()) throw UsageError(field, "non-numeric entry");
    g.push_back(v.get<double>());
  }
  if (g.empty()) throw UsageError(field, "grid must be nonempty");
  return g;
}

void require_positive(double x, const std::string& field) {
  if (!(x > 0.0)) throw UsageError(field, "must be positive");
}

}  // namespace

RunConfig parse_config_json(const json& j) {
  RunConfig cfg;
  if (!j.is_object()) throw UsageError("config", "expected a JSON object");
  if (!j.contains("command") || !j["command"].is_string())
    throw UsageError("command", "missing command");
  const std::string cmd = j["command"].get<std::string>();
  if (cmd == "thin")
    cfg.command = RunConfig::Command::Thin;
  else if (cmd == "invariance")
    cfg.command = RunConfig::Command::Invariance;
  else if (cmd == "cgs")
    cfg.command = RunConfig::Command::Cgs;
  else if (cmd == "suite")
    cfg.command = RunConfig::Command::Suite;
  else
    throw UsageError("command", "unknown command '" + cmd + "'");

  if (j.contains("family")) cfg.family = j["family"];
  if (j.contains("theta")) cfg.theta = j["theta"].get<double>();
  if (j.contains("p")) cfg.p = j["p"].get<double>();
  if (j.contains("mc")) cfg.mc = j["mc"].get<bool>();
  if (j.contains("samples")) cfg.samples = j["samples"].get<long long>();
  if (j.contains("seed")) {
    cfg.seed = j["seed"].get<unsigned long long>();
    cfg.seed_source = "config";
  }
  if (j.contains("theta_grid"))
    cfg.theta_grid = grid_from_json(j["theta_grid"], "theta_grid");
  if (j.contains("p_grid")) cfg.p_grid = grid_from_json(j["p_grid"], "p_grid");
  if (j.contains("invariance_tol"))
    cfg.invariance_tol = j["invariance_tol"].get<double>();
  if (j.contains("identity_tol"))
    cfg.identity_tol = j["identity_tol"].get<double>();
  if (j.contains("trunc_tol")) cfg.trunc_tol = j["trunc_tol"].get<double>();
  require_positive(cfg.invariance_tol, "invariance_tol");
  require_positive(cfg.identity_tol, "identity_tol");
  require_positive(cfg.trunc_tol, "trunc_tol");

  if (j.contains("equation")) cfg.equation = j["equation"].get<std::string>();
  if (j.contains("cgs_family"))
    cfg.cgs_family = j["cgs_family"].get<std::string>();
  if (j.contains("magma")) cfg.magma_name = j["magma"].get<std::string>();
  if (j.contains("params")) cfg.params = j["params"];
  if (j.contains("grid")) cfg.grid_spec = j["grid"].get<std::string>();

  if (j.contains("out")) cfg.out_format = j["out"].get<std::string>();
  if (cfg.out_format != "json" && cfg.out_format != "csv")
    throw UsageError("out", "expected json or csv");
  if (j.contains("output")) cfg.output_path = j["output"].get<std::string>();

  if (j.contains("invariance_families")) {
    if (!j["invariance_families"].is_array())
      throw UsageError("invariance_families", "expected an array");
    for (const auto& fam : j["invariance_families"])
      cfg.invariance_families.push_back(fam);
  }

  if (cfg.mc && !cfg.seed)
    throw UsageError("seed", "Monte Carlo runs require an explicit seed");
  return cfg;
}

std::vector<double> parse_grid_arg(const std::string& field,
                                   const std::string& arg) {
  if (arg.empty()) throw UsageError(field, "grid must be nonempty");
  if (arg.find(':') != std::string::npos) {
    try {
      return parse_range_spec(arg);
    } catch (const UsageError& e) {
      throw UsageError(field, e.what());
    }
  }
  std::vector<double> g;
  std::istringstream is(arg);
  std::string item;
  while (std::getline(is, item, ',')) {
    try {
      size_t pos = 0;
      double v = std::stod(item, &pos);
      if (pos != item.size()) throw std::invalid_argument(item);
      g.push_back(v);
    } catch (const std::exception&) {
      throw UsageError(field, "bad number '" + item + "'");
    }
  }
  if (g.empty()) throw UsageError(field, "grid must be nonempty");
  return g;
}

}  // namespace thinlab
