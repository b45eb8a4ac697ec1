// Command-line front end: thin | invariance | cgs | suite.
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "thinlab/errors.hpp"
#include "thinlab/report.hpp"
#include "thinlab/suite.hpp"

using namespace thinlab;

namespace {

json parse_json_arg(const std::string& field, const std::string& text) {
  try {
    return json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw UsageError(field, std::string("invalid JSON: ") + e.what());
  }
}

json load_json_file(const std::string& field, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw UsageError(field, std::string("invalid JSON in ") + path + ": " + e.what());
  }
}

// Explicit seed from flag, else config, else THINLAB_SEED. The source is
// recorded in the report header whenever the environment supplied it.
void resolve_seed(RunConfig& cfg, const std::optional<unsigned long long>& flag_seed) {
  if (flag_seed) {
    cfg.seed = *flag_seed;
    cfg.seed_source = "flag";
    return;
  }
  if (cfg.seed) return;  // from config file
  if (const char* env = std::getenv("THINLAB_SEED")) {
    try {
      size_t pos = 0;
      unsigned long long v = std::stoull(env, &pos);
      if (pos != std::string(env).size()) throw std::invalid_argument(env);
      cfg.seed = v;
      cfg.seed_source = "env:THINLAB_SEED";
    } catch (const std::exception&) {
      throw UsageError("seed", std::string("THINLAB_SEED is not a number: ") + env);
    }
  }
}

void emit_json(const json& j, const std::string& output_path) {
  if (output_path.empty()) {
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::ofstream out(output_path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + output_path + "'");
  out << j.dump(2) << "\n";
  if (!out) throw IoError("write failed on '" + output_path + "'");
}

void emit_rows(const std::vector<PlotRow>& rows, const std::string& output_path) {
  if (!output_path.empty()) {
    export_plot_data(rows, output_path);
    return;
  }
  if (rows.empty()) throw UsageError("result", "nothing to export");
  std::cout << "x,series,value\n";
  for (const auto& row : rows)
    std::cout << format_number(row.x) << ',' << row.series << ','
              << format_number(row.value) << '\n';
}

MagmaElement element_from_json(const std::string& field, const json& j,
                               const MagmaOps& magma) {
  switch (magma.identity.kind()) {
    case MagmaElement::Kind::Real:
      if (j.is_number()) return MagmaElement::real(j.get<double>());
      throw UsageError(field, "expected a number for the reals magma");
    case MagmaElement::Kind::Vec: {
      int dim = magma.identity.vec_dim();
      if (j.is_array() && static_cast<int>(j.size()) == dim) {
        std::vector<double> v;
        for (const auto& e : j) {
          if (!e.is_number()) throw UsageError(field, "non-numeric entry");
          v.push_back(e.get<double>());
        }
        return MagmaElement::vec(std::move(v));
      }
      throw UsageError(field, "expected an array of " + std::to_string(dim) +
                                  " numbers for " + magma.name);
    }
    case MagmaElement::Kind::Word:
      if (j.is_string()) return MagmaElement::word(j.get<std::string>());
      throw UsageError(field, "expected a string for the words magma");
    case MagmaElement::Kind::Rational: {
      if (j.is_number_integer())
        return MagmaElement::rational(Rational(j.get<long long>()));
      if (j.is_string()) {
        const std::string s = j.get<std::string>();
        auto slash = s.find('/');
        try {
          if (slash == std::string::npos)
            return MagmaElement::rational(Rational(std::stoll(s)));
          return MagmaElement::rational(Rational(std::stoll(s.substr(0, slash)),
                                                 std::stoll(s.substr(slash + 1))));
        } catch (const std::exception&) {
          throw UsageError(field, "expected \"n\" or \"n/d\" for rationals");
        }
      }
      throw UsageError(field, "expected an integer or \"n/d\" string");
    }
  }
  throw UsageError(field, "unsupported magma element");
}

CgsInstance build_cgs_instance(const RunConfig& cfg) {
  const MagmaOps magma = magma_by_name(cfg.magma_name);
  const json& params = cfg.params;
  if (!params.is_object()) throw UsageError("params", "expected a JSON object");
  auto need = [&params](const char* key) -> const json& {
    if (!params.contains(key))
      throw UsageError(std::string("params.") + key, "missing");
    return params[key];
  };

  CgsInstance inst;
  if (cfg.cgs_family == "theorem1a" || cfg.cgs_family == "theorem1b") {
    MagmaElement a = element_from_json("params.a", need("a"), magma);
    Theorem1Solution sol =
        cfg.cgs_family == "theorem1a"
            ? Theorem1Solution::s0_zero(a, need("b").get<double>())
            : Theorem1Solution::s0_positive(need("s0").get<double>(), a);
    inst = make_theorem1(sol, magma);
    if (cfg.equation == "rew")
      throw UsageError("equation",
                       "step solutions have zeros of h; no rewritten form exists");
  } else if (cfg.cgs_family == "linear" || cfg.cgs_family == "log") {
    if (magma.identity.kind() != MagmaElement::Kind::Real &&
        magma.identity.kind() != MagmaElement::Kind::Vec)
      throw UsageError("magma", "linear/log families need reals or vec<d>");
    MagmaElement a = element_from_json("params.a", need("a"), magma);
    double alpha = cfg.cgs_family == "linear" ? 0.0 : need("alpha").get<double>();
    inst = make_log_family({alpha, a});
    if (cfg.equation == "equ") inst = dual_instance(inst);
  } else {
    throw UsageError("family",
                     "expected theorem1a|theorem1b|linear|log, got '" +
                         cfg.cgs_family + "'");
  }
  return inst;
}

int run_thin(const RunConfig& cfg) {
  CoefficientSequence seq = family_from_json(cfg.family);
  PmfVector result;
  if (cfg.mc) {
    if (cfg.samples < 1) throw UsageError("samples", "must be >= 1");
    if (!cfg.seed)
      throw UsageError("seed", "Monte Carlo runs require an explicit seed");
    result = thin_mc(pmf(seq, cfg.theta, cfg.trunc_tol), ThinningParam(cfg.p),
                     cfg.samples, *cfg.seed);
  } else {
    result = thin_exact(pmf(seq, cfg.theta, cfg.trunc_tol), ThinningParam(cfg.p));
  }

  if (cfg.out_format == "csv") {
    emit_rows(rows_from_pmf(result), cfg.output_path);
    return 0;
  }
  json j;
  j["command"] = "thin";
  j["family"] = family_to_json(seq);
  j["theta"] = cfg.theta;
  j["p"] = cfg.p;
  j["mode"] = cfg.mc ? "mc" : "exact";
  if (cfg.mc) {
    j["samples"] = cfg.samples;
    j["seed"] = *cfg.seed;
    j["seed_source"] = cfg.seed_source;
  }
  j["pmf"] = pmf_to_json(result);
  emit_json(j, cfg.output_path);
  return 0;
}

int run_invariance(const RunConfig& cfg) {
  CoefficientSequence seq = family_from_json(cfg.family);
  if (cfg.theta_grid.empty()) throw UsageError("theta-grid", "grid must be nonempty");
  if (cfg.p_grid.empty()) throw UsageError("p-grid", "grid must be nonempty");

  std::vector<ThinningReport> reports;
  bool all_passed = true;
  for (double theta : cfg.theta_grid) {
    for (double p : cfg.p_grid) {
      reports.push_back(check_invariance(seq, theta, ThinningParam(p),
                                         cfg.invariance_tol, cfg.identity_tol));
      all_passed = all_passed && reports.back().passed;
    }
  }

  if (cfg.out_format == "csv") {
    emit_rows(rows_from_reports(reports), cfg.output_path);
    return 0;
  }
  json j;
  j["command"] = "invariance";
  j["family"] = family_to_json(seq);
  j["theta_grid"] = cfg.theta_grid;
  j["p_grid"] = cfg.p_grid;
  j["invariance_tol"] = cfg.invariance_tol;
  j["identity_tol"] = cfg.identity_tol;
  json reps = json::array();
  for (const auto& rep : reports) reps.push_back(report_to_json(rep));
  j["reports"] = reps;
  j["all_passed"] = all_passed;
  emit_json(j, cfg.output_path);
  return 0;
}

int run_cgs(const RunConfig& cfg) {
  CgsInstance inst = build_cgs_instance(cfg);
  auto grid_values = parse_range_spec(cfg.grid_spec);
  auto pairs = cross_pairs(scalar_points(grid_values));
  std::vector<double> per_point;
  ResidualStats stats = residual_check(inst, pairs, cfg.invariance_tol,
                                       &per_point);

  if (cfg.out_format == "csv") {
    emit_rows(rows_from_residual_grid(pairs, per_point), cfg.output_path);
    return 0;
  }
  json j;
  j["command"] = "cgs";
  j["equation"] = cfg.equation;
  j["family"] = cfg.cgs_family;
  j["params"] = cfg.params;
  j["magma"] = cfg.magma_name;
  j["grid"] = cfg.grid_spec;
  j["tol"] = cfg.invariance_tol;
  j["stats"] = residual_stats_to_json(stats);
  emit_json(j, cfg.output_path);
  return 0;
}

int run_suite_cmd(const RunConfig& cfg) {
  if (!cfg.seed)
    throw UsageError("seed", "the suite runs Monte Carlo checks and needs a seed");
  SuiteConfig suite_cfg = suite_config_from_run(cfg);
  SuiteResult result = run_suite(suite_cfg);

  for (const auto& c : result.checks)
    std::cerr << (c.passed ? "[PASS] " : "[FAIL] ") << c.name << "  " << c.detail
              << "\n";
  std::cerr << "overall: " << (result.overall ? "PASS" : "FAIL") << "\n";

  if (cfg.out_format == "csv") {
    std::vector<PlotRow> rows;
    for (size_t i = 0; i < result.checks.size(); ++i)
      rows.push_back({static_cast<double>(i), result.checks[i].name,
                      result.checks[i].worst});
    emit_rows(rows, cfg.output_path);
  } else {
    emit_json(suite_to_json(result, suite_cfg, cfg.seed_source), cfg.output_path);
  }
  return result.overall ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"power-series thinning and functional-equation verification"};
  app.require_subcommand(1);

  std::string family_arg, theta_grid_arg, p_grid_arg, config_path;
  std::string params_arg = "{}";
  std::string out_flag, output_flag;
  std::optional<unsigned long long> seed_flag;
  RunConfig cfg;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON config file");
    cmd->add_option("--out", out_flag, "json|csv");
    cmd->add_option("--output", output_flag, "output path (default stdout)");
    cmd->add_option("--seed", seed_flag, "RNG seed");
  };

  CLI::App* thin = app.add_subcommand("thin", "thin one distribution");
  thin->add_option("--family", family_arg, "family spec JSON");
  thin->add_option("--theta", cfg.theta, "family parameter");
  thin->add_option("--p", cfg.p, "retention probability");
  thin->add_flag("--mc", cfg.mc, "Monte Carlo instead of exact mixing");
  bool exact_flag = false;
  thin->add_flag("--exact", exact_flag, "exact binomial mixing (default)");
  thin->add_option("--samples", cfg.samples, "Monte Carlo sample count");
  add_common(thin);

  CLI::App* inv = app.add_subcommand("invariance", "invariance check over a grid");
  inv->add_option("--family", family_arg, "family spec JSON");
  inv->add_option("--theta-grid", theta_grid_arg, "comma list or start:stop:step");
  inv->add_option("--p-grid", p_grid_arg, "comma list or start:stop:step");
  inv->add_option("--tol", cfg.invariance_tol, "TV tolerance");
  inv->add_option("--identity-tol", cfg.identity_tol, "series identity tolerance");
  add_common(inv);

  CLI::App* cgs = app.add_subcommand("cgs", "functional equation residuals");
  cgs->add_option("--equation", cfg.equation, "equ|rew");
  cgs->add_option("--family", cfg.cgs_family, "theorem1a|theorem1b|linear|log");
  cgs->add_option("--params", params_arg, "family parameters JSON");
  cgs->add_option("--grid", cfg.grid_spec, "start:stop:step");
  cgs->add_option("--magma", cfg.magma_name, "reals|rationals|words|vec<d>");
  cgs->add_option("--tol", cfg.invariance_tol, "residual tolerance");
  add_common(cgs);

  CLI::App* suite = app.add_subcommand("suite", "full verification battery");
  suite->add_option("--tol", cfg.invariance_tol, "TV tolerance");
  suite->add_option("--identity-tol", cfg.identity_tol, "series identity tolerance");
  add_common(suite);

  CLI11_PARSE(app, argc, argv);

  try {
    if (!config_path.empty()) {
      cfg = parse_config_json(load_json_file("config", config_path));
    } else {
      if (app.got_subcommand(thin)) cfg.command = RunConfig::Command::Thin;
      if (app.got_subcommand(inv)) cfg.command = RunConfig::Command::Invariance;
      if (app.got_subcommand(cgs)) cfg.command = RunConfig::Command::Cgs;
      if (app.got_subcommand(suite)) cfg.command = RunConfig::Command::Suite;
      if (!family_arg.empty()) cfg.family = parse_json_arg("family", family_arg);
      if (!theta_grid_arg.empty())
        cfg.theta_grid = parse_grid_arg("theta-grid", theta_grid_arg);
      if (!p_grid_arg.empty()) cfg.p_grid = parse_grid_arg("p-grid", p_grid_arg);
      cfg.params = parse_json_arg("params", params_arg);
      if (!(cfg.invariance_tol > 0.0)) throw UsageError("tol", "must be positive");
      if (!(cfg.identity_tol > 0.0))
        throw UsageError("identity-tol", "must be positive");
    }
    // explicit flags win over the config document
    if (!out_flag.empty()) cfg.out_format = out_flag;
    if (!output_flag.empty()) cfg.output_path = output_flag;
    if (cfg.out_format != "json" && cfg.out_format != "csv")
      throw UsageError("out", "expected json or csv");
    resolve_seed(cfg, seed_flag);

    switch (cfg.command) {
      case RunConfig::Command::Thin:
        return run_thin(cfg);
      case RunConfig::Command::Invariance:
        return run_invariance(cfg);
      case RunConfig::Command::Cgs:
        return run_cgs(cfg);
      case RunConfig::Command::Suite:
        return run_suite_cmd(cfg);
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const ThetaDomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
