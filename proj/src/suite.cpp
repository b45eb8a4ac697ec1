#include "thinlab/suite.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>

#include "kernels_impl.hpp"
#include "thinlab/errors.hpp"
#include "thinlab/serial.hpp"

namespace thinlab {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::string brief(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

const std::vector<double> kPGrid = {0.1, 0.3, 0.5, 0.9};

struct FamilyGrid {
  CoefficientSequence seq;
  std::vector<double> thetas;
};

std::vector<FamilyGrid> named_family_grids() {
  return {{CoefficientSequence::poisson(), {0.5, 1.0, 2.0, 5.0}},
          {CoefficientSequence::binomial(10), {0.5, 1.0, 2.0, 5.0}},
          {CoefficientSequence::negative_binomial(3.0), {0.1, 0.2, 0.4, 0.8}}};
}

CheckResult check_poisson_invariance(const SuiteConfig& cfg) {
  auto t0 = Clock::now();
  const auto seq = CoefficientSequence::poisson();
  double worst = 0.0;
  for (double theta : {0.5, 1.0, 2.0, 5.0}) {
    for (double p : kPGrid) {
      PmfVector nu = thin_exact(pmf(seq, theta, cfg.trunc_tol), ThinningParam(p));
      worst = std::max(worst, tv_distance(nu, pmf(seq, p * theta, cfg.trunc_tol)));
    }
  }
  double ms = ms_since(t0);
  CheckResult res;
  res.name = "01_poisson_invariance";
  res.worst = worst;
  res.runtime_ms = ms;
  res.passed = worst <= 1e-10 && ms < 1000.0;
  res.detail = "max TV " + brief(worst) + " over 16 (theta,p) cells";
  return res;
}

CheckResult check_closed_form_fits(const SuiteConfig& cfg) {
  auto t0 = Clock::now();
  double worst_tv = 0.0, worst_fit = 0.0;
  bool all_passed = true;
  for (const auto& fg : named_family_grids()) {
    if (fg.seq.kind() == CoefficientSequence::Kind::Poisson) continue;
    for (double theta : fg.thetas) {
      for (double p : kPGrid) {
        ThinningParam tp(p);
        ThinningReport rep = check_invariance(fg.seq, theta, tp,
                                              cfg.invariance_tol,
                                              cfg.identity_tol);
        worst_tv = std::max(worst_tv, rep.tv);
        worst_fit = std::max(worst_fit,
                             std::abs(rep.fitted_theta_prime -
                                      h_p_closed_form(fg.seq, theta, tp)));
        all_passed = all_passed && rep.passed;
      }
    }
  }
  CheckResult res;
  res.name = "02_binomial_negbin_invariance";
  res.worst = std::max(worst_tv, worst_fit);
  res.runtime_ms = ms_since(t0);
  res.passed = all_passed && worst_tv <= 1e-10 && worst_fit <= 1e-8;
  res.detail = "max TV " + brief(worst_tv) + ", max |fit - closed form| " +
               brief(worst_fit);
  return res;
}

CheckResult check_phi_identity(const SuiteConfig&) {
  auto t0 = Clock::now();
  double worst = 0.0;
  for (const auto& fg : named_family_grids()) {
    for (double theta : fg.thetas) {
      for (double p : kPGrid) {
        ThinningParam tp(p);
        double root = solve_h_p(fg.seq, theta, tp);
        double target =
            std::exp(log_phi(fg.seq, theta) - log_phi(fg.seq, tp.q() * theta));
        worst = std::max(worst, std::abs(phi_eval(fg.seq, root) - target));
      }
    }
  }
  CheckResult res;
  res.name = "03_phi_identity";
  res.worst = worst;
  res.runtime_ms = ms_since(t0);
  res.passed = worst <= 1e-8;
  res.detail = "max |phi(h_p(theta)) - phi(theta)/phi(q theta)| " + brief(worst);
  return res;
}

CheckResult check_pgf_composition(const SuiteConfig& cfg) {
  auto t0 = Clock::now();
  const std::vector<double> s_grid = {0.0, 0.25, 0.5, 0.75, 1.0};
  double worst = 0.0;
  for (const auto& fg : named_family_grids())
    for (double theta : fg.thetas)
      for (double p : kPGrid)
        worst = std::max(worst, pgf_composition_check(fg.seq, theta,
                                                      ThinningParam(p), s_grid,
                                                      cfg.trunc_tol));
  CheckResult res;
  res.name = "04_pgf_composition";
  res.worst = worst;
  res.runtime_ms = ms_since(t0);
  res.passed = worst <= 1e-10;
  res.detail = "max PGF residual " + brief(worst) + " over 5-point s grids";
  return res;
}

CheckResult check_proto_equation(const SuiteConfig&) {
  auto t0 = Clock::now();
  const auto small_grid = range_grid(0.1, 0.5, 0.1);
  const auto negbin_grid = range_grid(0.05, 0.4, 0.05);
  double worst = 0.0;
  long skipped = 0;
  for (double p : {0.3, 0.7}) {
    ThinningParam tp(p);
    for (const auto& [seq, grid] :
         {std::pair{CoefficientSequence::poisson(), small_grid},
          std::pair{CoefficientSequence::binomial(4), small_grid},
          std::pair{CoefficientSequence::negative_binomial(3.0), negbin_grid}}) {
      RhoCheckResult r = rho_check(seq, tp, grid, grid);
      worst = std::max(worst, r.max_residual);
      skipped += r.n_skipped;
    }
  }
  CheckResult res;
  res.name = "05_proto_equation";
  res.worst = worst;
  res.runtime_ms = ms_since(t0);
  res.passed = worst <= 1e-9 && skipped == 0;
  res.detail = "max residual " + brief(worst) + ", " + std::to_string(skipped) +
               " skipped points";
  return res;
}

CheckResult check_negative_control(const SuiteConfig& cfg) {
  auto t0 = Clock::now();
  const auto seq = CoefficientSequence::custom({1.0, 1.0, 1.0});
  ThinningReport rep = check_invariance(seq, 1.0, ThinningParam(0.5),
                                        cfg.invariance_tol, cfg.identity_tol);
  CheckResult res;
  res.name = "06_negative_control";
  res.worst = rep.tv;
  res.runtime_ms = ms_since(t0);
  res.passed = !rep.passed && rep.tv > 1e-3;
  res.detail = "custom(1,1,1) rejected with TV " + brief(rep.tv);
  return res;
}

CheckResult check_mc_consistency(const SuiteConfig& cfg) {
  auto t0 = Clock::now();
  const auto seq = CoefficientSequence::poisson();
  const PmfVector mu = pmf(seq, 2.0, cfg.trunc_tol);
  ThinningParam tp(0.3);
  PmfVector exact = thin_exact(mu, tp);
  PmfVector sampled = thin_mc(mu, tp, 1'000'000, cfg.seed);
  double tv = tv_distance(sampled, exact);
  CheckResult res;
  res.name = "07_mc_consistency";
  res.worst = tv;
  res.runtime_ms = ms_since(t0);
  res.passed = tv <= 0.005;
  res.detail = "TV(mc, exact) " + brief(tv) + " at n=1e6";
  return res;
}

CheckResult check_cgs_solutions(const SuiteConfig&) {
  auto t0 = Clock::now();
  bool ok = true;
  double worst_numeric = 0.0;

  // step solutions over the word magma must check exactly; the grid step
  // is a power of two so h(s)*t is computed without rounding
  const auto word_grid =
      cross_pairs(scalar_points(range_grid(0.0, 9.5, 0.5)));
  const MagmaOps words = words_magma();
  CgsInstance fg1 = make_theorem1(
      Theorem1Solution::s0_zero(MagmaElement::word("x"), 1.0), words);
  CgsInstance fg2 = make_theorem1(
      Theorem1Solution::s0_positive(1.0, MagmaElement::word("x")), words);
  double r1 = residual_check(fg1, word_grid, 0.0).max_residual;
  double r2 = residual_check(fg2, word_grid, 0.0).max_residual;
  ok = ok && r1 == 0.0 && r2 == 0.0;

  const auto wide_grid =
      cross_pairs(scalar_points(range_grid(0.0, 100.0, 2.5)));
  CgsInstance linear = make_log_family({0.0, MagmaElement::real(2.0)});
  CgsInstance logfam = make_log_family({0.5, MagmaElement::real(1.5)});
  CgsInstance logvec = make_log_family({0.5, MagmaElement::vec({1.0, -2.0})});
  for (const CgsInstance* inst : {&linear, &logfam, &logvec}) {
    double r = residual_check(*inst, wide_grid, 1e-10).max_residual;
    worst_numeric = std::max(worst_numeric, r);
    ok = ok && r <= 1e-10;
  }

  // perturbing g must be detected: the checks are not vacuous
  CgsInstance perturbed = logfam;
  perturbed.side_fn = [g0 = logfam.side_fn](const Point& pt) {
    return 1.001 * g0(pt);
  };
  double rp = residual_check(perturbed, wide_grid, 1e-10).max_residual;
  ok = ok && rp >= 1e-5;

  CheckResult res;
  res.name = "08_cgs_solution_suites";
  res.worst = worst_numeric;
  res.runtime_ms = ms_since(t0);
  res.passed = ok;
  res.detail = "word residuals " + brief(std::max(r1, r2)) + ", numeric max " +
               brief(worst_numeric) + ", perturbed control " + brief(rp);
  return res;
}

CheckResult check_br_lemma(const SuiteConfig&) {
  auto t0 = Clock::now();
  const auto grid = range_grid(0.0, 4.75, 0.25);  // 20 points
  const double fd_step = 1e-4;

  auto f_linear = [](double s) { return 2.0 * s; };
  auto f_log = [](double s) { return 3.0 * std::log1p(2.0 * s); };

  double worst = 0.0;
  auto h_linear = derive_h_from_f(f_linear, grid, fd_step);
  for (size_t i = 0; i < grid.size(); ++i)
    worst = std::max(worst, std::abs(h_linear[i] - 1.0));
  auto h_log = derive_h_from_f(f_log, grid, fd_step);
  for (size_t i = 0; i < grid.size(); ++i)
    worst = std::max(worst, std::abs(h_log[i] - 1.0 / (1.0 + 2.0 * grid[i])));

  CheckResult res;
  res.name = "09_br_lemma_recovery";
  res.worst = worst;
  res.runtime_ms = ms_since(t0);
  res.passed = worst <= 1e-6;
  res.detail = "max |h_fd - 1/g| " + brief(worst) + " at fd_step 1e-4";
  return res;
}

CheckResult check_rigidity(const SuiteConfig& cfg) {
  auto t0 = Clock::now();
  std::vector<Point> grid;
  for (double x : range_grid(-2.0, 2.0, 0.5))
    for (double y : range_grid(-2.0, 2.0, 0.5)) grid.push_back(Point::vec2(x, y));

  std::mt19937_64 rng(detail::splitmix64(cfg.seed ^ 0x5261676964697479ULL));
  auto draw_nonzero_pair = [&rng]() {
    while (true) {
      double x = detail::uniform01(rng) * 4.0 - 2.0;
      double y = detail::uniform01(rng) * 4.0 - 2.0;
      if (std::abs(x) >= 0.25 || std::abs(y) >= 0.25) return std::pair{x, y};
    }
  };

  const MagmaOps reals = reals_magma();
  bool ok = true;
  int falsified = 0, consistent = 0;
  for (int trial = 0; trial < 10; ++trial) {
    auto [ax, ay] = draw_nonzero_pair();
    auto [cx, cy] = draw_nonzero_pair();
    auto f = [ax, ay](const Point& v) {
      return MagmaElement::real(ax * v.c[0] + ay * v.c[1]);
    };
    auto g_bad = [cx, cy](const Point& v) {
      return 1.0 + cx * v.c[0] + cy * v.c[1];
    };
    RigidityVerdict v =
        vector_space_rigidity_falsifier(g_bad, f, reals, grid, 1e-9);
    if (v.kind == RigidityVerdict::Kind::Falsified) ++falsified;
    ok = ok && v.kind == RigidityVerdict::Kind::Falsified;

    auto g_one = [](const Point&) { return 1.0; };
    RigidityVerdict w =
        vector_space_rigidity_falsifier(g_one, f, reals, grid, 1e-9);
    if (w.kind == RigidityVerdict::Kind::ConsistentSolution) ++consistent;
    ok = ok && w.kind == RigidityVerdict::Kind::ConsistentSolution;
  }

  CheckResult res;
  res.name = "10_vector_space_rigidity";
  res.worst = 0.0;
  res.runtime_ms = ms_since(t0);
  res.passed = ok && falsified == 10 && consistent == 10;
  res.detail = std::to_string(falsified) + "/10 falsified, " +
               std::to_string(consistent) + "/10 consistent";
  return res;
}

CheckResult check_duality_kernel(const SuiteConfig&) {
  auto t0 = Clock::now();
  const auto s_grid = range_grid(0.0, 20.0, 0.5);
  const auto pairs = cross_pairs(scalar_points(s_grid));

  bool ok = true;
  double worst = 0.0;
  for (const CgsInstance& inst :
       {make_log_family({0.0, MagmaElement::real(2.0)}),
        make_log_family({0.5, MagmaElement::real(1.5)}),
        make_log_family({0.5, MagmaElement::vec({1.0, -2.0})})}) {
    // f(0) = identity, exactly
    ok = ok && distance(inst.f(Point::scalar(0.0)), inst.magma.identity) == 0.0;
    // empty kernel: g stays strictly positive on the sampled points
    for (double s : s_grid) ok = ok && inst.side_fn(Point::scalar(s)) > 0.0;
    // the h = 1/g counterpart must solve the sibling equation
    double r = residual_check(dual_instance(inst), pairs, 1e-10).max_residual;
    worst = std::max(worst, r);
    ok = ok && r <= 1e-10;
  }

  CheckResult res;
  res.name = "11_duality_kernel_invariants";
  res.worst = worst;
  res.runtime_ms = ms_since(t0);
  res.passed = ok;
  res.detail = "max dual residual " + brief(worst) + ", g > 0 on all samples";
  return res;
}

CheckResult check_extra_family(const SuiteConfig& cfg,
                               const CoefficientSequence& seq) {
  auto t0 = Clock::now();
  bool all = true;
  double worst_tv = 0.0;
  int cells = 0;
  for (double theta : cfg.extra_theta_grid) {
    if (!seq.domain().contains_strictly(theta)) continue;
    for (double p : cfg.extra_p_grid) {
      ThinningReport rep = check_invariance(seq, theta, ThinningParam(p),
                                            cfg.invariance_tol,
                                            cfg.identity_tol);
      all = all && rep.passed;
      worst_tv = std::max(worst_tv, rep.tv);
      ++cells;
    }
  }
  CheckResult res;
  res.name = "extra_invariance[" + seq.id() + "]";
  res.worst = worst_tv;
  res.runtime_ms = ms_since(t0);
  res.passed = all && cells > 0;
  res.detail = cells == 0 ? "no theta inside the family domain"
                          : "max TV " + brief(worst_tv) + " over " +
                                std::to_string(cells) + " cells";
  return res;
}

}  // namespace

SuiteResult run_acceptance_battery(const SuiteConfig& cfg) {
  SuiteResult result;
  result.checks.push_back(check_poisson_invariance(cfg));
  result.checks.push_back(check_closed_form_fits(cfg));
  result.checks.push_back(check_phi_identity(cfg));
  result.checks.push_back(check_pgf_composition(cfg));
  result.checks.push_back(check_proto_equation(cfg));
  result.checks.push_back(check_negative_control(cfg));
  result.checks.push_back(check_mc_consistency(cfg));
  result.checks.push_back(check_cgs_solutions(cfg));
  result.checks.push_back(check_br_lemma(cfg));
  result.checks.push_back(check_rigidity(cfg));
  result.checks.push_back(check_duality_kernel(cfg));
  for (const auto& fam : cfg.extra_invariance_families)
    result.checks.push_back(check_extra_family(cfg, fam));
  result.overall = true;
  for (const auto& c : result.checks) result.overall = result.overall && c.passed;
  return result;
}

SuiteResult run_suite(const SuiteConfig& cfg) {
  auto t0 = Clock::now();
  SuiteResult first = run_acceptance_battery(cfg);
  SuiteResult second = run_acceptance_battery(cfg);
  const std::string dump1 = suite_to_json(first, cfg).dump(2);
  const std::string dump2 = suite_to_json(second, cfg).dump(2);

  CheckResult det;
  det.name = "12_determinism";
  det.passed = dump1 == dump2;
  det.worst = det.passed ? 0.0 : 1.0;
  det.runtime_ms = ms_since(t0);
  det.detail = det.passed ? "two battery runs serialized identically"
                          : "reports differ between identical runs";

  SuiteResult result = first;
  result.checks.push_back(det);
  result.overall = result.overall && det.passed;
  return result;
}

SuiteConfig suite_config_from_run(const RunConfig& run) {
  SuiteConfig cfg;
  if (!run.seed)
    throw UsageError("seed", "the suite runs Monte Carlo checks and needs a seed");
  cfg.seed = *run.seed;
  cfg.invariance_tol = run.invariance_tol;
  cfg.identity_tol = run.identity_tol;
  cfg.trunc_tol = run.trunc_tol;
  if (!run.theta_grid.empty()) cfg.extra_theta_grid = run.theta_grid;
  if (!run.p_grid.empty()) cfg.extra_p_grid = run.p_grid;
  for (const auto& fam : run.invariance_families)
    cfg.extra_invariance_families.push_back(family_from_json(fam));
  return cfg;
}

json suite_to_json(const SuiteResult& result, const SuiteConfig& cfg,
                   const std::string& seed_source) {
  json j;
  json jcfg;
  jcfg["seed"] = cfg.seed;
  jcfg["seed_source"] = seed_source;
  jcfg["invariance_tol"] = cfg.invariance_tol;
  jcfg["identity_tol"] = cfg.identity_tol;
  jcfg["trunc_tol"] = cfg.trunc_tol;
  json fams = json::array();
  for (const auto& fam : cfg.extra_invariance_families)
    fams.push_back(family_to_json(fam));
  jcfg["extra_invariance_families"] = fams;
  j["config"] = jcfg;

  json checks = json::array();
  for (const auto& c : result.checks) {
    json jc;
    jc["name"] = c.name;
    jc["passed"] = c.passed;
    jc["worst"] = c.worst;
    jc["detail"] = c.detail;
    checks.push_back(jc);
  }
  j["checks"] = checks;
  j["overall"] = result.overall;
  return j;
}

}  // namespace thinlab
