#include <cmath>
#include <random>

#include "doctest.h"
#include "thinlab/cgs.hpp"
#include "thinlab/errors.hpp"
#include "thinlab/serial.hpp"

using namespace thinlab;

namespace {

CgsInstance scalar_rew(std::function<double(double)> f,
                       std::function<double(double)> g) {
  CgsInstance inst;
  inst.form = CgsInstance::Form::Rew;
  inst.domain = CgsInstance::DomainKind::HalfLine;
  inst.dim = 1;
  inst.magma = reals_magma();
  inst.f = [f = std::move(f)](const Point& pt) {
    return MagmaElement::real(f(pt.s()));
  };
  inst.side_fn = [g = std::move(g)](const Point& pt) { return g(pt.s()); };
  return inst;
}

}  // namespace

TEST_CASE("residual check on hand-picked candidates") {
  auto pairs = cross_pairs(scalar_points(range_grid(0.0, 4.0, 0.5)));

  // additive f with g = 1 solves the equation
  auto cauchy = scalar_rew([](double s) { return 3.0 * s; },
                           [](double) { return 1.0; });
  CHECK(residual_check(cauchy, pairs, 1e-12).max_residual <= 1e-12);

  // scaled log pair
  auto logpair = scalar_rew([](double s) { return 2.0 * std::log1p(0.5 * s); },
                            [](double s) { return 0.5 * s + 1.0; });
  auto pairs10 = cross_pairs(scalar_points(range_grid(0.0, 10.0, 0.5)));
  CHECK(residual_check(logpair, pairs10, 1e-12).max_residual <= 1e-12);

  // squares fail at (1,1) with residual (s+t)^2 - s^2 - t^2 = 2
  auto squares = scalar_rew([](double s) { return s * s; },
                            [](double) { return 1.0; });
  ResidualStats stats = residual_check(squares, pairs, 1e-12);
  CHECK(stats.max_residual >= 2.0);
  CHECK(stats.n_exceeding > 0);
}

TEST_CASE("residual check rejects out-of-domain points by name") {
  auto cauchy = scalar_rew([](double s) { return s; }, [](double) { return 1.0; });
  std::vector<std::pair<Point, Point>> bad = {
      {Point::scalar(-1.0), Point::scalar(0.5)}};
  CHECK_THROWS_WITH_AS(residual_check(cauchy, bad, 1e-12),
                       doctest::Contains("-1"), std::invalid_argument);
  std::vector<std::pair<Point, Point>> wrong_dim = {
      {Point::vec2(0.0, 0.0), Point::vec2(1.0, 1.0)}};
  CHECK_THROWS_AS(residual_check(cauchy, wrong_dim, 1e-12),
                  std::invalid_argument);
}

TEST_CASE("step solutions: s0 = 0 case") {
  auto inst = make_theorem1(
      Theorem1Solution::s0_zero(MagmaElement::word("x"), 1.0), words_magma());
  std::vector<double> pts = {0.0, 0.5, 1.0, 2.0};
  auto pairs = cross_pairs(scalar_points(pts));
  CHECK(residual_check(inst, pairs, 0.0).max_residual == 0.0);
}

TEST_CASE("step solutions: s0 > 0 case, word and scalar codomains") {
  // dyadic grid: h(s) = s0/(s0-s) and h(s)*t stay exactly representable,
  // so the plateau classification cannot flip at the boundary
  auto grid = range_grid(0.0, 9.5, 0.5);
  auto pairs = cross_pairs(scalar_points(grid));

  auto words = make_theorem1(
      Theorem1Solution::s0_positive(1.0, MagmaElement::word("x")), words_magma());
  CHECK(residual_check(words, pairs, 0.0).max_residual == 0.0);

  auto scalars = make_theorem1(
      Theorem1Solution::s0_positive(1.0, MagmaElement::real(5.0)), reals_magma());
  CHECK(residual_check(scalars, pairs, 0.0).max_residual == 0.0);

  // spot checks against the case split: h(0.5) = 2
  CHECK(scalars.side_fn(Point::scalar(0.5)) == 2.0);
  // (0.5, 0.4): both sides on the zero plateau
  CHECK(scalars.f(Point::scalar(0.9)).as_real() == 0.0);
  CHECK(scalars.f(Point::scalar(2.0 * 0.4)).as_real() == 0.0);
  // (0.5, 0.6): both sides on the a plateau
  CHECK(scalars.f(Point::scalar(1.1)).as_real() == 5.0);
  CHECK(scalars.f(Point::scalar(2.0 * 0.6)).as_real() == 5.0);
  // s = s0: h vanishes and the equation reduces to a = a + f(0)
  CHECK(scalars.side_fn(Point::scalar(1.0)) == 0.0);
}

TEST_CASE("step solution constructors validate their input") {
  CHECK_THROWS_AS(make_theorem1(Theorem1Solution::s0_zero(
                                    MagmaElement::word(""), 1.0),
                                words_magma()),
                  std::invalid_argument);  // a must differ from identity
  CHECK_THROWS_AS(Theorem1Solution::s0_zero(MagmaElement::word("x"), 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(Theorem1Solution::s0_positive(-1.0, MagmaElement::word("x")),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_theorem1(Theorem1Solution::s0_zero(
                                    MagmaElement::real(1.0), 1.0),
                                words_magma()),
                  std::invalid_argument);  // kind mismatch
}

TEST_CASE("linear and log families solve the rewritten equation") {
  auto linear = make_log_family({0.0, MagmaElement::real(2.0)});
  auto pairs = cross_pairs(scalar_points(range_grid(0.0, 20.0, 1.0)));
  CHECK(residual_check(linear, pairs, 1e-12).max_residual <= 1e-12);

  auto logfam = make_log_family({1.0, MagmaElement::real(1.0)});
  CHECK(residual_check(logfam, pairs, 1e-10).max_residual <= 1e-10);
  // f(1 + g(1)*2) = log 6 = log 2 + log 3
  double lhs = logfam.f(Point::scalar(1.0 + 2.0 * 2.0)).as_real();
  CHECK(lhs == doctest::Approx(std::log(6.0)).epsilon(1e-15));
  CHECK(lhs == doctest::Approx(std::log(2.0) + std::log(3.0)).epsilon(1e-14));

  // componentwise vector variant on a seeded random grid
  auto logvec = make_log_family({0.5, MagmaElement::vec({1.0, -2.0})});
  std::mt19937 rng(5150);
  std::uniform_real_distribution<double> unif(0.0, 50.0);
  std::vector<Point> pts;
  for (int i = 0; i < 25; ++i) pts.push_back(Point::scalar(unif(rng)));
  CHECK(residual_check(logvec, cross_pairs(pts), 1e-10).max_residual <= 1e-10);

  CHECK_THROWS_AS(make_log_family({0.5, MagmaElement::real(0.0)}),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_log_family({-0.5, MagmaElement::real(1.0)}),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_log_family({0.5, MagmaElement::word("x")}),
                  std::invalid_argument);
}

TEST_CASE("f(0) is the identity exactly for every constructed instance") {
  auto instances = {
      make_theorem1(Theorem1Solution::s0_zero(MagmaElement::word("x"), 2.0),
                    words_magma()),
      make_theorem1(Theorem1Solution::s0_positive(0.7, MagmaElement::real(3.0)),
                    reals_magma()),
      make_log_family({0.0, MagmaElement::real(2.0)}),
      make_log_family({1.5, MagmaElement::vec({0.5, 1.0})}),
  };
  for (const auto& inst : instances)
    CHECK(distance(inst.f(Point::scalar(0.0)), inst.magma.identity) == 0.0);
}

TEST_CASE("side-function multiplicativity for g(s) = alpha s + 1") {
  auto grid = range_grid(0.0, 10.0, 0.5);
  CHECK(gs_multiplicativity_check(0.0, grid, grid) == 0.0);
  CHECK(gs_multiplicativity_check(0.25, grid, grid) <= 1e-12);
  // exact integer spot check: g(2 + g(2)*3) = 12 = g(2) g(3)
  double alpha = 1.0;
  auto g = [alpha](double s) { return alpha * s + 1.0; };
  CHECK(g(2.0 + g(2.0) * 3.0) == 12.0);
  CHECK(g(2.0) * g(3.0) == 12.0);
}

TEST_CASE("log of g turns the composition into addition") {
  auto grid = range_grid(0.0, 10.0, 0.5);
  for (double alpha : {0.25, 1.0, 3.0}) {
    auto g = [alpha](double s) { return alpha * s + 1.0; };
    auto k = [&g](double s) { return std::log(g(s)); };
    double worst = 0.0;
    for (double s : grid)
      for (double t : grid)
        worst = std::max(worst,
                         std::abs(k(s + g(s) * t) - k(s) - k(t)));
    CHECK(worst <= 1e-12);
  }
}

TEST_CASE("finite differences recover the side function") {
  auto grid = range_grid(0.0, 4.75, 0.25);
  auto h1 = derive_h_from_f([](double s) { return 2.0 * s; }, grid, 1e-4);
  for (double h : h1) CHECK(h == doctest::Approx(1.0).epsilon(1e-8));

  auto h2 = derive_h_from_f([](double s) { return std::log1p(s); }, grid, 1e-4);
  // h(1) = f'(1)/f'(0) = 0.5
  CHECK(h2[4] == doctest::Approx(0.5).epsilon(1e-6));

  auto h3 = derive_h_from_f([](double s) { return 3.0 * std::log1p(2.0 * s); },
                            grid, 1e-4);
  CHECK(h3[2] == doctest::Approx(0.5).epsilon(1e-6));  // s=0.5: 1/(1+2*0.5)

  CHECK_THROWS_AS(derive_h_from_f([](double) { return 1.0; }, grid, 1e-4),
                  DegenerateError);
}

TEST_CASE("lower bound probe on g") {
  auto grid = range_grid(0.0, 10.0, 0.5);
  CHECK(probe_g_lower_bound(make_log_family({1.0, MagmaElement::real(1.0)}),
                            grid));
  CHECK(probe_g_lower_bound(make_log_family({0.0, MagmaElement::real(2.0)}),
                            grid));

  // fabricated pair: g = 0.5 fails the bound AND the equation
  auto fake = scalar_rew([](double s) { return s; }, [](double) { return 0.5; });
  CHECK_FALSE(probe_g_lower_bound(fake, grid));
  auto pairs = cross_pairs(scalar_points(range_grid(0.0, 2.0, 1.0)));
  // residual at (1,1): f(1.5) vs f(1) + f(1)
  CHECK(residual_check(fake, pairs, 1e-12).max_residual >= 0.5);
}

TEST_CASE("regularity probes") {
  auto points = range_grid(0.0, 5.0, 0.25);
  std::vector<double> steps = {1e-2, 1e-4, 1e-6};

  RegularityReport log_rep = probe_regularity(
      [](double s) { return std::log1p(2.0 * s); }, points, steps);
  CHECK(log_rep.right_continuous);
  CHECK(log_rep.monotone);
  CHECK(log_rep.injective_on_grid);

  // step solution: right continuous and monotone but constant on plateaus
  auto step = make_theorem1(
      Theorem1Solution::s0_positive(1.0, MagmaElement::real(5.0)), reals_magma());
  RegularityReport step_rep = probe_regularity(
      [&step](double s) { return step.f(Point::scalar(s)).as_real(); }, points,
      steps);
  CHECK(step_rep.right_continuous);
  CHECK(step_rep.monotone);
  CHECK_FALSE(step_rep.injective_on_grid);

  RegularityReport sin_rep =
      probe_regularity([](double s) { return std::sin(s); }, points, steps);
  CHECK(sin_rep.right_continuous);
  CHECK_FALSE(sin_rep.monotone);
  // and the sine candidate fails the equation outright
  auto sine = scalar_rew([](double s) { return std::sin(s); },
                         [](double) { return 1.0; });
  auto pairs = cross_pairs(scalar_points(range_grid(0.0, 3.0, 0.5)));
  CHECK(residual_check(sine, pairs, 1e-9).max_residual > 0.1);
}

TEST_CASE("duality swaps the two equations") {
  auto logfam = make_log_family({0.5, MagmaElement::real(1.5)});
  auto pairs = cross_pairs(scalar_points(range_grid(0.0, 20.0, 1.0)));
  auto equ = dual_instance(logfam);
  CHECK(equ.form == CgsInstance::Form::Equ);
  CHECK(residual_check(equ, pairs, 1e-10).max_residual <= 1e-10);
  // and back again
  auto rew = dual_instance(equ);
  CHECK(rew.form == CgsInstance::Form::Rew);
  CHECK(residual_check(rew, pairs, 1e-10).max_residual <= 1e-10);
}

TEST_CASE("perturbed g is caught: the checker is not vacuous") {
  auto logfam = make_log_family({0.5, MagmaElement::real(1.5)});
  CgsInstance bent = logfam;
  bent.side_fn = [g0 = logfam.side_fn](const Point& pt) {
    return 1.001 * g0(pt);
  };
  auto pairs = cross_pairs(scalar_points(range_grid(0.0, 100.0, 2.5)));
  CHECK(residual_check(bent, pairs, 1e-10).max_residual >= 1e-5);
}

TEST_CASE("rigidity falsifier on the plane") {
  std::vector<Point> grid;
  for (double x : range_grid(-2.0, 2.0, 1.0))
    for (double y : range_grid(-2.0, 2.0, 1.0)) grid.push_back(Point::vec2(x, y));
  auto reals = reals_magma();

  auto f_additive = [](const Point& v) {
    return MagmaElement::real(1.0 * v.c[0] + 2.0 * v.c[1]);
  };
  auto g_one = [](const Point&) { return 1.0; };
  RigidityVerdict ok = vector_space_rigidity_falsifier(g_one, f_additive, reals,
                                                       grid, 1e-9);
  CHECK(ok.kind == RigidityVerdict::Kind::ConsistentSolution);

  auto g_tilt = [](const Point& v) { return 1.0 + v.c[0]; };
  RigidityVerdict bad = vector_space_rigidity_falsifier(g_tilt, f_additive,
                                                        reals, grid, 1e-9);
  CHECK(bad.kind == RigidityVerdict::Kind::Falsified);
  CHECK(bad.residual > 1e-9);

  auto f_zero = [](const Point&) { return MagmaElement::real(0.0); };
  CHECK_THROWS_AS(vector_space_rigidity_falsifier(g_one, f_zero, reals, grid,
                                                  1e-9),
                  std::invalid_argument);

  std::vector<Point> lopsided;
  for (double x : range_grid(0.0, 2.0, 1.0)) lopsided.push_back(Point::vec2(x, x));
  CHECK_THROWS_AS(vector_space_rigidity_falsifier(g_tilt, f_additive, reals,
                                                  lopsided, 1e-9),
                  std::invalid_argument);
}

TEST_CASE("parallel residual kernel matches the serial reference") {
  auto logfam = make_log_family({0.5, MagmaElement::real(1.5)});
  auto pairs = cross_pairs(scalar_points(range_grid(0.0, 60.0, 0.5)));
  std::vector<double> par_res, ser_res;
  ResidualStats par = residual_check(logfam, pairs, 1e-10, &par_res);
  ResidualStats ser = serial::residual_check(logfam, pairs, 1e-10, &ser_res);
  CHECK(par.max_residual == ser.max_residual);
  CHECK(par_res == ser_res);
}

TEST_CASE("grid helpers") {
  auto g = range_grid(0.0, 100.0, 2.5);
  CHECK(g.size() == 41);
  CHECK(g.front() == 0.0);
  CHECK(g.back() == 100.0);
  CHECK(parse_range_spec("0:2:0.5") == std::vector<double>{0.0, 0.5, 1.0, 1.5, 2.0});
  CHECK_THROWS_AS(parse_range_spec("nonsense"), UsageError);
  CHECK_THROWS_AS(range_grid(0.0, 1.0, -0.5), std::invalid_argument);
}
