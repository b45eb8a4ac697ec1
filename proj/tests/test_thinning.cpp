#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "thinlab/serial.hpp"
#include "thinlab/thinning.hpp"

using namespace thinlab;

TEST_CASE("thinning parameter validation") {
  CHECK_THROWS_AS(ThinningParam(-0.1), std::invalid_argument);
  CHECK_THROWS_AS(ThinningParam(1.1), std::invalid_argument);
  ThinningParam tp(0.3);
  CHECK(tp.p() + tp.q() == 1.0);
}

TEST_CASE("edge operators: p=0 collapses, p=1 is the identity") {
  PmfVector mu = pmf(CoefficientSequence::poisson(), 2.0);
  PmfVector zero = thin_exact(mu, ThinningParam(0.0));
  REQUIRE(zero.masses.size() == 1);
  CHECK(zero.masses[0] == 1.0);
  PmfVector same = thin_exact(mu, ThinningParam(1.0));
  CHECK(same.masses == mu.masses);
  CHECK(same.tail_bound == mu.tail_bound);
}

TEST_CASE("point masses thin explicitly") {
  PmfVector delta0{{1.0}, 0.0};
  PmfVector still = thin_exact(delta0, ThinningParam(0.7));
  REQUIRE(still.masses.size() == 1);
  CHECK(still.masses[0] == doctest::Approx(1.0).epsilon(1e-15));

  PmfVector delta1{{0.0, 1.0}, 0.0};
  PmfVector ber = thin_exact(delta1, ThinningParam(0.3));
  REQUIRE(ber.masses.size() == 2);
  CHECK(ber.masses[0] == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(ber.masses[1] == doctest::Approx(0.3).epsilon(1e-15));
}

TEST_CASE("thinned poisson lands on the closed-form pmf") {
  auto seq = CoefficientSequence::poisson();
  PmfVector nu = thin_exact(pmf(seq, 2.0), ThinningParam(0.3));
  CHECK(tv_distance(nu, pmf(seq, 0.6)) <= 1e-10);
  // independent mixture oracle with its own binomial rows
  auto by_oracle = oracle::thin_by_mixture(pmf(seq, 2.0).masses, 0.3);
  CHECK(oracle::tv(nu.masses, by_oracle) <= 1e-13);
}

TEST_CASE("thinning matches the mixture oracle on long supports") {
  // pushes the summation across the exact/log-space coefficient switch
  auto seq = CoefficientSequence::poisson();
  PmfVector mu = pmf(seq, 25.0);
  REQUIRE(mu.masses.size() > 40);
  PmfVector nu = thin_exact(mu, ThinningParam(0.4));
  auto by_oracle = oracle::thin_by_mixture(mu.masses, 0.4);
  CHECK(oracle::tv(nu.masses, by_oracle) <= 1e-12);
  CHECK(tv_distance(nu, pmf(seq, 10.0)) <= 1e-10);
}

TEST_CASE("semigroup: thinning twice equals thinning by the product") {
  for (const auto& [seq, theta] :
       {std::pair{CoefficientSequence::poisson(), 2.0},
        std::pair{CoefficientSequence::binomial(10), 1.5},
        std::pair{CoefficientSequence::negative_binomial(3.0), 0.5}}) {
    PmfVector mu = pmf(seq, theta);
    PmfVector twice =
        thin_exact(thin_exact(mu, ThinningParam(0.6)), ThinningParam(0.5));
    PmfVector once = thin_exact(mu, ThinningParam(0.3));
    CHECK(tv_distance(twice, once) <= 1e-10);
  }
}

TEST_CASE("mean is linear under thinning") {
  std::mt19937 rng(77);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    double p = unif(rng);
    PmfVector mu = pmf(CoefficientSequence::poisson(), 0.5 + 3.0 * unif(rng));
    PmfVector nu = thin_exact(mu, ThinningParam(p));
    CHECK(std::abs(nu.mean() - p * mu.mean()) <= 1e-10);
  }
}

TEST_CASE("monte carlo thinning is deterministic and converges") {
  PmfVector mu = pmf(CoefficientSequence::poisson(), 2.0);
  ThinningParam tp(0.3);
  PmfVector a = thin_mc(mu, tp, 200'000, 42);
  PmfVector b = thin_mc(mu, tp, 200'000, 42);
  CHECK(a.masses == b.masses);
  PmfVector c = thin_mc(mu, tp, 200'000, 43);
  CHECK(a.masses != c.masses);

  PmfVector exact = thin_exact(mu, tp);
  double bound = 3.0 * std::sqrt(static_cast<double>(mu.masses.size()) / 200'000.0);
  CHECK(tv_distance(a, exact) <= bound);

  PmfVector delta0{{1.0}, 0.0};
  PmfVector mc0 = thin_mc(delta0, tp, 1000, 7);
  CHECK(mc0.masses[0] == 1.0);

  // p=1 resamples mu itself up to sampling noise
  PmfVector resampled = thin_mc(mu, ThinningParam(1.0), 1'000'000, 11);
  CHECK(tv_distance(resampled, mu) <= 0.005);
}

TEST_CASE("pgf composition residual is tiny for the named families") {
  const std::vector<double> s_grid = {0.0, 0.25, 0.5, 0.75, 1.0};
  CHECK(pgf_composition_check(CoefficientSequence::poisson(), 2.0,
                              ThinningParam(0.3), s_grid) <= 1e-10);
  const std::vector<double> s11 = [] {
    std::vector<double> g;
    for (int i = 0; i <= 10; ++i) g.push_back(i / 10.0);
    return g;
  }();
  CHECK(pgf_composition_check(CoefficientSequence::binomial(5), 1.0,
                              ThinningParam(0.5), s11) <= 1e-10);
  CHECK(pgf_composition_check(CoefficientSequence::negative_binomial(3.0), 0.4,
                              ThinningParam(0.5), s_grid) <= 1e-10);
}

TEST_CASE("solve_h_p reproduces the closed forms") {
  CHECK(solve_h_p(CoefficientSequence::poisson(), 2.0, ThinningParam(0.3)) ==
        doctest::Approx(0.6).epsilon(1e-10));
  for (int n : {3, 10})
    CHECK(solve_h_p(CoefficientSequence::binomial(n), 1.0, ThinningParam(0.5)) ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-10));
  CHECK(solve_h_p(CoefficientSequence::negative_binomial(3.0), 0.4,
                  ThinningParam(0.5)) ==
        doctest::Approx(0.25).epsilon(1e-10));
  // p=1: phi(q theta) = phi(0) = 1, so theta' = theta
  for (const auto& seq :
       {CoefficientSequence::poisson(), CoefficientSequence::binomial(5)})
    CHECK(solve_h_p(seq, 1.3, ThinningParam(1.0)) == 1.3);
  // matches the algebraic map across a grid
  for (double theta : {0.5, 1.0, 2.0})
    for (double p : {0.1, 0.5, 0.9})
      CHECK(std::abs(solve_h_p(CoefficientSequence::binomial(10), theta,
                               ThinningParam(p)) -
                     h_p_closed_form(CoefficientSequence::binomial(10), theta,
                                     ThinningParam(p))) <= 1e-10);
}

TEST_CASE("invariance report for families inside the class") {
  ThinningReport pois =
      check_invariance(CoefficientSequence::poisson(), 2.0, ThinningParam(0.3));
  CHECK(pois.passed);
  CHECK(pois.fitted_theta_prime == doctest::Approx(0.6).epsilon(1e-8));
  CHECK(pois.tv <= 1e-10);
  CHECK(std::abs(pois.phi_identity_residual) <= 1e-8);

  ThinningReport nb = check_invariance(CoefficientSequence::negative_binomial(3.0),
                                       0.4, ThinningParam(0.5));
  CHECK(nb.passed);
  CHECK(nb.fitted_theta_prime == doctest::Approx(0.25).epsilon(1e-8));
}

TEST_CASE("flat three-point family leaves the class under thinning") {
  auto seq = CoefficientSequence::custom({1.0, 1.0, 1.0});
  ThinningReport rep = check_invariance(seq, 1.0, ThinningParam(0.5));
  CHECK_FALSE(rep.passed);
  CHECK(rep.tv > 1e-3);

  // exact 3-point convolution oracle: mu = (1,1,1)/3 thinned by p=1/2
  std::vector<double> mu = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  auto nu = oracle::thin_by_mixture(mu, 0.5);
  CHECK(nu[0] == doctest::Approx(1.75 / 3.0).epsilon(1e-14));
  CHECK(nu[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(nu[2] == doctest::Approx(0.25 / 3.0).epsilon(1e-14));
  // best in-family fit by mean matching solves 3t^2 + t - 1 = 0
  double t = (-1.0 + std::sqrt(13.0)) / 6.0;
  CHECK(rep.fitted_theta_prime == doctest::Approx(t).epsilon(1e-8));
}

TEST_CASE("rho closed forms satisfy the splitting identity") {
  auto grid = range_grid(0.1, 0.5, 0.1);
  RhoCheckResult pois =
      rho_check(CoefficientSequence::poisson(), ThinningParam(0.3), grid, grid);
  CHECK(pois.max_residual <= 1e-12);
  CHECK(pois.n_skipped == 0);

  RhoCheckResult bin = rho_check(CoefficientSequence::binomial(4),
                                 ThinningParam(0.3), grid, grid);
  CHECK(bin.max_residual <= 1e-9);
  CHECK(bin.n_evaluated == 25);

  auto nb_grid = range_grid(0.05, 0.4, 0.05);
  RhoCheckResult nb = rho_check(CoefficientSequence::negative_binomial(3.0),
                                ThinningParam(0.3), nb_grid, nb_grid);
  CHECK(nb.max_residual <= 1e-9);

  // rho is p-free for the named kinds
  RhoCheckResult other_p = rho_check(CoefficientSequence::binomial(4),
                                     ThinningParam(0.7), grid, grid);
  CHECK(other_p.max_residual <= 1e-9);
}

TEST_CASE("rho handles u=0, small negative u, and domain exits") {
  RhoMap rho{nullptr, 0.3};
  auto seq = CoefficientSequence::binomial(4);
  rho.seq = &seq;
  CHECK(rho(0.0) == 1.0);

  std::vector<double> u_grid = {-0.05, 0.0, 0.1, 0.3};
  auto v_grid = range_grid(0.1, 0.4, 0.1);
  RhoCheckResult r =
      rho_check(seq, ThinningParam(0.3), u_grid, v_grid);
  CHECK(r.max_residual <= 1e-9);
  CHECK(r.n_skipped == 0);

  // negbin exits its radius at u+v >= 1: those points are skipped, not fatal
  std::vector<double> big_u = {0.8};
  std::vector<double> big_v = {0.5};
  RhoCheckResult skipped = rho_check(CoefficientSequence::negative_binomial(2.0),
                                     ThinningParam(0.3), big_u, big_v);
  CHECK(skipped.n_skipped == 1);
  CHECK(skipped.n_evaluated == 0);
}

TEST_CASE("rho via the bisection route for a custom family") {
  // geometric tail: phi(x) = 1/(1 - x/2), closed form h_p = p t/(1 - q t/2)
  auto geo = CoefficientSequence::custom({1.0}, 0.5);
  RhoMap rho{&geo, 0.4};
  double v = 0.3;
  double q = 0.6;
  double hp = solve_h_p(geo, v / q, ThinningParam(0.4));
  CHECK(rho(v) == doctest::Approx(q / (0.4 * v) * hp).epsilon(1e-12));
  // phi(u+v) = phi(v) phi(u rho(v)) should hold for this family too
  auto grid = range_grid(0.05, 0.25, 0.05);
  RhoCheckResult r = rho_check(geo, ThinningParam(0.4), grid, grid);
  CHECK(r.max_residual <= 1e-8);
}

TEST_CASE("parallel kernels match the serial reference bit for bit") {
  PmfVector mu = pmf(CoefficientSequence::poisson(), 8.0);
  ThinningParam tp(0.37);
  PmfVector par = thin_exact(mu, tp);
  PmfVector ser = serial::thin_exact(mu, tp);
  CHECK(par.masses == ser.masses);
  CHECK(par.tail_bound == ser.tail_bound);

  PmfVector par_mc = thin_mc(mu, tp, 300'000, 99);
  PmfVector ser_mc = serial::thin_mc(mu, tp, 300'000, 99);
  CHECK(par_mc.masses == ser_mc.masses);
}
