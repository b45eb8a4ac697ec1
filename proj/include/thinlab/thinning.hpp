#ifndef THINLAB_THINNING_HPP
#define THINLAB_THINNING_HPP

#include <span>
#include <stdexcept>
#include <string>

#include "thinlab/power_series.hpp"

namespace thinlab {

/// Retention probability p in [0,1]; q is always derived as 1-p.
class ThinningParam {
 public:
  explicit ThinningParam(double p) : p_(p) {
    if (!(p >= 0.0 && p <= 1.0))
      throw std::invalid_argument("ThinningParam: p must lie in [0,1]");
  }
  double p() const { return p_; }
  double q() const { return 1.0 - p_; }

 private:
  double p_;
};

/// Outcome of one invariance check: the thinned law was fitted back into
/// the family at fitted_theta_prime and compared in total variation, and
/// the series identity phi(theta') = phi(theta)/phi(q theta) was probed.
struct ThinningReport {
  std::string family_id;
  double theta = 0.0;
  double p = 0.0;
  double fitted_theta_prime = 0.0;
  double tv = 0.0;
  double phi_identity_residual = 0.0;
  bool passed = false;
};

/// Law of sum_{n=1}^K I_n with K ~ mu and I_n iid Bernoulli(p), computed
/// by exact binomial mixing: nu_j = sum_{k>=j} mu_k C(k,j) p^j q^(k-j).
/// The input tail bound is propagated unchanged. Runs the output loop in
/// parallel; see serial::thin_exact for the reference loop.
PmfVector thin_exact(const PmfVector& mu, ThinningParam p);

/// Empirical law of the same sum from n_samples seeded draws. Sampling is
/// chunked and each chunk owns a counter-derived RNG stream, so the result
/// is byte-identical for a given seed regardless of thread count.
PmfVector thin_mc(const PmfVector& mu, ThinningParam p, long long n_samples,
                  unsigned long long seed);

/// Worst deviation over s_grid between the generating function of the
/// thinned law and phi((p s + q) theta)/phi(theta).
double pgf_composition_check(const CoefficientSequence& seq, double theta,
                             ThinningParam p, std::span<const double> s_grid,
                             double trunc_tol = 1e-12);

/// Parameter map theta -> theta': the root of
///   phi(theta') = phi(theta)/phi(q theta)
/// found by bisection on [0, theta] (phi is strictly increasing there).
/// Closed forms this must reproduce: p*theta (poisson),
/// p*theta/(1+q*theta) (binomial), p*theta/(1-q*theta) (negbin).
double solve_h_p(const CoefficientSequence& seq, double theta, ThinningParam p,
                 double tol = 1e-10);

/// Closed-form parameter map for the named kinds; throws for Custom.
double h_p_closed_form(const CoefficientSequence& seq, double theta,
                       ThinningParam p);

/// Thins pmf(theta) exactly, fits theta' by mean matching (bisection;
/// total-variation grid scan as fallback), and fills a ThinningReport.
/// Fit trouble on Custom families is reported as non-invariant, never
/// thrown.
ThinningReport check_invariance(const CoefficientSequence& seq, double theta,
                                ThinningParam p, double invariance_tol = 1e-8,
                                double identity_tol = 1e-8);

/// v -> (q/(p v)) * h_p(v/q), with rho(0) = 1 pinned. Closed forms for
/// the named kinds (1, 1/(1+v), 1/(1-v)); bisection-backed for Custom.
struct RhoMap {
  const CoefficientSequence* seq;
  double p;
  double operator()(double v) const;
};

struct RhoCheckResult {
  double max_residual = 0.0;
  int n_evaluated = 0;
  int n_skipped = 0;  // grid points outside the evaluable domain
  double worst_u = 0.0;
  double worst_v = 0.0;
};

/// Worst residual of phi(u+v) - phi(v) phi(u rho(v)) over the grid.
/// Points whose arguments leave the domain are skipped and counted.
RhoCheckResult rho_check(const CoefficientSequence& seq, ThinningParam p,
                         std::span<const double> u_grid,
                         std::span<const double> v_grid);

}  // namespace thinlab

#endif
