#ifndef THINLAB_POWER_SERIES_HPP
#define THINLAB_POWER_SERIES_HPP

#include <optional>
#include <string>
#include <vector>

namespace thinlab {

/// Convergence domain of the series: theta in [0, sup_theta), with the
/// endpoint included only when closed_at_sup is set. None of the shipped
/// families include their endpoint.
struct ParameterDomain {
  double sup_theta = 0.0;
  bool closed_at_sup = false;

  bool contains_strictly(double theta) const {
    return theta >= 0.0 && theta < sup_theta;
  }
  // Extension to negative arguments: the same series evaluated on
  // (-sup_theta, sup_theta).
  bool contains_extended(double x) const {
    return x > -sup_theta && x < sup_theta;
  }
};

/// Nonnegative coefficient sequence a_0=1, a_1, a_2, ... defining the
/// series phi(theta) = sum a_k theta^k and the induced discrete family
/// with masses a_k theta^k / phi(theta).
///
/// Custom sequences are finite coefficient lists; an optional decay ratio
/// d continues the list geometrically (a_k = a_last * d^(k-last) beyond
/// the list), which fixes the convergence radius at 1/d. Without a decay
/// the list is the whole sequence and the radius is infinite.
class CoefficientSequence {
 public:
  enum class Kind { Poisson, Binomial, NegativeBinomial, Custom };

  static CoefficientSequence poisson();
  static CoefficientSequence binomial(int n);
  static CoefficientSequence negative_binomial(double r);
  static CoefficientSequence custom(std::vector<double> coeffs,
                                    std::optional<double> decay = {});

  Kind kind() const { return kind_; }
  int binomial_n() const { return n_; }
  double negbin_r() const { return r_; }
  const std::vector<double>& coeffs() const { return coeffs_; }
  std::optional<double> decay() const { return decay_; }

  bool has_closed_form() const { return kind_ != Kind::Custom; }
  /// True when a_k = 0 for all k beyond last_index().
  bool finite_support() const;
  int last_index() const;

  double coefficient(int k) const;
  /// log a_k, -inf where a_k = 0. Preferred for mass computations since
  /// e.g. 1/k! underflows long before the masses do.
  double log_coefficient(int k) const;

  /// Upper bound on the term ratio a_{j+1} theta / a_j over all j >= k,
  /// used as a geometric tail majorant. Empty when no bound below 1 is
  /// known at this k (keep summing).
  std::optional<double> tail_ratio_bound(int k, double theta) const;

  ParameterDomain domain() const;
  std::string id() const;

 private:
  CoefficientSequence() = default;
  Kind kind_ = Kind::Poisson;
  int n_ = 0;
  double r_ = 0.0;
  std::vector<double> coeffs_;
  std::optional<double> decay_;
};

/// Truncated probability mass function on {0,...,K} with the mass beyond
/// K accounted for in tail_bound, so sum(masses) + tail_bound = 1 up to
/// rounding.
struct PmfVector {
  std::vector<double> masses;
  double tail_bound = 0.0;

  int k_max() const { return static_cast<int>(masses.size()) - 1; }
  double sum() const;
  double mean() const;
};

/// Series value at x. Closed forms for the named kinds (exp, (1+x)^n,
/// (1-x)^-r), partial sums for Custom. Accepts the extension to negative
/// x inside (-sup_theta, sup_theta); throws ThetaDomainError outside.
double phi_eval(const CoefficientSequence& seq, double x, double tol = 1e-12);

/// Plain partial-sum evaluation with a geometric-ratio tail majorant;
/// the series route all kinds share, kept as a cross-check against the
/// closed forms.
double phi_series(const CoefficientSequence& seq, double x, double tol = 1e-12);

/// log phi(theta) for theta >= 0; stable where phi itself overflows.
double log_phi(const CoefficientSequence& seq, double theta);

/// Truncated masses a_k theta^k / phi(theta); the truncation point grows
/// until the geometric tail majorant drops below trunc_tol.
PmfVector pmf(const CoefficientSequence& seq, double theta,
              double trunc_tol = 1e-12);

/// phi(s*theta)/phi(theta) for s in [-1,1]; the generating function of
/// pmf(seq, theta) evaluated at s.
double pgf_eval(const CoefficientSequence& seq, double theta, double s,
                double tol = 1e-12);

/// Family mean at theta: theta phi'(theta)/phi(theta) in closed form for
/// the named kinds, truncated first moment for Custom.
double mean(const CoefficientSequence& seq, double theta);

/// Generating function s -> phi(s*theta)/phi(theta) as a callable.
struct Pgf {
  const CoefficientSequence* seq;
  double theta;
  double operator()(double s) const { return pgf_eval(*seq, theta, s); }
};

/// Half the l1 distance between two truncated PMFs over the union of
/// their supports. Tail mass is not folded in; see tv_slack.
double tv_distance(const PmfVector& p, const PmfVector& q);

/// Half the summed tail bounds: the worst-case contribution of the
/// truncated mass to the true total variation distance.
double tv_slack(const PmfVector& p, const PmfVector& q);

/// Generating function of a truncated PMF: sum s^k masses[k].
double pmf_pgf(const PmfVector& p, double s);

}  // namespace thinlab

#endif
