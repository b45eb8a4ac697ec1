#include "thinlab/power_series.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "thinlab/errors.hpp"

namespace thinlab {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr long kHardTermCap = 5'000'000;
}  // namespace

CoefficientSequence CoefficientSequence::poisson() {
  CoefficientSequence s;
  s.kind_ = Kind::Poisson;
  return s;
}

CoefficientSequence CoefficientSequence::binomial(int n) {
  if (n < 1) throw std::invalid_argument("binomial: n must be >= 1");
  CoefficientSequence s;
  s.kind_ = Kind::Binomial;
  s.n_ = n;
  return s;
}

CoefficientSequence CoefficientSequence::negative_binomial(double r) {
  if (!(r > 0.0)) throw std::invalid_argument("negative_binomial: r must be > 0");
  CoefficientSequence s;
  s.kind_ = Kind::NegativeBinomial;
  s.r_ = r;
  return s;
}

CoefficientSequence CoefficientSequence::custom(std::vector<double> coeffs,
                                                std::optional<double> decay) {
  if (coeffs.empty()) throw std::invalid_argument("custom: empty coefficient list");
  if (coeffs[0] != 1.0) throw std::invalid_argument("custom: a_0 must equal 1");
  for (double c : coeffs)
    if (!(c >= 0.0)) throw std::invalid_argument("custom: coefficients must be nonnegative");
  if (decay) {
    if (!(*decay > 0.0)) throw std::invalid_argument("custom: decay must be > 0");
    if (!(coeffs.back() > 0.0))
      throw std::invalid_argument("custom: geometric continuation needs a positive last coefficient");
  }
  CoefficientSequence s;
  s.kind_ = Kind::Custom;
  s.coeffs_ = std::move(coeffs);
  s.decay_ = decay;
  return s;
}

bool CoefficientSequence::finite_support() const {
  return kind_ == Kind::Binomial || (kind_ == Kind::Custom && !decay_);
}

int CoefficientSequence::last_index() const {
  if (kind_ == Kind::Binomial) return n_;
  if (kind_ == Kind::Custom && !decay_) return static_cast<int>(coeffs_.size()) - 1;
  return -1;
}

double CoefficientSequence::coefficient(int k) const {
  if (k < 0) throw std::invalid_argument("coefficient: k must be >= 0");
  switch (kind_) {
    case Kind::Poisson:
      return std::exp(-std::lgamma(k + 1.0));
    case Kind::Binomial: {
      if (k > n_) return 0.0;
      double c = 1.0;
      for (int i = 1; i <= k; ++i) c *= static_cast<double>(n_ - k + i) / i;
      return c;
    }
    case Kind::NegativeBinomial:
      return std::exp(log_coefficient(k));
    case Kind::Custom: {
      int len = static_cast<int>(coeffs_.size());
      if (k < len) return coeffs_[k];
      if (!decay_) return 0.0;
      return coeffs_.back() * std::pow(*decay_, k - (len - 1));
    }
  }
  return 0.0;
}

double CoefficientSequence::log_coefficient(int k) const {
  if (k < 0) throw std::invalid_argument("log_coefficient: k must be >= 0");
  switch (kind_) {
    case Kind::Poisson:
      return -std::lgamma(k + 1.0);
    case Kind::Binomial:
      if (k > n_) return -kInf;
      return std::lgamma(n_ + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n_ - k + 1.0);
    case Kind::NegativeBinomial:
      return std::lgamma(r_ + k) - std::lgamma(r_) - std::lgamma(k + 1.0);
    case Kind::Custom: {
      int len = static_cast<int>(coeffs_.size());
      if (k < len) return coeffs_[k] > 0.0 ? std::log(coeffs_[k]) : -kInf;
      if (!decay_) return -kInf;
      return std::log(coeffs_.back()) + (k - (len - 1)) * std::log(*decay_);
    }
  }
  return -kInf;
}

std::optional<double> CoefficientSequence::tail_ratio_bound(int k,
                                                            double theta) const {
  switch (kind_) {
    case Kind::Poisson: {
      double r = theta / (k + 1.0);
      if (r < 1.0) return r;
      return std::nullopt;
    }
    case Kind::Binomial:
      return std::nullopt;  // finite support; caller stops at n
    case Kind::NegativeBinomial: {
      // a_{j+1}/a_j = (r+j)/(j+1): decreasing to 1 for r>=1, increasing
      // to 1 for r<1, so theta*max(ratio at k, 1) bounds all later terms.
      double r = theta * std::max(1.0, (r_ + k) / (k + 1.0));
      if (r < 1.0) return r;
      return std::nullopt;
    }
    case Kind::Custom: {
      if (!decay_) return std::nullopt;  // finite support
      int len = static_cast<int>(coeffs_.size());
      if (k < len - 1) return std::nullopt;  // inside the listed prefix
      double r = *decay_ * theta;
      if (r < 1.0) return r;
      return std::nullopt;
    }
  }
  return std::nullopt;
}

ParameterDomain CoefficientSequence::domain() const {
  switch (kind_) {
    case Kind::Poisson:
    case Kind::Binomial:
      return {kInf, false};
    case Kind::NegativeBinomial:
      return {1.0, false};
    case Kind::Custom:
      if (decay_) return {1.0 / *decay_, false};
      return {kInf, false};
  }
  return {0.0, false};
}

std::string CoefficientSequence::id() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::Poisson:
      os << "poisson";
      break;
    case Kind::Binomial:
      os << "binomial(n=" << n_ << ")";
      break;
    case Kind::NegativeBinomial:
      os << "negbin(r=" << r_ << ")";
      break;
    case Kind::Custom:
      os << "custom(len=" << coeffs_.size();
      if (decay_) os << ",decay=" << *decay_;
      os << ")";
      break;
  }
  return os.str();
}

double PmfVector::sum() const {
  double s = 0.0;
  for (double m : masses) s += m;
  return s;
}

double PmfVector::mean() const {
  double s = 0.0;
  for (size_t k = 0; k < masses.size(); ++k) s += static_cast<double>(k) * masses[k];
  return s;
}

namespace {

void require_extended_domain(const CoefficientSequence& seq, double x) {
  ParameterDomain dom = seq.domain();
  if (!dom.contains_extended(x)) throw ThetaDomainError(x, dom.sup_theta);
}

void require_strict_domain(const CoefficientSequence& seq, double theta) {
  ParameterDomain dom = seq.domain();
  if (!dom.contains_strictly(theta)) throw ThetaDomainError(theta, dom.sup_theta);
}

}  // namespace

double phi_series(const CoefficientSequence& seq, double x, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("phi_series: tol must be > 0");
  require_extended_domain(seq, x);
  const double ax = std::abs(x);
  double sum = 0.0;
  double xk = 1.0;  // x^k
  for (long k = 0; k <= kHardTermCap; ++k) {
    double term = seq.coefficient(static_cast<int>(k)) * xk;
    sum += term;
    if (seq.finite_support() && k == seq.last_index()) return sum;
    auto ratio = seq.tail_ratio_bound(static_cast<int>(k), ax);
    if (ratio && k >= 1) {
      double majorant = std::abs(term) * *ratio / (1.0 - *ratio);
      if (majorant <= tol) return sum;
    }
    xk *= x;
  }
  throw std::runtime_error("phi_series: did not converge within term cap");
}

double phi_eval(const CoefficientSequence& seq, double x, double tol) {
  require_extended_domain(seq, x);
  switch (seq.kind()) {
    case CoefficientSequence::Kind::Poisson:
      return std::exp(x);
    case CoefficientSequence::Kind::Binomial:
      return std::pow(1.0 + x, static_cast<double>(seq.binomial_n()));
    case CoefficientSequence::Kind::NegativeBinomial:
      return std::pow(1.0 - x, -seq.negbin_r());
    case CoefficientSequence::Kind::Custom:
      return phi_series(seq, x, tol);
  }
  return 0.0;
}

double log_phi(const CoefficientSequence& seq, double theta) {
  require_strict_domain(seq, theta);
  switch (seq.kind()) {
    case CoefficientSequence::Kind::Poisson:
      return theta;
    case CoefficientSequence::Kind::Binomial:
      return seq.binomial_n() * std::log1p(theta);
    case CoefficientSequence::Kind::NegativeBinomial:
      return -seq.negbin_r() * std::log1p(-theta);
    case CoefficientSequence::Kind::Custom:
      return std::log(phi_series(seq, theta));
  }
  return 0.0;
}

PmfVector pmf(const CoefficientSequence& seq, double theta, double trunc_tol) {
  if (!(trunc_tol > 0.0)) throw std::invalid_argument("pmf: trunc_tol must be > 0");
  require_strict_domain(seq, theta);
  if (theta == 0.0) return {{1.0}, 0.0};  // only the a_0 term survives

  const double log_theta = std::log(theta);
  const double lphi = log_phi(seq, theta);
  std::vector<double> masses;
  double cum = 0.0;
  for (long k = 0; k <= kHardTermCap; ++k) {
    double la = seq.log_coefficient(static_cast<int>(k));
    double m = (la == -kInf) ? 0.0
                             : std::exp(la + static_cast<double>(k) * log_theta - lphi);
    masses.push_back(m);
    cum += m;
    if (seq.finite_support() && k == seq.last_index()) break;
    auto ratio = seq.tail_ratio_bound(static_cast<int>(k), theta);
    if (ratio && k >= 1) {
      double majorant = m * *ratio / (1.0 - *ratio);
      if (majorant <= trunc_tol) break;
    }
    if (k == kHardTermCap)
      throw std::runtime_error("pmf: truncation did not converge within term cap");
  }
  double tail = std::max(0.0, 1.0 - cum);
  return {std::move(masses), tail};
}

double pgf_eval(const CoefficientSequence& seq, double theta, double s,
                double tol) {
  if (std::abs(s) > 1.0)
    throw std::invalid_argument("pgf_eval: s must lie in [-1, 1]");
  require_strict_domain(seq, theta);
  require_extended_domain(seq, std::abs(s) * theta);
  switch (seq.kind()) {
    case CoefficientSequence::Kind::Poisson:
      return std::exp(theta * (s - 1.0));
    case CoefficientSequence::Kind::Binomial:
      return std::pow((1.0 + s * theta) / (1.0 + theta),
                      static_cast<double>(seq.binomial_n()));
    case CoefficientSequence::Kind::NegativeBinomial:
      return std::pow((1.0 - theta) / (1.0 - s * theta), seq.negbin_r());
    case CoefficientSequence::Kind::Custom:
      return phi_series(seq, s * theta, tol) / phi_series(seq, theta, tol);
  }
  return 0.0;
}

double mean(const CoefficientSequence& seq, double theta) {
  require_strict_domain(seq, theta);
  if (theta == 0.0) return 0.0;
  switch (seq.kind()) {
    case CoefficientSequence::Kind::Poisson:
      return theta;
    case CoefficientSequence::Kind::Binomial:
      return seq.binomial_n() * theta / (1.0 + theta);
    case CoefficientSequence::Kind::NegativeBinomial:
      return seq.negbin_r() * theta / (1.0 - theta);
    case CoefficientSequence::Kind::Custom:
      return pmf(seq, theta).mean();
  }
  return 0.0;
}

double tv_distance(const PmfVector& p, const PmfVector& q) {
  size_t n = std::max(p.masses.size(), q.masses.size());
  double acc = 0.0;
  for (size_t k = 0; k < n; ++k) {
    double pk = k < p.masses.size() ? p.masses[k] : 0.0;
    double qk = k < q.masses.size() ? q.masses[k] : 0.0;
    acc += std::abs(pk - qk);
  }
  return 0.5 * acc;
}

double tv_slack(const PmfVector& p, const PmfVector& q) {
  return 0.5 * (p.tail_bound + q.tail_bound);
}

double pmf_pgf(const PmfVector& p, double s) {
  double acc = 0.0;
  double sk = 1.0;
  for (double m : p.masses) {
    acc += m * sk;
    sk *= s;
  }
  return acc;
}

}  // namespace thinlab
