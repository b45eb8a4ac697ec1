#ifndef THINLAB_ERRORS_HPP
#define THINLAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace thinlab {

// Evaluation point left the convergence domain of the series.
class ThetaDomainError : public std::domain_error {
 public:
  ThetaDomainError(double theta, double sup_theta)
      : std::domain_error("theta=" + std::to_string(theta) +
                          " outside parameter domain [0, " +
                          std::to_string(sup_theta) + ")"),
        theta_(theta),
        sup_theta_(sup_theta) {}

  double theta() const { return theta_; }
  double sup_theta() const { return sup_theta_; }

 private:
  double theta_;
  double sup_theta_;
};

// Bad CLI flag or config entry; names the offending field.
class UsageError : public std::runtime_error {
 public:
  UsageError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Derivative probe hit |f'(0)| below the resolvable threshold.
class DegenerateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace thinlab

#endif
