#ifndef THINLAB_MAGMA_HPP
#define THINLAB_MAGMA_HPP

#include <boost/rational.hpp>
#include <functional>
#include <string>
#include <variant>
#include <vector>

namespace thinlab {

using Rational = boost::rational<long long>;

/// Element of one of the shipped magma carriers: a real scalar, an exact
/// rational scalar, a real vector, or a finite word. Rational and word
/// values compare exactly; the real variants compare with a tolerance
/// supplied by the caller.
struct MagmaElement {
  std::variant<double, Rational, std::vector<double>, std::string> value;

  enum class Kind { Real, Rational, Vec, Word };

  static MagmaElement real(double x) { return {x}; }
  static MagmaElement rational(Rational r) { return {std::move(r)}; }
  static MagmaElement vec(std::vector<double> v) { return {std::move(v)}; }
  static MagmaElement word(std::string w) { return {std::move(w)}; }

  Kind kind() const { return static_cast<Kind>(value.index()); }
  int vec_dim() const;

  double as_real() const { return std::get<double>(value); }
  const Rational& as_rational() const { return std::get<Rational>(value); }
  const std::vector<double>& as_vec() const {
    return std::get<std::vector<double>>(value);
  }
  const std::string& as_word() const { return std::get<std::string>(value); }
};

/// Mismatch measure between two elements of the same kind: absolute
/// difference for reals, infinity norm for vectors, 0/1 for the exact
/// (rational, word) kinds.
double distance(const MagmaElement& x, const MagmaElement& y);

/// Equality up to `tol` for the real kinds; exact for rational and word.
bool approx_equal(const MagmaElement& x, const MagmaElement& y, double tol);

/// Scalar multiple c*x; defined for real scalars and vectors only.
MagmaElement scale(const MagmaElement& x, double c);

std::string to_string(const MagmaElement& x);

/// A set with a binary operation, a two-sided neutral element and the
/// two-sided cancellation property. The operation is total over elements
/// of the instance's own kind; mixing kinds is a type error.
struct MagmaOps {
  std::string name;
  MagmaElement identity;
  bool is_commutative = true;
  std::function<MagmaElement(const MagmaElement&, const MagmaElement&)> op;
};

// Shipped instances.
MagmaOps reals_magma();
MagmaOps rationals_magma();
MagmaOps vec_magma(int dim);
MagmaOps words_magma();

/// Look up an instance by its CLI identifier: "reals", "rationals",
/// "words", or "vec<d>" (e.g. "vec2").
MagmaOps magma_by_name(const std::string& id);

/// Applies the instance's operation after checking both arguments belong
/// to it; throws std::invalid_argument on mixed-instance arguments.
MagmaElement magma_op(const MagmaOps& m, const MagmaElement& x,
                      const MagmaElement& y);

/// True iff op(a,x)=op(a,y) => x=y and op(x,a)=op(y,a) => x=y over all
/// triples drawn from `samples`. Equality uses `eq_tol` for real kinds.
bool check_cancellation(const MagmaOps& m,
                        const std::vector<MagmaElement>& samples,
                        double eq_tol = 0.0);

}  // namespace thinlab

#endif
