#include "thinlab/magma.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

namespace thinlab {

int MagmaElement::vec_dim() const {
  if (kind() != Kind::Vec) return -1;
  return static_cast<int>(as_vec().size());
}

namespace {

void require_same_kind(const MagmaElement& x, const MagmaElement& y,
                       const char* what) {
  if (x.kind() != y.kind())
    throw std::invalid_argument(std::string(what) +
                                ": elements of different kinds");
  if (x.kind() == MagmaElement::Kind::Vec && x.vec_dim() != y.vec_dim())
    throw std::invalid_argument(std::string(what) +
                                ": vectors of different dimension");
}

}  // namespace

double distance(const MagmaElement& x, const MagmaElement& y) {
  require_same_kind(x, y, "distance");
  switch (x.kind()) {
    case MagmaElement::Kind::Real:
      return std::abs(x.as_real() - y.as_real());
    case MagmaElement::Kind::Rational:
      return x.as_rational() == y.as_rational() ? 0.0 : 1.0;
    case MagmaElement::Kind::Vec: {
      double d = 0.0;
      const auto& u = x.as_vec();
      const auto& v = y.as_vec();
      for (size_t i = 0; i < u.size(); ++i)
        d = std::max(d, std::abs(u[i] - v[i]));
      return d;
    }
    case MagmaElement::Kind::Word:
      return x.as_word() == y.as_word() ? 0.0 : 1.0;
  }
  return 1.0;
}

bool approx_equal(const MagmaElement& x, const MagmaElement& y, double tol) {
  return distance(x, y) <= tol;
}

MagmaElement scale(const MagmaElement& x, double c) {
  switch (x.kind()) {
    case MagmaElement::Kind::Real:
      return MagmaElement::real(c * x.as_real());
    case MagmaElement::Kind::Vec: {
      std::vector<double> v = x.as_vec();
      for (double& e : v) e *= c;
      return MagmaElement::vec(std::move(v));
    }
    default:
      throw std::invalid_argument(
          "scale: defined for real scalars and vectors only");
  }
}

std::string to_string(const MagmaElement& x) {
  std::ostringstream os;
  switch (x.kind()) {
    case MagmaElement::Kind::Real:
      os << x.as_real();
      break;
    case MagmaElement::Kind::Rational:
      os << x.as_rational().numerator() << "/" << x.as_rational().denominator();
      break;
    case MagmaElement::Kind::Vec: {
      os << "(";
      const auto& v = x.as_vec();
      for (size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
      os << ")";
      break;
    }
    case MagmaElement::Kind::Word:
      os << '"' << x.as_word() << '"';
      break;
  }
  return os.str();
}

MagmaOps reals_magma() {
  return {"reals", MagmaElement::real(0.0), true,
          [](const MagmaElement& x, const MagmaElement& y) {
            return MagmaElement::real(x.as_real() + y.as_real());
          }};
}

MagmaOps rationals_magma() {
  return {"rationals", MagmaElement::rational(Rational(0)), true,
          [](const MagmaElement& x, const MagmaElement& y) {
            return MagmaElement::rational(x.as_rational() + y.as_rational());
          }};
}

MagmaOps vec_magma(int dim) {
  if (dim < 1) throw std::invalid_argument("vec_magma: dim must be >= 1");
  return {"vec" + std::to_string(dim),
          MagmaElement::vec(std::vector<double>(dim, 0.0)), true,
          [](const MagmaElement& x, const MagmaElement& y) {
            std::vector<double> v = x.as_vec();
            const auto& u = y.as_vec();
            for (size_t i = 0; i < v.size(); ++i) v[i] += u[i];
            return MagmaElement::vec(std::move(v));
          }};
}

MagmaOps words_magma() {
  return {"words", MagmaElement::word(""), false,
          [](const MagmaElement& x, const MagmaElement& y) {
            return MagmaElement::word(x.as_word() + y.as_word());
          }};
}

MagmaOps magma_by_name(const std::string& id) {
  if (id == "reals") return reals_magma();
  if (id == "rationals") return rationals_magma();
  if (id == "words") return words_magma();
  if (id.rfind("vec", 0) == 0 && id.size() > 3) {
    char* end = nullptr;
    long dim = std::strtol(id.c_str() + 3, &end, 10);
    if (end && *end == '\0' && dim >= 1) return vec_magma(static_cast<int>(dim));
  }
  throw std::invalid_argument("unknown magma instance: " + id);
}

MagmaElement magma_op(const MagmaOps& m, const MagmaElement& x,
                      const MagmaElement& y) {
  require_same_kind(m.identity, x, ("magma_op[" + m.name + "]").c_str());
  require_same_kind(m.identity, y, ("magma_op[" + m.name + "]").c_str());
  return m.op(x, y);
}

bool check_cancellation(const MagmaOps& m,
                        const std::vector<MagmaElement>& samples,
                        double eq_tol) {
  if (samples.empty())
    throw std::invalid_argument("check_cancellation: samples must be nonempty");
  for (const auto& a : samples) {
    for (const auto& x : samples) {
      for (const auto& y : samples) {
        if (approx_equal(x, y, eq_tol)) continue;
        if (approx_equal(magma_op(m, a, x), magma_op(m, a, y), eq_tol))
          return false;
        if (approx_equal(magma_op(m, x, a), magma_op(m, y, a), eq_tol))
          return false;
      }
    }
  }
  return true;
}

}  // namespace thinlab
