#include "thinlab/cgs.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "kernels_impl.hpp"
#include "thinlab/errors.hpp"

namespace thinlab {

Point add(const Point& a, const Point& b) {
  if (a.dim != b.dim) throw std::invalid_argument("Point add: dimension mismatch");
  Point r = a;
  for (int i = 0; i < a.dim; ++i) r.c[i] += b.c[i];
  return r;
}

Point scale_point(double a, const Point& p) {
  Point r = p;
  for (int i = 0; i < p.dim; ++i) r.c[i] *= a;
  return r;
}

std::string to_string(const Point& p) {
  std::ostringstream os;
  if (p.dim == 1) {
    os << p.c[0];
  } else {
    os << "(" << p.c[0] << "," << p.c[1] << ")";
  }
  return os.str();
}

namespace detail {

void validate_cgs_grid(const CgsInstance& inst,
                       std::span<const std::pair<Point, Point>> grid) {
  for (const auto& [s, t] : grid) {
    if (s.dim != inst.dim || t.dim != inst.dim)
      throw std::invalid_argument("residual_check: point (" + to_string(s) +
                                  "," + to_string(t) +
                                  ") has wrong dimension for the instance");
    if (inst.domain == CgsInstance::DomainKind::HalfLine &&
        (s.c[0] < 0.0 || t.c[0] < 0.0))
      throw std::invalid_argument("residual_check: point (" + to_string(s) +
                                  "," + to_string(t) +
                                  ") leaves the half-line domain");
  }
}

double cgs_pair_residual(const CgsInstance& inst, const Point& s,
                         const Point& t) {
  MagmaElement lhs, rhs;
  if (inst.form == CgsInstance::Form::Equ) {
    lhs = inst.f(add(s, t));
    rhs = magma_op(inst.magma, inst.f(s), inst.f(scale_point(inst.side_fn(s), t)));
  } else {
    lhs = inst.f(add(s, scale_point(inst.side_fn(s), t)));
    rhs = magma_op(inst.magma, inst.f(s), inst.f(t));
  }
  return distance(lhs, rhs);
}

}  // namespace detail

ResidualStats residual_check(const CgsInstance& inst,
                             std::span<const std::pair<Point, Point>> grid,
                             double tol, std::vector<double>* per_point) {
  detail::validate_cgs_grid(inst, grid);
  std::vector<double> residuals(grid.size());
  const long n = static_cast<long>(grid.size());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i)
    residuals[i] = detail::cgs_pair_residual(inst, grid[i].first, grid[i].second);

  ResidualStats stats;
  stats.n_points = n;
  for (long i = 0; i < n; ++i) {
    if (residuals[i] > tol) ++stats.n_exceeding;
    if (residuals[i] > stats.max_residual) {
      stats.max_residual = residuals[i];
      stats.worst_s = grid[i].first;
      stats.worst_t = grid[i].second;
    }
  }
  if (per_point) *per_point = std::move(residuals);
  return stats;
}

Theorem1Solution Theorem1Solution::s0_zero(MagmaElement a, double b) {
  if (!(b > 0.0)) throw std::invalid_argument("theorem1: b must be > 0");
  Theorem1Solution s;
  s.kase = Case::S0Zero;
  s.a = std::move(a);
  s.b = b;
  return s;
}

Theorem1Solution Theorem1Solution::s0_positive(double s0, MagmaElement a) {
  if (!(s0 > 0.0)) throw std::invalid_argument("theorem1: s0 must be > 0");
  Theorem1Solution s;
  s.kase = Case::S0Positive;
  s.a = std::move(a);
  s.s0 = s0;
  return s;
}

CgsInstance make_theorem1(const Theorem1Solution& sol, const MagmaOps& magma) {
  if (sol.a.kind() != magma.identity.kind())
    throw std::invalid_argument("make_theorem1: element kind does not match magma");
  if (distance(sol.a, magma.identity) == 0.0)
    throw std::invalid_argument("make_theorem1: a must differ from the identity");

  CgsInstance inst;
  inst.form = CgsInstance::Form::Equ;
  inst.domain = CgsInstance::DomainKind::HalfLine;
  inst.dim = 1;
  inst.magma = magma;

  const MagmaElement zero = magma.identity;
  const MagmaElement a = sol.a;
  if (sol.kase == Theorem1Solution::Case::S0Zero) {
    const double b = sol.b;
    inst.f = [zero, a](const Point& pt) { return pt.s() == 0.0 ? zero : a; };
    inst.side_fn = [b](const Point& pt) { return pt.s() == 0.0 ? b : 0.0; };
  } else {
    const double s0 = sol.s0;
    inst.f = [zero, a, s0](const Point& pt) { return pt.s() < s0 ? zero : a; };
    inst.side_fn = [s0](const Point& pt) {
      return pt.s() < s0 ? s0 / (s0 - pt.s()) : 0.0;
    };
  }
  return inst;
}

CgsInstance make_log_family(const LogFamilySolution& sol) {
  if (!(sol.alpha >= 0.0))
    throw std::invalid_argument("make_log_family: alpha must be >= 0");
  MagmaOps magma;
  switch (sol.a_vec.kind()) {
    case MagmaElement::Kind::Real:
      if (sol.a_vec.as_real() == 0.0)
        throw std::invalid_argument("make_log_family: a must be nonzero");
      magma = reals_magma();
      break;
    case MagmaElement::Kind::Vec: {
      magma = vec_magma(sol.a_vec.vec_dim());
      if (distance(sol.a_vec, magma.identity) == 0.0)
        throw std::invalid_argument("make_log_family: a must be nonzero");
      break;
    }
    default:
      throw std::invalid_argument(
          "make_log_family: a must be a real scalar or vector");
  }

  CgsInstance inst;
  inst.form = CgsInstance::Form::Rew;
  inst.domain = CgsInstance::DomainKind::HalfLine;
  inst.dim = 1;
  inst.magma = magma;
  const MagmaElement a = sol.a_vec;
  const double alpha = sol.alpha;
  if (alpha == 0.0) {
    inst.f = [a](const Point& pt) { return scale(a, pt.s()); };
    inst.side_fn = [](const Point&) { return 1.0; };
  } else {
    inst.f = [a, alpha](const Point& pt) {
      return scale(a, std::log1p(alpha * pt.s()));
    };
    inst.side_fn = [alpha](const Point& pt) { return alpha * pt.s() + 1.0; };
  }
  return inst;
}

CgsInstance dual_instance(const CgsInstance& inst) {
  CgsInstance dual = inst;
  dual.form = inst.form == CgsInstance::Form::Rew ? CgsInstance::Form::Equ
                                                  : CgsInstance::Form::Rew;
  dual.side_fn = [side = inst.side_fn](const Point& pt) {
    return 1.0 / side(pt);
  };
  return dual;
}

double gs_multiplicativity_check(double alpha, std::span<const double> s_grid,
                                 std::span<const double> t_grid) {
  if (!(alpha >= 0.0))
    throw std::invalid_argument("gs_multiplicativity_check: alpha must be >= 0");
  auto g = [alpha](double x) { return alpha * x + 1.0; };
  double worst = 0.0;
  for (double s : s_grid)
    for (double t : t_grid)
      worst = std::max(worst, std::abs(g(s + g(s) * t) - g(s) * g(t)));
  return worst;
}

std::vector<double> derive_h_from_f(const std::function<double(double)>& f,
                                    std::span<const double> s_grid,
                                    double fd_step) {
  if (!(fd_step > 0.0))
    throw std::invalid_argument("derive_h_from_f: fd_step must be > 0");
  const double d0 = (f(fd_step) - f(-fd_step)) / (2.0 * fd_step);
  if (std::abs(d0) < 1e-10)
    throw DegenerateError("derive_h_from_f: |f'(0)| below 1e-10");
  std::vector<double> h;
  h.reserve(s_grid.size());
  for (double s : s_grid)
    h.push_back((f(s + fd_step) - f(s - fd_step)) / (2.0 * fd_step) / d0);
  return h;
}

namespace {

// Right-continuity probe: the one-sided difference must shrink with the
// step; a jump of fixed height stays put.
bool right_continuous_at(const std::function<MagmaElement(const Point&)>& f,
                         double s) {
  const MagmaElement base = f(Point::scalar(s));
  double scale_ref = 1.0;
  if (base.kind() == MagmaElement::Kind::Real)
    scale_ref += std::abs(base.as_real());
  double d_coarse = distance(f(Point::scalar(s + 1e-3)), base);
  double d_fine = distance(f(Point::scalar(s + 1e-7)), base);
  return d_fine <= 0.5 * d_coarse + 1e-9 * scale_ref;
}

}  // namespace

bool probe_g_lower_bound(const CgsInstance& inst,
                         std::span<const double> s_grid) {
  if (inst.form != CgsInstance::Form::Rew)
    throw std::invalid_argument("probe_g_lower_bound: expects a Rew instance");
  for (double s : s_grid)
    if (!right_continuous_at(inst.f, s))
      throw std::invalid_argument(
          "probe_g_lower_bound: f failed the right-continuity probe at s=" +
          std::to_string(s));
  for (double s : s_grid)
    if (inst.side_fn(Point::scalar(s)) < 1.0 - 1e-12) return false;
  return true;
}

RegularityReport probe_regularity(const std::function<double(double)>& f,
                                  std::span<const double> points,
                                  std::span<const double> steps) {
  if (points.empty() || steps.empty())
    throw std::invalid_argument("probe_regularity: points and steps required");
  RegularityReport rep;

  // jump detection: the one-sided difference must actually shrink with
  // the step, which a plateau jump of fixed height cannot do
  const double h_min = *std::min_element(steps.begin(), steps.end());
  const double h_max = *std::max_element(steps.begin(), steps.end());
  rep.right_continuous = true;
  for (double s : points) {
    double base = f(s);
    double d_coarse = std::abs(f(s + h_max) - base);
    double d_fine = std::abs(f(s + h_min) - base);
    if (d_fine > 0.5 * d_coarse + 1e-9 * (1.0 + std::abs(base))) {
      rep.right_continuous = false;
      break;
    }
  }

  std::vector<double> xs(points.begin(), points.end());
  std::sort(xs.begin(), xs.end());
  std::vector<double> vals;
  vals.reserve(xs.size());
  for (double x : xs) vals.push_back(f(x));
  bool nondec = true, noninc = true;
  for (size_t i = 1; i < vals.size(); ++i) {
    if (vals[i] < vals[i - 1] - 1e-12) nondec = false;
    if (vals[i] > vals[i - 1] + 1e-12) noninc = false;
  }
  rep.monotone = nondec || noninc;

  // plateau vs noise separation threshold
  std::vector<double> sorted_vals = vals;
  std::sort(sorted_vals.begin(), sorted_vals.end());
  rep.injective_on_grid = true;
  for (size_t i = 1; i < sorted_vals.size(); ++i)
    if (std::abs(sorted_vals[i] - sorted_vals[i - 1]) <= 1e-9)
      rep.injective_on_grid = false;
  return rep;
}

RigidityVerdict vector_space_rigidity_falsifier(
    const std::function<double(const Point&)>& candidate_g,
    const std::function<MagmaElement(const Point&)>& candidate_f,
    const MagmaOps& magma, std::span<const Point> grid, double tol) {
  if (grid.empty())
    throw std::invalid_argument("rigidity: empty grid");
  bool has_negative = false;
  for (const Point& pt : grid)
    for (int i = 0; i < pt.dim; ++i)
      if (pt.c[i] < 0.0) has_negative = true;
  if (!has_negative)
    throw std::invalid_argument("rigidity: grid must be symmetric about the origin");

  double f_mag = 0.0;
  for (const Point& pt : grid)
    f_mag = std::max(f_mag, distance(candidate_f(pt), magma.identity));
  if (f_mag == 0.0)
    throw std::invalid_argument("rigidity: f vanishes on the whole grid");

  CgsInstance inst;
  inst.form = CgsInstance::Form::Rew;
  inst.domain = CgsInstance::DomainKind::VectorSpace;
  inst.dim = grid.front().dim;
  inst.magma = magma;
  inst.f = candidate_f;
  inst.side_fn = candidate_g;

  const auto pairs = cross_pairs(grid);
  ResidualStats stats = residual_check(inst, pairs, tol);

  RigidityVerdict verdict;
  if (stats.max_residual > tol) {
    verdict.kind = RigidityVerdict::Kind::Falsified;
    verdict.witness_s = stats.worst_s;
    verdict.witness_t = stats.worst_t;
    verdict.residual = stats.max_residual;
    verdict.note = "equation violated on the grid";
    return verdict;
  }

  double g_dev = 0.0;
  for (const Point& pt : grid)
    g_dev = std::max(g_dev, std::abs(candidate_g(pt) - 1.0));
  if (g_dev <= tol) {
    verdict.kind = RigidityVerdict::Kind::ConsistentSolution;
    verdict.note = "g constant 1 and f additive on the grid";
    return verdict;
  }

  // g deviates from 1 although the equation held on the sampled pairs.
  // At any s with g(s) != 1 the choice t = s/(1-g(s)) turns the equation
  // into f(t) = f(s) + f(t), forcing f(s) = 0; a point where f(s) is not
  // 0 is therefore a concrete witness against the candidate.
  verdict.kind = RigidityVerdict::Kind::Falsified;
  double best = -1.0;
  for (const Point& pt : grid) {
    double gs = candidate_g(pt);
    if (std::abs(gs - 1.0) <= tol) continue;  // witness needs 1-g(s) != 0
    double fs = distance(candidate_f(pt), magma.identity);
    if (fs > best) {
      best = fs;
      verdict.witness_s = pt;
      verdict.witness_t = scale_point(1.0 / (1.0 - gs), pt);
      verdict.residual = fs;
    }
  }
  if (best > tol) {
    verdict.note = "forced f(s)=0 at witness s contradicts f(s)!=0";
    return verdict;
  }
  // f vanishes wherever g deviates; the candidate still cannot solve the
  // equation globally (additivity would force f = 0 everywhere), but the
  // grid shows no direct violation. Report the nonzero-f point farthest
  // from the kernel of (g-1) as circumstantial witness.
  for (const Point& pt : grid) {
    double fs = distance(candidate_f(pt), magma.identity);
    if (fs > verdict.residual) {
      verdict.residual = fs;
      verdict.witness_s = pt;
      verdict.witness_t = pt;
    }
  }
  verdict.note =
      "g deviates from 1 while f is nonzero elsewhere; no grid pair "
      "witnesses the violation directly";
  return verdict;
}

std::vector<double> range_grid(double start, double stop, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("range_grid: step must be > 0");
  if (stop < start) throw std::invalid_argument("range_grid: stop < start");
  std::vector<double> g;
  // start + i*step avoids drift from repeated accumulation; the relative
  // slack keeps an endpoint that lands on the grid up to rounding
  for (long i = 0;; ++i) {
    double x = start + static_cast<double>(i) * step;
    if (x > stop + step * 1e-9) break;
    g.push_back(std::min(x, stop));
  }
  return g;
}

std::vector<double> parse_range_spec(const std::string& spec) {
  double a = 0.0, b = 0.0, c = 0.0;
  char colon1 = 0, colon2 = 0;
  std::istringstream is(spec);
  if (!(is >> a >> colon1 >> b >> colon2 >> c) || colon1 != ':' || colon2 != ':')
    throw UsageError("grid", "expected start:stop:step, got '" + spec + "'");
  return range_grid(a, b, c);
}

std::vector<std::pair<Point, Point>> cross_pairs(std::span<const Point> pts) {
  std::vector<std::pair<Point, Point>> pairs;
  pairs.reserve(pts.size() * pts.size());
  for (const Point& s : pts)
    for (const Point& t : pts) pairs.emplace_back(s, t);
  return pairs;
}

std::vector<Point> scalar_points(std::span<const double> xs) {
  std::vector<Point> pts;
  pts.reserve(xs.size());
  for (double x : xs) pts.push_back(Point::scalar(x));
  return pts;
}

}  // namespace thinlab
