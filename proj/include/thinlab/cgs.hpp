#ifndef THINLAB_CGS_HPP
#define THINLAB_CGS_HPP

#include <array>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "thinlab/magma.hpp"

namespace thinlab {

/// Domain point: a scalar on the half line (dim 1) or a vector in R^2.
struct Point {
  std::array<double, 2> c{0.0, 0.0};
  int dim = 1;

  static Point scalar(double s) { return {{s, 0.0}, 1}; }
  static Point vec2(double x, double y) { return {{x, y}, 2}; }
  double s() const { return c[0]; }
};

Point add(const Point& a, const Point& b);
Point scale_point(double a, const Point& p);
std::string to_string(const Point& p);

/// A candidate pair for one of the two functional equations
///   Equ: f(s + t)        = f(s) + f(h(s) t)
///   Rew: f(s + g(s) t)   = f(s) + f(t)
/// with f mapping into `magma` and side_fn playing h (Equ) or g (Rew).
struct CgsInstance {
  enum class Form { Equ, Rew };
  enum class DomainKind { HalfLine, VectorSpace };

  Form form = Form::Rew;
  DomainKind domain = DomainKind::HalfLine;
  int dim = 1;
  MagmaOps magma;
  std::function<MagmaElement(const Point&)> f;
  std::function<double(const Point&)> side_fn;
};

/// Worst violation of the instance's equation over a finite grid of
/// (s,t) pairs. Residuals are absolute magma distances for the numeric
/// carriers and 0/1 mismatch counts for the exact ones.
struct ResidualStats {
  double max_residual = 0.0;
  long n_points = 0;
  long n_exceeding = 0;  // points with residual > the tolerance passed in
  Point worst_s, worst_t;
};

/// Evaluates the equation residual at every pair (parallel kernel; the
/// serial reference lives in thinlab::serial). Throws on pairs outside
/// the instance's domain, naming the point. When `per_point` is non-null
/// it is filled with one residual per pair, in grid order.
ResidualStats residual_check(const CgsInstance& inst,
                             std::span<const std::pair<Point, Point>> grid,
                             double tol,
                             std::vector<double>* per_point = nullptr);

/// Step solutions of the Equ form on the half line, classified by
/// s0 = inf of the zero set of h.
struct Theorem1Solution {
  enum class Case { S0Zero, S0Positive };
  Case kase = Case::S0Zero;
  MagmaElement a;   // nonzero plateau value of f
  double b = 1.0;   // h(0) when s0 = 0
  double s0 = 0.0;  // jump location when s0 > 0

  static Theorem1Solution s0_zero(MagmaElement a, double b);
  static Theorem1Solution s0_positive(double s0, MagmaElement a);
};

/// Builds the step-solution instance over the given magma:
///   s0 = 0:  f = 0 at 0, a beyond;  h = b at 0, 0 beyond.
///   s0 > 0:  f = 0 on [0,s0), a beyond;  h(s) = s0/(s0-s) on [0,s0), 0 beyond.
/// Rejects a = 0 and magma/element kind mismatches.
CgsInstance make_theorem1(const Theorem1Solution& sol, const MagmaOps& magma);

/// Solutions of the Rew form with empty kernel: f(s) = a*s with g = 1
/// when alpha = 0, else f(s) = a*log(alpha s + 1) with g(s) = alpha s + 1.
/// a may be a real scalar or a real vector; the vector case is the
/// componentwise extension.
struct LogFamilySolution {
  double alpha = 0.0;
  MagmaElement a_vec;  // nonzero scalar or vector
};

CgsInstance make_log_family(const LogFamilySolution& sol);

/// For a Rew instance returns the Equ instance with h = 1/g, and vice
/// versa. The caller is responsible for the kernel of the side function
/// being empty on the points it will evaluate.
CgsInstance dual_instance(const CgsInstance& inst);

/// Worst residual of g(s + g(s) t) - g(s) g(t) for g(s) = alpha s + 1.
double gs_multiplicativity_check(double alpha, std::span<const double> s_grid,
                                 std::span<const double> t_grid);

/// Central-difference estimate of f'(s)/f'(0) on the grid. f must be
/// evaluable fd_step to either side of every grid point and of 0.
/// Throws DegenerateError when |f'(0)| < 1e-10.
std::vector<double> derive_h_from_f(const std::function<double(double)>& f,
                                    std::span<const double> s_grid,
                                    double fd_step);

/// Necessary condition for genuine Rew solutions with right-continuous f:
/// g >= 1 (up to 1e-12) at every grid point. Runs a shrinking-step
/// right-continuity probe on f first and rejects instances that fail it.
bool probe_g_lower_bound(const CgsInstance& inst,
                         std::span<const double> s_grid);

/// Numeric regularity probes for a scalar candidate f on the half line.
/// A finite probe can refute but never certify; results are reported as
/// evidence only.
struct RegularityReport {
  bool right_continuous = false;
  bool monotone = false;
  bool injective_on_grid = false;
};

RegularityReport probe_regularity(const std::function<double(double)>& f,
                                  std::span<const double> points,
                                  std::span<const double> steps);

/// Verdict of the vector-space rigidity check: on a vector space the Rew
/// equation admits only additive f with g identically 1, so a candidate
/// with non-constant g is falsifiable by a concrete witness pair.
struct RigidityVerdict {
  enum class Kind { ConsistentSolution, Falsified };
  Kind kind = Kind::ConsistentSolution;
  Point witness_s, witness_t;
  double residual = 0.0;
  std::string note;
};

/// Grid must be symmetric about the origin (the witness construction
/// needs t = s/(1-g(s)) and negated points). Candidates with f vanishing
/// on the whole grid are rejected up front.
RigidityVerdict vector_space_rigidity_falsifier(
    const std::function<double(const Point&)>& candidate_g,
    const std::function<MagmaElement(const Point&)>& candidate_f,
    const MagmaOps& magma, std::span<const Point> grid, double tol);

// Grid helpers shared by the CLI and the test suites.
std::vector<double> range_grid(double start, double stop, double step);
std::vector<double> parse_range_spec(const std::string& spec);  // "a:b:c"
std::vector<std::pair<Point, Point>> cross_pairs(std::span<const Point> pts);
std::vector<Point> scalar_points(std::span<const double> xs);

}  // namespace thinlab

#endif
