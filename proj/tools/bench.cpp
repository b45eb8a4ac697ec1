// Times the OpenMP kernels against the serial reference and verifies the
// outputs agree bit for bit. Sizes are chosen so the serial runs take on
// the order of a second each.
#include <chrono>
#include <cstdio>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "CLI11.hpp"
#include "thinlab/serial.hpp"
#include "thinlab/suite.hpp"

using namespace thinlab;
namespace chrono = std::chrono;

namespace {

template <typename F>
double time_ms(F&& fn) {
  auto t0 = chrono::steady_clock::now();
  fn();
  return chrono::duration<double, std::milli>(chrono::steady_clock::now() - t0)
      .count();
}

void report(const char* name, double serial_ms, double parallel_ms, bool equal) {
  std::printf("%-22s serial %9.1f ms   parallel %9.1f ms   speedup %5.2fx   %s\n",
              name, serial_ms, parallel_ms, serial_ms / parallel_ms,
              equal ? "bitwise equal" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"serial vs OpenMP kernel comparison"};
  double geo_theta = 0.997;       // support length ~ 9000 for the mixing kernel
  long long mc_samples = 20'000'000;
  double grid_stop = 60.0;        // 121^2 grid points -> 14641^... pairs below
  double grid_step = 0.05;
  app.add_option("--geo-theta", geo_theta, "geometric family parameter");
  app.add_option("--mc-samples", mc_samples, "Monte Carlo sample count");
  app.add_option("--grid-stop", grid_stop, "residual grid endpoint");
  app.add_option("--grid-step", grid_step, "residual grid step");
  CLI11_PARSE(app, argc, argv);

#ifdef _OPENMP
  std::printf("threads: %d\n", omp_get_max_threads());
#else
  std::printf("threads: 1 (built without OpenMP)\n");
#endif

  bool all_equal = true;

  {
    // long-support mixing: O(K^2) inner terms
    auto geo = CoefficientSequence::custom({1.0}, 1.0);
    PmfVector mu = pmf(geo, geo_theta);
    std::printf("thin_exact: support length %zu\n", mu.masses.size());
    ThinningParam tp(0.4);
    PmfVector ser, par;
    double ser_ms = time_ms([&] { ser = serial::thin_exact(mu, tp); });
    double par_ms = time_ms([&] { par = thin_exact(mu, tp); });
    bool equal = ser.masses == par.masses && ser.tail_bound == par.tail_bound;
    all_equal = all_equal && equal;
    report("thin_exact", ser_ms, par_ms, equal);
  }

  {
    PmfVector mu = pmf(CoefficientSequence::poisson(), 2.0);
    ThinningParam tp(0.3);
    PmfVector ser, par;
    double ser_ms =
        time_ms([&] { ser = serial::thin_mc(mu, tp, mc_samples, 20250809); });
    double par_ms = time_ms([&] { par = thin_mc(mu, tp, mc_samples, 20250809); });
    bool equal = ser.masses == par.masses;
    all_equal = all_equal && equal;
    report("thin_mc", ser_ms, par_ms, equal);
  }

  {
    auto logfam = make_log_family({0.5, MagmaElement::real(1.5)});
    auto pairs = cross_pairs(scalar_points(range_grid(0.0, grid_stop, grid_step)));
    std::printf("residual_check: %zu pairs\n", pairs.size());
    ResidualStats ser, par;
    double ser_ms =
        time_ms([&] { ser = serial::residual_check(logfam, pairs, 1e-10); });
    double par_ms = time_ms([&] { par = residual_check(logfam, pairs, 1e-10); });
    bool equal = ser.max_residual == par.max_residual &&
                 ser.n_exceeding == par.n_exceeding;
    all_equal = all_equal && equal;
    report("residual_check", ser_ms, par_ms, equal);
  }

  if (!all_equal) {
    std::fprintf(stderr, "kernel outputs diverged from the serial reference\n");
    return 1;
  }
  return 0;
}
