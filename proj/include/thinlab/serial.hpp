#ifndef THINLAB_SERIAL_HPP
#define THINLAB_SERIAL_HPP

#include "thinlab/cgs.hpp"
#include "thinlab/thinning.hpp"

// Serial reference implementations of the parallel kernels. They share
// the inner routines with the OpenMP builds and run them in plain loops,
// so outputs must match the parallel kernels bit for bit; the tests and
// the benchmark tool hold them to that.
namespace thinlab::serial {

PmfVector thin_exact(const PmfVector& mu, ThinningParam p);

PmfVector thin_mc(const PmfVector& mu, ThinningParam p, long long n_samples,
                  unsigned long long seed);

ResidualStats residual_check(const CgsInstance& inst,
                             std::span<const std::pair<Point, Point>> grid,
                             double tol,
                             std::vector<double>* per_point = nullptr);

}  // namespace thinlab::serial

#endif
