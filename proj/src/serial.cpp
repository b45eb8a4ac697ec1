#include "thinlab/serial.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "kernels_impl.hpp"

namespace thinlab::serial {

PmfVector thin_exact(const PmfVector& mu, ThinningParam tp) {
  if (mu.masses.empty())
    throw std::invalid_argument("thin_exact: empty pmf");
  const double p = tp.p();
  const double q = tp.q();
  if (p == 0.0) return {{1.0}, 0.0};
  if (p == 1.0) return mu;

  const int n = static_cast<int>(mu.masses.size());
  const auto lg = detail::lgamma_table(n + 1);
  const double log_p = std::log(p);
  const double log_q = std::log(q);

  std::vector<double> nu(n);
  for (int j = 0; j < n; ++j)
    nu[j] = detail::thinned_mass(mu.masses, j, p, q, lg, log_p, log_q);

  return {std::move(nu), mu.tail_bound};
}

PmfVector thin_mc(const PmfVector& mu, ThinningParam tp, long long n_samples,
                  unsigned long long seed) {
  if (mu.masses.empty())
    throw std::invalid_argument("thin_mc: empty pmf");
  if (n_samples < 1)
    throw std::invalid_argument("thin_mc: n_samples must be >= 1");

  std::vector<double> cdf(mu.masses.size());
  double acc = 0.0;
  for (size_t k = 0; k < mu.masses.size(); ++k) {
    acc += mu.masses[k];
    cdf[k] = acc;
  }
  const long long n_chunks =
      (n_samples + detail::kMcChunk - 1) / detail::kMcChunk;
  std::vector<long long> counts(mu.masses.size(), 0);
  for (long long c = 0; c < n_chunks; ++c) {
    long long lo = c * detail::kMcChunk;
    long long size = std::min<long long>(detail::kMcChunk, n_samples - lo);
    detail::mc_chunk_counts(cdf, acc, tp.p(), seed, c, size, counts);
  }

  std::vector<double> masses(counts.size());
  for (size_t k = 0; k < counts.size(); ++k)
    masses[k] = static_cast<double>(counts[k]) / static_cast<double>(n_samples);
  return {std::move(masses), 0.0};
}

ResidualStats residual_check(const CgsInstance& inst,
                             std::span<const std::pair<Point, Point>> grid,
                             double tol, std::vector<double>* per_point) {
  detail::validate_cgs_grid(inst, grid);
  std::vector<double> residuals(grid.size());
  for (size_t i = 0; i < grid.size(); ++i)
    residuals[i] = detail::cgs_pair_residual(inst, grid[i].first, grid[i].second);

  ResidualStats stats;
  stats.n_points = static_cast<long>(grid.size());
  for (size_t i = 0; i < grid.size(); ++i) {
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

}  // namespace thinlab::serial
