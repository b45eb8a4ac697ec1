// Shared inner routines of the data-parallel kernels. Both the OpenMP
// builds (thinning.cpp, cgs.cpp) and the serial reference (serial.cpp)
// call these, so the two paths perform identical floating-point work in
// identical order and their outputs can be compared bit for bit.
#ifndef THINLAB_SRC_KERNELS_IMPL_HPP
#define THINLAB_SRC_KERNELS_IMPL_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "thinlab/cgs.hpp"
#include "thinlab/power_series.hpp"

namespace thinlab::detail {

inline constexpr int kExactBinomMax = 30;
inline constexpr long long kMcChunk = 1 << 16;

// Pascal's triangle; doubles hold these integers exactly up to row 30.
inline const std::array<std::array<double, kExactBinomMax + 1>,
                        kExactBinomMax + 1>&
pascal_table() {
  static const auto table = [] {
    std::array<std::array<double, kExactBinomMax + 1>, kExactBinomMax + 1> t{};
    for (int n = 0; n <= kExactBinomMax; ++n) {
      t[n][0] = 1.0;
      for (int k = 1; k <= n; ++k)
        t[n][k] = t[n - 1][k - 1] + (k <= n - 1 ? t[n - 1][k] : 0.0);
    }
    return t;
  }();
  return table;
}

// C(k,j) p^j q^(k-j); exact coefficients below row 30, log-space above.
inline double binom_mass(int k, int j, double p, double q,
                         const std::vector<double>& lgamma_tab, double log_p,
                         double log_q) {
  if (k <= kExactBinomMax)
    return pascal_table()[k][j] * std::pow(p, j) * std::pow(q, k - j);
  return std::exp(lgamma_tab[k] - lgamma_tab[j] - lgamma_tab[k - j] +
                  j * log_p + (k - j) * log_q);
}

// One output mass of the thinned law: nu_j = sum_{k>=j} mu_k b(k,j).
inline double thinned_mass(const std::vector<double>& mu, int j, double p,
                           double q, const std::vector<double>& lgamma_tab,
                           double log_p, double log_q) {
  double acc = 0.0;
  for (int k = j; k < static_cast<int>(mu.size()); ++k)
    acc += mu[k] * binom_mass(k, j, p, q, lgamma_tab, log_p, log_q);
  return acc;
}

inline std::vector<double> lgamma_table(int upto) {
  std::vector<double> t(upto + 1);
  for (int i = 0; i <= upto; ++i) t[i] = std::lgamma(i + 1.0);
  return t;
}

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Uniform in [0,1) from the top 53 bits; keeps sampling independent of
// the standard library's distribution internals.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Samples one chunk of the Monte Carlo thinning run into `counts`.
// The chunk's RNG stream is derived from (seed, chunk index) alone.
inline void mc_chunk_counts(const std::vector<double>& cdf, double total,
                            double p, unsigned long long seed,
                            long long chunk_index, long long chunk_size,
                            std::vector<long long>& counts) {
  std::mt19937_64 rng(splitmix64(seed + 0x632be59bd9b4e019ULL *
                                            static_cast<uint64_t>(chunk_index + 1)));
  const int last = static_cast<int>(cdf.size()) - 1;
  for (long long i = 0; i < chunk_size; ++i) {
    double target = uniform01(rng) * total;
    int k = static_cast<int>(std::upper_bound(cdf.begin(), cdf.end(), target) -
                             cdf.begin());
    if (k > last) k = last;
    int kept = 0;
    for (int n = 0; n < k; ++n)
      if (uniform01(rng) < p) ++kept;
    ++counts[kept];
  }
}

// Throws when a pair lies outside the instance's domain, naming the
// offending point. Must run before the parallel residual loop: exceptions
// cannot cross an OpenMP region.
void validate_cgs_grid(const CgsInstance& inst,
                       std::span<const std::pair<Point, Point>> grid);

// Residual of the functional equation at one grid pair (pair pre-validated).
double cgs_pair_residual(const CgsInstance& inst, const Point& s,
                         const Point& t);

}  // namespace thinlab::detail

#endif
