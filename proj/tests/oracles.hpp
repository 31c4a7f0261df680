// Independent reference computations used only by tests. These deliberately
// avoid the library's solver/estimator code paths.
#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace oracles {

// Exact Wasserstein-1 between two uniform n-point measures by exhausting all
// assignments (n <= 8).
inline double brute_force_w1(const std::vector<double>& a,
                             const std::vector<double>& b, std::size_t n,
                             std::size_t dim) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t k = 0; k < dim; ++k) {
        const double d = a[i * dim + k] - b[perm[i] * dim + k];
        s += d * d;
      }
      total += std::sqrt(s);
    }
    best = std::min(best, total / static_cast<double>(n));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// Midpoint-rule line integral of the isotropic-Gaussian-smoothed density of a
// uniform segment [a, b] in R^2 at query point x.
inline double segment_convolution_quadrature(const double (&a)[2],
                                             const double (&b)[2],
                                             double sigma2,
                                             const double (&x)[2],
                                             std::size_t steps = 200000) {
  const double norm = 1.0 / (2.0 * 3.14159265358979323846 * sigma2);
  double acc = 0.0;
  for (std::size_t i = 0; i < steps; ++i) {
    const double t = (static_cast<double>(i) + 0.5) / static_cast<double>(steps);
    const double px = a[0] + t * (b[0] - a[0]);
    const double py = a[1] + t * (b[1] - a[1]);
    const double q = (x[0] - px) * (x[0] - px) + (x[1] - py) * (x[1] - py);
    acc += norm * std::exp(-q / (2.0 * sigma2));
  }
  return acc / static_cast<double>(steps);
}

// Draws from the exact Cauchy quantile function; the reference sample for
// tail-statistic comparisons.
inline double cauchy_quantile(double u, double gamma) {
  return gamma * std::tan(3.14159265358979323846 * (u - 0.5));
}

}  // namespace oracles
