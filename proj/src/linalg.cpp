#include "ganlab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ganlab {

std::vector<double> singular_values(const std::vector<double>& a,
                                    std::size_t rows, std::size_t cols) {
  if (a.size() != rows * cols)
    throw std::invalid_argument("singular_values: size mismatch");
  // Work on the transpose when rows < cols so columns are the short side.
  std::size_t m = rows, n = cols;
  std::vector<double> w;
  if (rows >= cols) {
    w = a;
  } else {
    m = cols;
    n = rows;
    w.resize(a.size());
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) w[j * n + i] = a[i * cols + j];
  }

  // One-sided Jacobi: rotate column pairs until all are orthogonal.
  const double eps = 1e-15;
  for (int sweep = 0; sweep < 60; ++sweep) {
    bool changed = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double app = 0.0, aqq = 0.0, apq = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
          const double xp = w[i * n + p], xq = w[i * n + q];
          app += xp * xp;
          aqq += xq * xq;
          apq += xp * xq;
        }
        if (std::abs(apq) <= eps * std::sqrt(app * aqq)) continue;
        changed = true;
        const double tau = (aqq - app) / (2.0 * apq);
        const double t = (tau >= 0 ? 1.0 : -1.0) /
                         (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t i = 0; i < m; ++i) {
          const double xp = w[i * n + p], xq = w[i * n + q];
          w[i * n + p] = c * xp - s * xq;
          w[i * n + q] = s * xp + c * xq;
        }
      }
    }
    if (!changed) break;
  }

  std::vector<double> sv(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) s += w[i * n + j] * w[i * n + j];
    sv[j] = std::sqrt(s);
  }
  std::sort(sv.begin(), sv.end(), std::greater<double>());
  return sv;
}

std::vector<double> cholesky(const std::vector<double>& a, std::size_t n) {
  if (a.size() != n * n) throw std::invalid_argument("cholesky: size mismatch");
  std::vector<double> l(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = a[i * n + j];
      for (std::size_t k = 0; k < j; ++k) s -= l[i * n + k] * l[j * n + k];
      if (i == j) {
        if (s <= 0.0)
          throw std::invalid_argument(
              "cholesky: matrix is not positive definite");
        l[i * n + i] = std::sqrt(s);
      } else {
        l[i * n + j] = s / l[j * n + j];
      }
    }
  }
  return l;
}

std::vector<double> cholesky_solve(const std::vector<double>& chol,
                                   std::size_t n, std::vector<double> b) {
  if (chol.size() != n * n || b.size() != n)
    throw std::invalid_argument("cholesky_solve: size mismatch");
  // Forward then backward substitution.
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= chol[i * n + k] * b[k];
    b[i] = s / chol[i * n + i];
  }
  for (std::size_t ii = n; ii-- > 0;) {
    double s = b[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= chol[k * n + ii] * b[k];
    b[ii] = s / chol[ii * n + ii];
  }
  return b;
}

double cholesky_logdet(const std::vector<double>& chol, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::log(chol[i * n + i]);
  return 2.0 * s;
}

double regularized_gamma_lower(double a, double x) {
  if (!(a > 0.0) || x < 0.0)
    throw std::invalid_argument("regularized_gamma_lower: bad arguments");
  if (x == 0.0) return 0.0;
  const double lg = std::lgamma(a);
  if (x < a + 1.0) {
    // Series representation.
    double term = 1.0 / a;
    double sum = term;
    double ap = a;
    for (int i = 0; i < 500; ++i) {
      ap += 1.0;
      term *= x / ap;
      sum += term;
      if (std::abs(term) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - lg);
  }
  // Continued fraction for Q(a, x), then P = 1 - Q.
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  const double q = std::exp(-x + a * std::log(x) - lg) * h;
  return 1.0 - q;
}

}  // namespace ganlab
