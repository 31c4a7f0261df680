#pragma once

#include <cstddef>
#include <vector>

namespace ganlab {

// Small dense kernels for desk-scale matrices; no external dependencies.

// Singular values of a row-major (rows, cols) matrix, descending.
// One-sided Jacobi on the wider orientation; accurate for tiny spectra.
std::vector<double> singular_values(const std::vector<double>& a,
                                    std::size_t rows, std::size_t cols);

// Cholesky factor L (row-major lower triangular) of an SPD matrix.
// Throws if the matrix is not positive definite.
std::vector<double> cholesky(const std::vector<double>& a, std::size_t n);

// Solves L L^T x = b given the Cholesky factor.
std::vector<double> cholesky_solve(const std::vector<double>& chol,
                                   std::size_t n, std::vector<double> b);

// log det(A) from its Cholesky factor.
double cholesky_logdet(const std::vector<double>& chol, std::size_t n);

// Regularized lower incomplete gamma P(a, x); series + continued fraction.
double regularized_gamma_lower(double a, double x);

}  // namespace ganlab
