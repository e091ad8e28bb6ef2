#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace critlab {

/// Dense row-major square matrix; the modules treat it as symmetric.
struct Matrix {
  int n = 0;
  std::vector<double> a;

  Matrix() = default;
  explicit Matrix(int dim) : n(dim), a(static_cast<std::size_t>(dim) * dim, 0.0) {}

  double& at(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
  double at(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }
  const double* row(int i) const { return a.data() + static_cast<std::size_t>(i) * n; }
  double* row(int i) { return a.data() + static_cast<std::size_t>(i) * n; }

  bool is_symmetric(double tol = 0.0) const;
  double max_abs() const;
};

/// y = M x
void matvec(const Matrix& m, std::span<const double> x, std::span<double> y);

double dot(std::span<const double> x, std::span<const double> y);
double norm2(std::span<const double> x);

/// Solves A x = b for symmetric positive definite A (in-place Cholesky on a
/// copy).  Throws if a pivot fails.
std::vector<double> cholesky_solve(const Matrix& a, std::span<const double> b);

/// Cholesky factor (lower) of an SPD matrix; throws on pivot failure.
Matrix cholesky_factor(const Matrix& a);
std::vector<double> cholesky_solve_factored(const Matrix& chol, std::span<const double> b);

/// Conjugate gradient for SPD systems; returns empty vector on failure to
/// reach the residual tolerance within max_iter.
std::vector<double> conjugate_gradient(const Matrix& a, std::span<const double> b,
                                       double tol, int max_iter);

/// Full eigen-decomposition of a small symmetric matrix by cyclic Jacobi.
/// Eigenvalues are returned in descending order with matching columns in
/// `vectors` (row-major, column k = eigenvector k).
struct EigenDecomposition {
  std::vector<double> values;
  Matrix vectors;
};
EigenDecomposition jacobi_eigen(const Matrix& a, double tol = 1e-13, int max_sweeps = 100);

/// Spectral norm (largest |eigenvalue|) of a symmetric matrix via Jacobi.
double spectral_norm_small(const Matrix& a);

}  // namespace critlab
