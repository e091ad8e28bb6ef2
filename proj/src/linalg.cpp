#include "critlab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace critlab {

bool Matrix::is_symmetric(double tol) const {
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::fabs(at(i, j) - at(j, i)) > tol) return false;
  return true;
}

double Matrix::max_abs() const {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::fabs(v));
  return m;
}

void matvec(const Matrix& m, std::span<const double> x, std::span<double> y) {
  const int n = m.n;
  for (int i = 0; i < n; ++i) {
    const double* row = m.row(i);
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += row[j] * x[j];
    y[i] = s;
  }
}

double dot(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double norm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

Matrix cholesky_factor(const Matrix& a) {
  const int n = a.n;
  Matrix l(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = a.at(i, j);
      for (int k = 0; k < j; ++k) s -= l.at(i, k) * l.at(j, k);
      if (i == j) {
        if (s <= 0.0) throw std::runtime_error("cholesky: matrix not positive definite");
        l.at(i, i) = std::sqrt(s);
      } else {
        l.at(i, j) = s / l.at(j, j);
      }
    }
  }
  return l;
}

std::vector<double> cholesky_solve_factored(const Matrix& l, std::span<const double> b) {
  const int n = l.n;
  std::vector<double> y(n), x(n);
  for (int i = 0; i < n; ++i) {
    double s = b[i];
    for (int k = 0; k < i; ++k) s -= l.at(i, k) * y[k];
    y[i] = s / l.at(i, i);
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = y[i];
    for (int k = i + 1; k < n; ++k) s -= l.at(k, i) * x[k];
    x[i] = s / l.at(i, i);
  }
  return x;
}

std::vector<double> cholesky_solve(const Matrix& a, std::span<const double> b) {
  return cholesky_solve_factored(cholesky_factor(a), b);
}

std::vector<double> conjugate_gradient(const Matrix& a, std::span<const double> b,
                                       double tol, int max_iter) {
  const int n = a.n;
  std::vector<double> x(n, 0.0), r(b.begin(), b.end()), p(r), ap(n);
  double rs = dot(r, r);
  double bnorm = std::sqrt(dot(b, b));
  if (bnorm == 0.0) return x;
  for (int it = 0; it < max_iter; ++it) {
    if (std::sqrt(rs) <= tol * bnorm) return x;
    matvec(a, p, ap);
    double denom = dot(p, ap);
    if (denom <= 0.0) break;  // lost positive definiteness numerically
    double alpha = rs / denom;
    for (int i = 0; i < n; ++i) x[i] += alpha * p[i];
    for (int i = 0; i < n; ++i) r[i] -= alpha * ap[i];
    double rs_new = dot(r, r);
    double beta = rs_new / rs;
    rs = rs_new;
    for (int i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
  }
  if (std::sqrt(rs) <= tol * bnorm) return x;
  return {};
}

EigenDecomposition jacobi_eigen(const Matrix& a_in, double tol, int max_sweeps) {
  const int n = a_in.n;
  Matrix a = a_in;
  Matrix v(n);
  for (int i = 0; i < n; ++i) v.at(i, i) = 1.0;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) off += a.at(i, j) * a.at(i, j);
    if (std::sqrt(off) < tol * (1.0 + a.max_abs())) break;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        double apq = a.at(p, q);
        if (std::fabs(apq) < 1e-300) continue;
        double theta = (a.at(q, q) - a.at(p, p)) / (2.0 * apq);
        double t = (theta >= 0.0 ? 1.0 : -1.0) /
                   (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;
        for (int k = 0; k < n; ++k) {
          double akp = a.at(k, p), akq = a.at(k, q);
          a.at(k, p) = c * akp - s * akq;
          a.at(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          double apk = a.at(p, k), aqk = a.at(q, k);
          a.at(p, k) = c * apk - s * aqk;
          a.at(q, k) = s * apk + c * aqk;
        }
        for (int k = 0; k < n; ++k) {
          double vkp = v.at(k, p), vkq = v.at(k, q);
          v.at(k, p) = c * vkp - s * vkq;
          v.at(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  EigenDecomposition result;
  result.values.resize(n);
  for (int i = 0; i < n; ++i) result.values[i] = a.at(i, i);
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](int x, int y) { return result.values[x] > result.values[y]; });
  EigenDecomposition sorted;
  sorted.values.resize(n);
  sorted.vectors = Matrix(n);
  for (int k = 0; k < n; ++k) {
    sorted.values[k] = result.values[order[k]];
    for (int i = 0; i < n; ++i) sorted.vectors.at(i, k) = v.at(i, order[k]);
  }
  return sorted;
}

double spectral_norm_small(const Matrix& a) {
  auto eig = jacobi_eigen(a);
  double m = 0.0;
  for (double v : eig.values) m = std::max(m, std::fabs(v));
  return m;
}

}  // namespace critlab
