#include "critlab/spectral.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace critlab {

namespace {

// apply f -> (1/n) K f
void apply_op(const Matrix& k, std::span<const double> x, std::span<double> y) {
  matvec(k, x, y);
  double inv = 1.0 / k.n;
  for (double& v : y) v *= inv;
}

double weighted_norm(std::span<const double> x, int n) {
  return std::sqrt(dot(x, x) / n);
}

}  // namespace

std::string SpectralSummary::to_json() const {
  std::ostringstream out;
  out << "{\"n\":" << n << ",\"top_eigenvalue\":" << top_eigenvalue
      << ",\"second_abs_eigenvalue\":" << second_abs_eigenvalue
      << ",\"residual\":" << residual << ",\"iterations\":" << iterations
      << ",\"psi\":[";
  char buf[32];
  for (int i = 0; i < n; ++i) {
    if (i) out << ",";
    std::snprintf(buf, sizeof buf, "%.12g", psi[i]);
    out << buf;
  }
  out << "]}";
  return out.str();
}

SpectralSummary leading_eigenpair(const Matrix& k, PowerIterationOptions opts) {
  const int n = k.n;
  if (n == 0) throw std::invalid_argument("leading_eigenpair: empty matrix");
  bool zero = true;
  for (double v : k.a) {
    if (v < 0.0) throw std::invalid_argument("leading_eigenpair: negative entry");
    if (v != 0.0) zero = false;
  }
  if (zero) throw std::invalid_argument("leading_eigenpair: zero matrix");

  SpectralSummary s;
  s.n = n;
  std::vector<double> v(n, 1.0), w(n);
  double theta = 0.0;
  int it = 0;
  for (; it < opts.max_iter; ++it) {
    apply_op(k, v, w);
    double nw = weighted_norm(w, n);
    if (nw == 0.0) throw std::runtime_error("leading_eigenpair: iterate vanished");
    double diff = 0.0;
    for (int i = 0; i < n; ++i) {
      w[i] /= nw;
      diff += (w[i] - v[i]) * (w[i] - v[i]);
    }
    v.swap(w);
    theta = nw;
    if (std::sqrt(diff) < opts.tol) break;
  }
  if (it == opts.max_iter)
    throw std::runtime_error("leading_eigenpair: no convergence within iteration cap");

  // Rayleigh value and residual in the (1/n)-weighted norm
  apply_op(k, v, w);
  theta = dot(v, w) / dot(v, v);
  double res = 0.0;
  for (int i = 0; i < n; ++i) res += (w[i] - theta * v[i]) * (w[i] - theta * v[i]);
  s.residual = std::sqrt(res / n);
  s.iterations = it + 1;
  s.top_eigenvalue = theta;
  for (int i = 0; i < n; ++i) v[i] = std::max(v[i], 0.0);
  double nv = weighted_norm(v, n);
  for (int i = 0; i < n; ++i) v[i] /= nv;
  s.psi = v;

  // second |eigenvalue| by deflation: iterate the squared operator with psi
  // projected out, so sign-flipping eigenvalues converge too
  std::vector<double> u(n), t(n);
  for (int i = 0; i < n; ++i) u[i] = std::sin(1.0 + 0.7 * i);
  auto project = [&](std::vector<double>& x) {
    double c = dot(x, s.psi) / n;
    for (int i = 0; i < n; ++i) x[i] -= c * s.psi[i];
  };
  project(u);
  double un = weighted_norm(u, n);
  for (double& x : u) x /= un;
  double lam2 = 0.0;
  for (int j = 0; j < opts.max_iter; ++j) {
    apply_op(k, u, t);
    project(t);
    double mid = weighted_norm(t, n);
    if (mid == 0.0) { lam2 = 0.0; break; }
    apply_op(k, t, w);
    project(w);
    double nw = weighted_norm(w, n);
    if (nw == 0.0) { lam2 = 0.0; break; }
    double diff = 0.0;
    for (int i = 0; i < n; ++i) {
      w[i] /= nw;
      diff += (w[i] - u[i]) * (w[i] - u[i]);
    }
    u.swap(w);
    lam2 = std::sqrt(nw);
    if (std::sqrt(diff) < opts.tol) break;
  }
  s.second_abs_eigenvalue = lam2;
  return s;
}

double dominant_abs_eigenvalue(const Matrix& k, PowerIterationOptions opts) {
  const int n = k.n;
  if (n == 0) throw std::invalid_argument("dominant_abs_eigenvalue: empty matrix");
  if (k.max_abs() == 0.0) return 0.0;
  std::vector<double> v(n), t(n), w(n);
  for (int i = 0; i < n; ++i) v[i] = 1.0 + 0.3 * std::sin(0.9 * i + 0.2);
  double vn = weighted_norm(v, n);
  for (double& x : v) x /= vn;
  double lam = 0.0;
  for (int it = 0; it < opts.max_iter; ++it) {
    apply_op(k, v, t);
    apply_op(k, t, w);
    double nw = weighted_norm(w, n);
    if (nw == 0.0) return 0.0;
    double diff = 0.0;
    for (int i = 0; i < n; ++i) {
      w[i] /= nw;
      diff += (w[i] - v[i]) * (w[i] - v[i]);
    }
    v.swap(w);
    lam = std::sqrt(nw);
    if (std::sqrt(diff) < opts.tol) break;
  }
  return lam;
}

LimitConstants limit_constants(const SpectralSummary& summary, const Matrix& h) {
  const int n = summary.n;
  if (h.n != n) throw std::invalid_argument("limit_constants: dimension mismatch");
  double m1 = 0.0, m3 = 0.0;
  for (double p : summary.psi) {
    m1 += p;
    m3 += p * p * p;
  }
  m1 /= n;
  m3 /= n;
  if (std::fabs(m1) < 1e-14)
    throw std::runtime_error("limit_constants: degenerate eigenfunction, integral is zero");
  std::vector<double> hp(n);
  matvec(h, summary.psi, hp);
  double q = dot(summary.psi, hp) / (static_cast<double>(n) * n);
  LimitConstants c;
  c.alpha = 1.0 / (m1 * m1);
  c.chi = m3 / (m1 * m1 * m1);
  c.zeta = q / (m1 * m1);
  return c;
}

LimitConstants sbm_constants(const SBMInput& input) {
  const int k = input.k;
  if (k <= 0 || input.kappa.n != k || input.a.n != k ||
      static_cast<int>(input.mu.size()) != k || static_cast<int>(input.b.size()) != k)
    throw std::invalid_argument("sbm_constants: inconsistent dimensions");
  double musum = 0.0;
  for (double m : input.mu) {
    if (m <= 0.0) throw std::invalid_argument("sbm_constants: mu entries must be positive");
    musum += m;
  }
  if (std::fabs(musum - 1.0) > 1e-9)
    throw std::invalid_argument("sbm_constants: mu must sum to one");

  // m_ij = mu(j) kappa(i,j)
  Matrix m(k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) m.at(i, j) = input.mu[j] * input.kappa.at(i, j);

  auto power = [&](bool transpose) {
    std::vector<double> v(k, 1.0), w(k, 0.0);
    double lam = 0.0;
    for (int it = 0; it < 200000; ++it) {
      for (int i = 0; i < k; ++i) {
        double s = 0.0;
        for (int j = 0; j < k; ++j) s += (transpose ? m.at(j, i) : m.at(i, j)) * v[j];
        w[i] = s;
      }
      double nw = norm2(w);
      if (nw == 0.0) throw std::runtime_error("sbm_constants: degenerate kernel");
      double diff = 0.0;
      for (int i = 0; i < k; ++i) {
        w[i] /= nw;
        diff += (w[i] - v[i]) * (w[i] - v[i]);
      }
      v.swap(w);
      lam = nw;
      if (std::sqrt(diff) < 1e-14) break;
    }
    return std::make_pair(lam, v);
  };

  auto [rho, u] = power(false);
  if (std::fabs(rho - 1.0) > 1e-8)
    throw std::runtime_error("sbm_constants: Perron root must equal one (got " +
                             std::to_string(rho) + ")");
  {
    // simplicity check via the full spectrum
    auto sym_check = jacobi_eigen([&] {
      // M is not symmetric in general; check via D^{1/2} kappa D^{1/2},
      // which is similar to M
      Matrix s(k);
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
          s.at(i, j) = std::sqrt(input.mu[i]) * input.kappa.at(i, j) * std::sqrt(input.mu[j]);
      return s;
    }());
    if (k > 1 && std::fabs(sym_check.values[1]) > 1.0 - 1e-8)
      throw std::runtime_error("sbm_constants: Perron root is not simple");
  }
  auto [rho2, v] = power(true);
  (void)rho2;

  double usum = 0.0;
  for (double x : u) usum += x;
  for (double& x : u) x /= usum;  // u^t 1 = 1
  double vu = dot(v, u);
  for (double& x : v) x /= vu;  // v^t u = 1

  double vsum = 0.0, muu = 0.0, vuu = 0.0;
  for (int i = 0; i < k; ++i) {
    vsum += v[i];
    muu += input.mu[i] * u[i];
    vuu += v[i] * u[i] * u[i];
  }

  LimitConstants c;
  c.alpha = 1.0 / (vsum * muu);
  c.chi = vuu / (vsum * muu * muu);
  // zeta = alpha * v^t (A D + kappa B) u
  double z = 0.0;
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      z += v[i] * (input.a.at(i, j) * input.mu[j] + input.kappa.at(i, j) * input.b[j]) * u[j];
  c.zeta = c.alpha * z;
  return c;
}

namespace {

std::vector<double> resolvent_solve(const Matrix& k, std::span<const double> rhs,
                                    const ResolventOptions& opts) {
  const int n = k.n;
  // I - (1/n)K, symmetric positive definite in the subcritical regime
  Matrix sys(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) sys.at(i, j) = (i == j ? 1.0 : 0.0) - k.at(i, j) / n;
  auto x = conjugate_gradient(sys, rhs, opts.tol, opts.max_iter);
  if (!x.empty()) return x;
  if (n <= opts.dense_fallback_max_n) return cholesky_solve(sys, rhs);
  throw std::runtime_error("resolvent: conjugate gradient failed to converge");
}

}  // namespace

std::vector<double> resolvent_mean(const Matrix& k, ResolventOptions opts) {
  double radius = dominant_abs_eigenvalue(k);
  if (radius >= 1.0)
    throw std::runtime_error("resolvent_mean: kernel is not subcritical (|T| = " +
                             std::to_string(radius) + ")");
  std::vector<double> one(k.n, 1.0);
  return resolvent_solve(k, one, opts);
}

std::vector<double> resolvent_second_moment(const Matrix& k, const std::vector<double>& g,
                                            ResolventOptions opts) {
  const int n = k.n;
  if (static_cast<int>(g.size()) != n)
    throw std::invalid_argument("resolvent_second_moment: size mismatch");
  std::vector<double> tg(n), rhs(n);
  matvec(k, g, tg);
  for (double& v : tg) v /= n;
  for (int i = 0; i < n; ++i) {
    double corr = 0.0;
    const double* row = k.row(i);
    for (int j = 0; j < n; ++j) corr += row[j] * row[j] * g[j] * g[j];
    corr /= static_cast<double>(n) * n;
    rhs[i] = tg[i] * tg[i] + 2.0 * g[i] - 1.0 - corr;
  }
  return resolvent_solve(k, rhs, opts);
}

}  // namespace critlab
