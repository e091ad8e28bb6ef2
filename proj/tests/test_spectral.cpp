#include <cmath>
#include <vector>

#include "doctest.h"

#include "critlab/graphgen.hpp"
#include "critlab/linalg.hpp"
#include "critlab/rng.hpp"
#include "critlab/spectral.hpp"
#include "critlab/stats.hpp"

using namespace critlab;

namespace {

const double kPi = 3.14159265358979323846;

Matrix all_ones_offdiag(int n) {
  Matrix k(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) k.at(i, j) = i == j ? 0.0 : 1.0;
  return k;
}

Matrix min_kernel_matrix(int n, double c) {
  Matrix k(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double x = static_cast<double>(i + 1) / n, y = static_cast<double>(j + 1) / n;
      k.at(i, j) = i == j ? 0.0 : c * std::min(x, y);
    }
  return k;
}

}  // namespace

TEST_CASE("leading eigenpair of the all-ones kernel") {
  SpectralSummary s = leading_eigenpair(all_ones_offdiag(4));
  CHECK(s.top_eigenvalue == doctest::Approx(0.75).epsilon(1e-9));
  for (double v : s.psi) CHECK(v == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(s.second_abs_eigenvalue == doctest::Approx(0.25).epsilon(1e-6));
  CHECK(s.residual <= 1e-8 * s.top_eigenvalue);
}

TEST_CASE("leading eigenpair rejects bad input") {
  Matrix zero(3);
  CHECK_THROWS(leading_eigenpair(zero));
  Matrix neg(2);
  neg.at(0, 1) = neg.at(1, 0) = -1.0;
  CHECK_THROWS(leading_eigenpair(neg));
}

TEST_CASE("min kernel eigenpair approaches the sine profile") {
  const int n = 500;
  SpectralSummary s = leading_eigenpair(min_kernel_matrix(n, kPi * kPi / 4.0));
  CHECK(std::fabs(s.top_eigenvalue - 1.0) < 8e-3);
  double sup = 0.0;
  for (int i = 0; i < n; ++i) {
    double x = (i + 0.5) / n;
    sup = std::max(sup, std::fabs(s.psi[i] - std::sqrt(2.0) * std::sin(kPi * x / 2.0)));
  }
  CHECK(sup < 2e-2);
  // (1/n)-weighted normalization of psi
  double norm = 0.0;
  for (double v : s.psi) norm += v * v;
  CHECK(norm / n == doctest::Approx(1.0).epsilon(1e-10));
  // gap positivity for a kernel with spectrum 1, 1/9, 1/25, ...
  CHECK(s.second_abs_eigenvalue < s.top_eigenvalue);
  CHECK(s.second_abs_eigenvalue == doctest::Approx(1.0 / 9.0).epsilon(0.05));
}

TEST_CASE("limit constants for flat and sine eigenfunctions") {
  SpectralSummary flat;
  flat.n = 64;
  flat.psi.assign(64, 1.0);
  Matrix h(64);
  for (double& v : h.a) v = 2.5;  // lambda * all-ones
  LimitConstants c = limit_constants(flat, h);
  CHECK(c.alpha == doctest::Approx(1.0));
  CHECK(c.chi == doctest::Approx(1.0));
  CHECK(c.zeta == doctest::Approx(2.5));

  // exact sine eigenfunction sampled at midpoints; symbolic targets
  const int n = 2000;
  SpectralSummary sine;
  sine.n = n;
  sine.psi.resize(n);
  for (int i = 0; i < n; ++i)
    sine.psi[i] = std::sqrt(2.0) * std::sin(kPi * (i + 0.5) / (2.0 * n));
  const double lambda = 1.7;
  Matrix hm(n);
  double hc = lambda * std::pow(kPi, 4.0 / 3.0) * std::pow(2.0, -1.0 / 3.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      hm.at(i, j) = hc * std::min((i + 0.5) / n, (j + 0.5) / n);
  LimitConstants sc = limit_constants(sine, hm);
  CHECK(sc.alpha == doctest::Approx(kPi * kPi / 8.0).epsilon(1e-5));
  CHECK(sc.chi == doctest::Approx(kPi * kPi / 6.0).epsilon(1e-5));
  double a3 = std::pow(3.0, 2.0 / 3.0) / std::pow(2.0, 2.0 / 3.0);
  CHECK(sc.zeta / std::pow(sc.chi, 2.0 / 3.0) ==
        doctest::Approx(lambda * a3).epsilon(1e-4));

  Matrix zero(n);
  CHECK(limit_constants(sine, zero).zeta == doctest::Approx(0.0));
}

TEST_CASE("sbm constants") {
  SUBCASE("scalar reduction") {
    SBMInput in;
    in.k = 1;
    in.kappa = Matrix(1);
    in.kappa.at(0, 0) = 1.0;
    in.mu = {1.0};
    in.a = Matrix(1);
    in.a.at(0, 0) = 2.0;  // lambda
    in.b = {0.0};
    LimitConstants c = sbm_constants(in);
    CHECK(c.alpha == doctest::Approx(1.0));
    CHECK(c.chi == doctest::Approx(1.0));
    CHECK(c.zeta == doctest::Approx(2.0));
  }
  SUBCASE("symmetric two-type kernel") {
    double a = 1.3, b = 0.7;  // (a+b)/2 = 1 keeps the Perron root at one
    SBMInput in;
    in.k = 2;
    in.kappa = Matrix(2);
    in.kappa.at(0, 0) = in.kappa.at(1, 1) = a;
    in.kappa.at(0, 1) = in.kappa.at(1, 0) = b;
    in.mu = {0.5, 0.5};
    in.a = in.kappa;
    double lambda = -0.8;
    for (double& v : in.a.a) v *= lambda;
    in.b = {0.0, 0.0};
    LimitConstants c = sbm_constants(in);
    CHECK(c.alpha == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(c.chi == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(c.zeta == doctest::Approx(lambda).epsilon(1e-9));
  }
  SUBCASE("type-count window enters through kappa Diag(b)") {
    double a = 1.2, bb = 0.8;
    SBMInput in;
    in.k = 2;
    in.kappa = Matrix(2);
    in.kappa.at(0, 0) = in.kappa.at(1, 1) = a;
    in.kappa.at(0, 1) = in.kappa.at(1, 0) = bb;
    in.mu = {0.5, 0.5};
    in.a = Matrix(2);
    double beta = 0.6;
    in.b = {beta, -beta};
    LimitConstants c = sbm_constants(in);
    // direct evaluation: u = (1/2,1/2), v = (1,1)
    double expect = c.alpha * (1.0 * (a * beta * 0.5 + bb * (-beta) * 0.5) +
                               1.0 * (bb * beta * 0.5 + a * (-beta) * 0.5));
    CHECK(c.zeta == doctest::Approx(expect).epsilon(1e-9));
    // sign flips with beta
    in.b = {-beta, beta};
    LimitConstants c2 = sbm_constants(in);
    CHECK(c2.zeta == doctest::Approx(-c.zeta).epsilon(1e-9));
  }
  SUBCASE("off-critical kernel is rejected") {
    SBMInput in;
    in.k = 1;
    in.kappa = Matrix(1);
    in.kappa.at(0, 0) = 1.1;
    in.mu = {1.0};
    in.a = Matrix(1);
    in.b = {0.0};
    CHECK_THROWS(sbm_constants(in));
  }
}

TEST_CASE("resolvent mean") {
  SUBCASE("zero kernel") {
    Matrix k(5);
    auto g = resolvent_mean(k);
    for (double v : g) CHECK(v == doctest::Approx(1.0));
  }
  SUBCASE("constant subcritical kernel") {
    const int n = 400;
    double c = 0.6;
    Matrix k(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) k.at(i, j) = i == j ? 0.0 : c;
    auto g = resolvent_mean(k);
    for (double v : g) CHECK(v == doctest::Approx(1.0 / (1.0 - c)).epsilon(0.02));
  }
  SUBCASE("supercritical kernel is rejected") {
    Matrix k(3);
    for (double& v : k.a) v = 4.0;
    CHECK_THROWS(resolvent_mean(k));
  }
}

TEST_CASE("resolvent second moment") {
  SUBCASE("zero kernel") {
    Matrix k(4);
    std::vector<double> g(4, 1.0);
    auto g2 = resolvent_second_moment(k, g);
    for (double v : g2) CHECK(v == doctest::Approx(1.0));
  }
  SUBCASE("constant kernel matches the scalar fixed point") {
    const int n = 500;
    double c = 0.5;
    Matrix k(n);
    for (double& v : k.a) v = c;  // include the diagonal so the row mean is exactly c
    auto g = resolvent_mean(k);
    auto g2 = resolvent_second_moment(k, g);
    double gs = 1.0 / (1.0 - c);
    double expect = (2.0 * gs - 1.0 + c * c * gs * gs) / (1.0 - c);
    for (double v : g2) CHECK(v == doctest::Approx(expect).epsilon(0.01));
    // variance nonnegativity holds entrywise
    for (int i = 0; i < n; ++i) CHECK(g2[i] >= g[i] * g[i] - 1e-9);
  }
}

TEST_CASE("eigenvalue derivative matches the quadratic form (finite dimensions)") {
  Rng rng(2024);
  const int dim = 20;
  for (int trial = 0; trial < 20; ++trial) {
    // A1 with a guaranteed simple dominant eigenvalue via a spread spectrum
    Matrix q(dim);
    for (double& v : q.a) v = rng.normal();
    // orthonormalize columns (Gram-Schmidt)
    for (int c = 0; c < dim; ++c) {
      for (int c2 = 0; c2 < c; ++c2) {
        double d = 0.0;
        for (int r = 0; r < dim; ++r) d += q.at(r, c) * q.at(r, c2);
        for (int r = 0; r < dim; ++r) q.at(r, c) -= d * q.at(r, c2);
      }
      double nrm = 0.0;
      for (int r = 0; r < dim; ++r) nrm += q.at(r, c) * q.at(r, c);
      nrm = std::sqrt(nrm);
      for (int r = 0; r < dim; ++r) q.at(r, c) /= nrm;
    }
    std::vector<double> spectrum(dim);
    spectrum[0] = 2.0;
    for (int i = 1; i < dim; ++i) spectrum[i] = rng.uniform() * 2.0 - 1.0;
    Matrix a1(dim), a3(dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) {
        double s = 0.0;
        for (int k = 0; k < dim; ++k) s += q.at(i, k) * spectrum[k] * q.at(j, k);
        a1.at(i, j) = s;
      }
    double fro = 0.0;
    for (int i = 0; i < dim; ++i)
      for (int j = i; j < dim; ++j) {
        double v = rng.normal();
        a3.at(i, j) = v;
        a3.at(j, i) = v;
        fro += (i == j ? 1.0 : 2.0) * v * v;
      }
    fro = std::sqrt(fro);
    for (double& v : a3.a) v /= fro;

    auto eig = jacobi_eigen(a1);
    std::vector<double> phi(dim);
    for (int i = 0; i < dim; ++i) phi[i] = eig.vectors.at(i, 0);
    std::vector<double> a3phi(dim);
    matvec(a3, phi, a3phi);
    double form = dot(phi, a3phi);

    for (double y : {1e-4, 1e-5}) {
      Matrix moved = a1;
      for (std::size_t idx = 0; idx < moved.a.size(); ++idx)
        moved.a[idx] += y * a3.a[idx];
      double slope = (spectral_norm_small(moved) - spectral_norm_small(a1)) / y;
      CHECK(std::fabs(slope - form) <= 10.0 * y + 1e-9);
    }
  }
}

TEST_CASE("branching-process mean total matches the resolvent oracle") {
  const int n = 100;
  double c = 0.55;
  Matrix k(n);
  for (double& v : k.a) v = c;
  auto g = resolvent_mean(k);
  double oracle = 0.0;
  for (double v : g) oracle += v;
  oracle /= n;

  const int reps = 20000;
  std::vector<double> totals(reps);
  for (int r = 0; r < reps; ++r) {
    Rng stream = Rng::stream(77, r);
    BPSummary s = sample_branching_process(k, -1, 100000, stream.next_u64());
    totals[r] = static_cast<double>(s.total);
  }
  MeanSE m = mean_se(totals);
  CHECK(std::fabs(m.mean - oracle) <= 4.0 * m.se);
}
