#pragma once

#include <string>
#include <vector>

#include "critlab/linalg.hpp"

namespace critlab {

/// Dominant eigenpair of the operator f -> (1/n) K f for a symmetric
/// nonnegative K.  psi is the Perron vector normalized to (1/n) sum psi^2 = 1.
struct SpectralSummary {
  int n = 0;
  double top_eigenvalue = 0.0;
  std::vector<double> psi;
  double second_abs_eigenvalue = 0.0;
  double residual = 0.0;
  int iterations = 0;

  std::string to_json() const;
};

struct PowerIterationOptions {
  double tol = 1e-10;
  int max_iter = 100000;
};

SpectralSummary leading_eigenpair(const Matrix& k, PowerIterationOptions opts = {});

/// Largest |eigenvalue| of f -> (1/n) K f for symmetric K of either sign
/// (power iteration on the squared operator).
double dominant_abs_eigenvalue(const Matrix& k, PowerIterationOptions opts = {});

struct LimitConstants {
  double alpha = 0.0;
  double chi = 0.0;
  double zeta = 0.0;
};

/// alpha = 1/m1^2, chi = m3/m1^3, zeta = <psi, T_H psi>/m1^2 with the
/// uniform-grid integrals m_k = (1/n) sum psi^k and
/// <psi, T_H psi> = (1/n^2) sum_ij psi_i H_ij psi_j.
LimitConstants limit_constants(const SpectralSummary& summary, const Matrix& h);

struct SBMInput {
  int k = 0;
  Matrix kappa;           // k x k symmetric positive
  std::vector<double> mu; // positive, sums to 1
  Matrix a;               // k x k symmetric window matrix
  std::vector<double> b;  // type-count window vector
};

LimitConstants sbm_constants(const SBMInput& input);

struct ResolventOptions {
  double tol = 1e-10;
  int max_iter = 20000;
  int dense_fallback_max_n = 4000;
};

/// Solves (I - (1/n)K) g = 1; requires spectral radius of (1/n)K below one.
std::vector<double> resolvent_mean(const Matrix& k, ResolventOptions opts = {});

/// Second-moment vector of total progeny: solves
///   g2 = T g2 + (T g)^2 + 2 g - 1 - (1/n) int kappa^2 g^2.
std::vector<double> resolvent_second_moment(const Matrix& k, const std::vector<double>& g,
                                            ResolventOptions opts = {});

}  // namespace critlab
