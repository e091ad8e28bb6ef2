#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "critlab/linalg.hpp"

namespace critlab {

enum class KernelFamily {
  constant,          // c
  min_xy,            // c * (x ^ y)
  max_xy,            // c * (x v y)
  sum_pow,           // c * (x + y)^a            (a > -2/3, singular if a < 0)
  max_pow_neg,       // c * (x v y)^{-a}         (0 < a < 2/3, singular at origin)
  absdiff_pow_neg,   // c * |x - y|^{-a}         (0 < a < 1/3, singular on diagonal)
  eta_plus_max_pow,  // c * (eta + (x v y)^a)    (eta >= 0, a > 0)
  tabulated,         // bilinear interpolation of a symmetric grid
};

/// Closed-form kernel on [0,1]^2 with a scalar multiplier.  `c` may be
/// negative when the spec describes a window perturbation H = lambda * W;
/// kernels used as the base W must have c >= 0.
struct KernelSpec {
  KernelFamily family = KernelFamily::constant;
  double a = 0.0;
  double eta = 0.0;
  double c = 1.0;
  /// Values are clipped at |value| <= cap; builders set cap = n^{2/3} for the
  /// singular families so diagonal evaluations stay finite.
  double cap = std::numeric_limits<double>::infinity();
  std::vector<double> table;  // row-major table_n x table_n, symmetric
  int table_n = 0;

  bool singular() const {
    return family == KernelFamily::max_pow_neg ||
           family == KernelFamily::absdiff_pow_neg ||
           (family == KernelFamily::sum_pow && a < 0.0);
  }

  KernelSpec scaled(double factor) const {
    KernelSpec s = *this;
    s.c *= factor;
    return s;
  }

  /// Flat key=value block, one key per line.
  std::string serialize() const;
  static KernelSpec parse(const std::string& text);
};

double eval_kernel(const KernelSpec& spec, double x, double y);

enum class WeightScheme { grid, uniform_order_stat, cell_average, rgiv, sbm, explicit_ };

std::string scheme_name(WeightScheme s);

/// Symmetric edge-weight array beta_ij >= 0 with zero diagonal; only the
/// strict upper triangle is stored.
struct WeightMatrix {
  int n = 0;
  std::vector<double> tri;  // strict upper triangle, row by row
  WeightScheme scheme = WeightScheme::explicit_;
  std::optional<std::uint64_t> seed;
  std::vector<int> exceptional_set;

  WeightMatrix() = default;
  explicit WeightMatrix(int count, WeightScheme s = WeightScheme::explicit_)
      : n(count), tri(static_cast<std::size_t>(count) * (count - 1) / 2, 0.0), scheme(s) {}

  std::size_t index(int i, int j) const {
    // caller guarantees i < j
    return static_cast<std::size_t>(i) * (2 * n - i - 1) / 2 + (j - i - 1);
  }
  double beta(int i, int j) const {
    if (i == j) return 0.0;
    return i < j ? tri[index(i, j)] : tri[index(j, i)];
  }
  void set_beta(int i, int j, double v) {
    tri[i < j ? index(i, j) : index(j, i)] = v;
  }
  double max_beta() const;

  Matrix dense() const;

  /// CSV "i,j,beta" over i<j with a one-line header. 1-based indices.
  std::string to_csv() const;
  static WeightMatrix from_csv(const std::string& text);
};

WeightMatrix build_weight_matrix(const KernelSpec& spec_w, const KernelSpec* spec_h,
                                 int n, WeightScheme scheme,
                                 std::optional<std::uint64_t> seed);

struct ConditionReport {
  double l3_norm = 0.0;           // (1/n^2) sum beta^3
  double theta_stat = 0.0;        // max_i (1/n) sum_j beta_ij^{3/2}
  double norm_deviation = 0.0;    // ||T_{H - n^{1/3}(W_n - W)}||_{2,2} estimate
  std::uint64_t small_pair_count = 0;  // ordered pairs outside B with beta <= n^{-delta0}
  double b_mass = 0.0;            // sum_{i in B} sum_j beta_ij^2
  double delta0 = 0.25;
  double varpi0 = 0.5;
  double theta0 = 1.0 / 24.0;
  double theta1 = 1.0 / 16.0;
};

ConditionReport condition_diagnostics(const WeightMatrix& weights,
                                      const KernelSpec& spec_w,
                                      const KernelSpec* spec_h, double delta0,
                                      std::span<const int> exceptional);

}  // namespace critlab
