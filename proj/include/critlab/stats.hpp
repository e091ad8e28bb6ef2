#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace critlab {

struct MeanSE {
  double mean = 0.0;
  double se = 0.0;    // standard error of the mean
  double sd = 0.0;    // sample standard deviation
  std::size_t n = 0;
};

MeanSE mean_se(std::span<const double> xs);

struct KSResult {
  double d = 0.0;
  double p = 1.0;
};

/// Two-sample Kolmogorov-Smirnov statistic with the asymptotic p-value.
/// Inputs need not be sorted.
KSResult ks_two_sample(std::span<const double> a, std::span<const double> b);

/// Kolmogorov distribution tail Q(x) = 2 sum (-1)^{k-1} exp(-2 k^2 x^2).
double kolmogorov_tail(double x);

/// Upper regularized incomplete gamma Q(a, x); used for chi-square tails.
double gamma_q(double a, double x);

/// P(Chi2_df >= x).
double chi_square_tail(double x, double df);

struct ChiSquareResult {
  double stat = 0.0;
  double df = 0.0;
  double p = 1.0;
};

/// Goodness of fit of observed counts against expected counts (same total).
/// Cells with expected < min_expected are pooled into their neighbor.
ChiSquareResult chi_square_gof(std::span<const double> observed,
                               std::span<const double> expected,
                               double min_expected = 5.0);

/// Two-sample chi-square homogeneity test on integer-valued samples.
/// Values are bucketed by exact value, sparse buckets pooled.
ChiSquareResult chi_square_two_sample_counts(std::span<const std::uint64_t> a,
                                             std::span<const std::uint64_t> b,
                                             double min_expected = 5.0);

/// Empirical quantile (q in [0,1]) of an unsorted sample.
double quantile(std::vector<double> xs, double q);

}  // namespace critlab
