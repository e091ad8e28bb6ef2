#pragma once

#include <cstdint>
#include <vector>

#include "critlab/metricspace.hpp"

namespace critlab {

/// Excursions of the reflected parabolic drift path W(t) = B(t) + lambda t - t^2/2.
struct LimitSample {
  double lambda = 0.0;
  double horizon = 0.0;
  double dt = 0.0;
  struct Excursion {
    double start = 0.0;
    double length = 0.0;
    double area = 0.0;
    std::uint64_t marks = 0;  // Poisson(area)
  };
  std::vector<Excursion> excursions;  // sorted by length descending
  bool truncated = false;             // an excursion was still open at the horizon

  std::string to_csv() const;
};

struct LimitSizeOptions {
  double noise_scale = 1.0;  // 0 disables the Brownian term (test hook)
  double min_length_dts = 5.0;
};

LimitSample sample_limit_sizes(double lambda, double horizon, double dt,
                               std::uint64_t seed, LimitSizeOptions opts = {});

/// Default horizon 4|lambda| + 12; reruns with doubled horizon while truncated.
LimitSample sample_limit_sizes_auto(double lambda, std::uint64_t seed,
                                    double dt = 1e-4);

struct ExcursionPath {
  double length = 0.0;
  double dt = 0.0;
  std::vector<double> values;  // grid+1 values, zero at both ends
  double tilt_theta = 0.0;

  double area() const;  // trapezoid of the path
};

struct TiltedExcursion {
  ExcursionPath path;
  double ess = 0.0;  // effective pool size of the importance resampling
};

/// Brownian excursion of the given length (bridge + Vervaat rotation),
/// exponentially tilted by exp(theta * area) via pool importance resampling.
TiltedExcursion sample_tilted_excursion(double length, double theta, int grid,
                                        int pool, std::uint64_t seed);

/// Quotient metric space G(h, g, P): the real tree encoded by h with
/// Poisson-mean-area(g) identifications, Lebesgue mass on the grid cells.
MetricMeasureSpace build_limit_space(const ExcursionPath& h, const ExcursionPath& g,
                                     std::uint64_t seed, int* links_out = nullptr);

/// Crit-space sample G(2 e~_gamma, e~_gamma, P) with the length-gamma tilted
/// excursion (theta = 1).
MetricMeasureSpace sample_crit_space(double gamma, int grid, int pool,
                                     std::uint64_t seed, int* surplus_out = nullptr,
                                     double* ess_out = nullptr);

}  // namespace critlab
