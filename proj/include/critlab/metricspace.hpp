#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "critlab/graphgen.hpp"

namespace critlab {

/// Finite metric space with a nonnegative mass per point.
struct MetricMeasureSpace {
  int m = 0;
  std::vector<double> dist;  // m x m row-major, symmetric, zero diagonal
  std::vector<double> mass;

  MetricMeasureSpace() = default;
  explicit MetricMeasureSpace(int points)
      : m(points), dist(static_cast<std::size_t>(points) * points, 0.0),
        mass(points, 0.0) {}

  double& d(int i, int j) { return dist[static_cast<std::size_t>(i) * m + j]; }
  double d(int i, int j) const { return dist[static_cast<std::size_t>(i) * m + j]; }
  double total_mass() const;
  double diameter() const;

  std::string to_json() const;
  std::string to_csv() const;  // upper triangle plus masses
};

/// Checks symmetry, zero diagonal, and the triangle inequality.
bool check_metric_axioms(const MetricMeasureSpace& x, double tol = 1e-9,
                         std::string* why = nullptr);

/// scl(a,b): distances scaled by a, masses by b.
MetricMeasureSpace scale(const MetricMeasureSpace& x, double a, double b);

/// Blob system: superstructure graph, blob weights, probability-measure blobs
/// and junction points X_{i,j} in blob i for each ordered pair (i,j).
/// Junction indices may be given explicitly or sampled from the blob measures
/// with `junction_seed`.
struct BlobSystem {
  Graph superstructure;
  std::vector<double> x;
  std::vector<MetricMeasureSpace> blobs;
  std::optional<std::vector<std::vector<int>>> junctions;  // [i][j] point in blob i
  std::uint64_t junction_seed = 0;
};

struct GlueResult {
  /// One glued space per superstructure component (component order follows
  /// the components() ranking of the superstructure).
  std::vector<MetricMeasureSpace> spaces;
  /// Blob indices that make up each glued space, aligned with `spaces`;
  /// points of space k are the blobs' points in this order.
  std::vector<std::vector<int>> members;
  std::vector<double> u;   // u_i = int d_i dmu_i dmu_i per blob
  double tau = 0.0;        // sum x_i^2 u_i
  double diam_max = 0.0;   // max blob diameter
};

GlueResult glue_blobs(const BlobSystem& sys);

/// Exact Gromov-Hausdorff distance by correspondence search; both spaces must
/// have at most 7 points.
double gh_distance_exact(const MetricMeasureSpace& x1, const MetricMeasureSpace& x2);

/// Sorted sample of d(U,V) with U,V i.i.d. proportional to mass.
std::vector<double> distance_profile(const MetricMeasureSpace& x, int samples,
                                     std::uint64_t seed);

}  // namespace critlab
