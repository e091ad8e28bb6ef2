#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "critlab/graphgen.hpp"
#include "critlab/metricspace.hpp"

namespace critlab {

struct ComponentSummary {
  std::vector<std::vector<int>> components;  // size-descending, ties by min label
  std::vector<int> sizes;
  std::vector<int> surplus;  // edges - size + 1 per component

  int count() const { return static_cast<int>(components.size()); }
};

ComponentSummary components(const Graph& g);

/// s_k = sum_C |C|^k / n for each requested k.
std::vector<double> susceptibilities(const ComponentSummary& summary, int n,
                                     std::span<const int> ks);

struct DistanceStats {
  double mean_distance = 0.0;  // (1/n) sum over ordered same-component pairs
  int diameter = 0;
};

/// Exact per-vertex BFS version.
DistanceStats distance_stats(const Graph& g);

/// Sampled-pairs estimate of the same quantity (approximate; diameter is the
/// max eccentricity seen from the sampled sources).
DistanceStats distance_stats_sampled(const Graph& g, int sources, std::uint64_t seed);

/// Component as a metric measure space under the graph distance.
MetricMeasureSpace component_metric(const Graph& g, int component_index,
                                    double mass_per_vertex);

/// Adjacency view used by the BFS helpers.
struct Adjacency {
  std::vector<int> offsets;
  std::vector<int> targets;
  explicit Adjacency(const Graph& g);
  std::span<const int> neighbors(int v) const {
    return {targets.data() + offsets[v],
            static_cast<std::size_t>(offsets[v + 1] - offsets[v])};
  }
};

/// Distances of `pairs` vertex pairs drawn uniformly from `vertices` (BFS per
/// sampled source, restricted to the component).
std::vector<double> component_distance_sample(const Graph& g,
                                              std::span<const int> vertices, int pairs,
                                              std::uint64_t seed);

}  // namespace critlab
