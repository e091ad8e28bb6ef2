#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "critlab/kernels.hpp"
#include "critlab/linalg.hpp"

namespace critlab {

/// Simple undirected graph as a sorted unique edge list over 0..n-1.
struct Graph {
  int n = 0;
  std::vector<std::pair<int, int>> edges;  // i < j, lexicographically sorted

  Graph() = default;
  explicit Graph(int count) : n(count) {}

  void add_edge(int i, int j) {
    if (i > j) std::swap(i, j);
    edges.emplace_back(i, j);
  }
  void finalize();  // sort + dedupe + validate

  /// CSV "i,j" with a "# n=<n>" header, 1-based.
  std::string to_csv() const;
  static Graph from_csv(const std::string& text);
};

enum class EdgeRule { capped, exponential };

/// Percolation graph of a weight matrix: edge {i,j} present independently
/// with probability 1 ^ (beta_ij/n) or 1 - exp(-beta_ij/n).
Graph sample_graphon_graph(const WeightMatrix& weights, EdgeRule rule, std::uint64_t seed);

/// Rank-one graph: edge {i,j} with probability 1 - exp(-q x_i x_j).
Graph sample_rank_one_direct(std::span<const double> x, double q, std::uint64_t seed);

struct RankOneExploration {
  Graph graph;
  std::vector<int> order;  // v(1..n), size-biased breadth-first discovery order
};

/// Size-biased breadth-first construction of the same law, also returning the
/// exploration order.
RankOneExploration sample_rank_one_exploration(std::span<const double> x, double q,
                                               std::uint64_t seed);

struct RootedOrderedTree {
  int n = 0;
  int root = 0;
  std::vector<int> parent;                 // parent[root] = -1
  std::vector<std::vector<int>> children;  // left-to-right order

  bool valid() const;

  /// Parent-array CSV "v,parent" (1-based, root's parent = 0).
  std::string to_csv() const;
};

/// Ordered p-tree with law prod_v p_v^{d_v} / d_v!.
RootedOrderedTree sample_p_tree(std::span<const double> p, std::uint64_t seed);

struct TiltWeight {
  double l = 1.0;
  std::vector<std::pair<int, int>> permitted;  // sorted pairs
};

/// Tilt weight L(t) together with the permitted-edge set P(t).
TiltWeight tree_tilt_weight(const RootedOrderedTree& tree, std::span<const double> p,
                            double a);

struct ConnectedComponentSample {
  Graph graph;
  double ess = 0.0;   // effective pool size behind the accepted tree
  bool exact = false; // true when the tilted tree was drawn by enumeration
};

/// Connected graph with law P_con(.; p, a, [m]): a tilted ordered p-tree plus
/// independent permitted edges.  Exact enumeration is used for m <= 4 when
/// allow_exact is set; otherwise a pool of p-trees is importance-resampled.
ConnectedComponentSample sample_connected_component(std::span<const double> p, double a,
                                                    int pool, std::uint64_t seed,
                                                    bool allow_exact = true);

/// All ordered rooted trees on [m] (small m only), for enumeration oracles.
std::vector<RootedOrderedTree> enumerate_ordered_trees(int m);

/// RGIV snapshot at time pi/2 + lambda n^{-1/3}: Poisson(n t) vertices with
/// sorted uniform marks V, edge {i,j} with probability 1-exp(-t (Vi^Vj)/n).
Graph sample_rgiv(double n, double lambda, std::uint64_t seed,
                  std::vector<double>* marks_out = nullptr);

struct BPSummary {
  std::uint64_t total = 0;
  int height = 0;
  double weighted_depth = 0.0;              // sum_l l * |G_l|
  std::vector<std::uint64_t> generation_sizes;
  bool truncated = false;
};

/// Multitype branching process where a vertex of type i has Bernoulli(K_ij/n)
/// children of type j.  root_type = -1 draws the root uniformly.
BPSummary sample_branching_process(const Matrix& k, int root_type, std::uint64_t cap,
                                   std::uint64_t seed);

}  // namespace critlab
