#include "critlab/graphstats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <stdexcept>

#include "critlab/rng.hpp"

namespace critlab {

namespace {

struct UnionFind {
  std::vector<int> parent, rank_;
  explicit UnionFind(int n) : parent(n), rank_(n, 0) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
  }
};

}  // namespace

Adjacency::Adjacency(const Graph& g) {
  offsets.assign(g.n + 1, 0);
  for (auto& [i, j] : g.edges) {
    ++offsets[i + 1];
    ++offsets[j + 1];
  }
  for (int v = 0; v < g.n; ++v) offsets[v + 1] += offsets[v];
  targets.resize(2 * g.edges.size());
  std::vector<int> cursor(offsets.begin(), offsets.end() - 1);
  for (auto& [i, j] : g.edges) {
    targets[cursor[i]++] = j;
    targets[cursor[j]++] = i;
  }
}

ComponentSummary components(const Graph& g) {
  UnionFind uf(g.n);
  for (auto& [i, j] : g.edges) uf.unite(i, j);
  std::vector<int> root_of(g.n);
  std::vector<int> edge_count(g.n, 0);
  std::vector<int> size(g.n, 0);
  for (int v = 0; v < g.n; ++v) {
    root_of[v] = uf.find(v);
    ++size[root_of[v]];
  }
  for (auto& [i, j] : g.edges) ++edge_count[root_of[i]];

  std::vector<int> roots;
  for (int v = 0; v < g.n; ++v)
    if (root_of[v] == v) roots.push_back(v);
  std::vector<int> min_label(g.n, -1);
  for (int v = 0; v < g.n; ++v)
    if (min_label[root_of[v]] < 0) min_label[root_of[v]] = v;
  std::sort(roots.begin(), roots.end(), [&](int a, int b) {
    if (size[a] != size[b]) return size[a] > size[b];
    return min_label[a] < min_label[b];
  });

  ComponentSummary s;
  s.components.resize(roots.size());
  std::vector<int> slot(g.n, -1);
  for (std::size_t k = 0; k < roots.size(); ++k) slot[roots[k]] = static_cast<int>(k);
  for (int v = 0; v < g.n; ++v) s.components[slot[root_of[v]]].push_back(v);
  for (auto& c : s.components) {
    s.sizes.push_back(static_cast<int>(c.size()));
  }
  for (std::size_t k = 0; k < roots.size(); ++k)
    s.surplus.push_back(edge_count[roots[k]] - size[roots[k]] + 1);
  return s;
}

std::vector<double> susceptibilities(const ComponentSummary& summary, int n,
                                     std::span<const int> ks) {
  std::vector<double> out;
  out.reserve(ks.size());
  for (int k : ks) {
    if (k < 1) throw std::invalid_argument("susceptibilities: k must be >= 1");
    double s = 0.0;
    for (int size : summary.sizes) s += std::pow(static_cast<double>(size), k);
    out.push_back(s / n);
  }
  return out;
}

namespace {

// BFS from src restricted to its component; fills dist (-1 = unreached).
// Returns (sum of distances, eccentricity).
std::pair<double, int> bfs(const Adjacency& adj, int src, std::vector<int>& dist,
                           std::vector<int>& touched) {
  touched.clear();
  dist[src] = 0;
  touched.push_back(src);
  std::size_t head = 0;
  double sum = 0.0;
  int ecc = 0;
  while (head < touched.size()) {
    int v = touched[head++];
    for (int w : adj.neighbors(v)) {
      if (dist[w] >= 0) continue;
      dist[w] = dist[v] + 1;
      sum += dist[w];
      ecc = std::max(ecc, dist[w]);
      touched.push_back(w);
    }
  }
  return {sum, ecc};
}

}  // namespace

DistanceStats distance_stats(const Graph& g) {
  Adjacency adj(g);
  std::vector<int> dist(g.n, -1), touched;
  DistanceStats s;
  double total = 0.0;
  for (int v = 0; v < g.n; ++v) {
    auto [sum, ecc] = bfs(adj, v, dist, touched);
    total += sum;
    s.diameter = std::max(s.diameter, ecc);
    for (int w : touched) dist[w] = -1;
  }
  s.mean_distance = g.n > 0 ? total / g.n : 0.0;
  return s;
}

DistanceStats distance_stats_sampled(const Graph& g, int sources, std::uint64_t seed) {
  if (sources < 1) throw std::invalid_argument("distance_stats_sampled: need sources >= 1");
  Adjacency adj(g);
  Rng rng(seed);
  std::vector<int> dist(g.n, -1), touched;
  double total = 0.0;
  int diam = 0;
  for (int s = 0; s < sources; ++s) {
    int v = static_cast<int>(rng.uniform_int(g.n));
    auto [sum, ecc] = bfs(adj, v, dist, touched);
    total += sum;
    diam = std::max(diam, ecc);
    for (int w : touched) dist[w] = -1;
  }
  DistanceStats out;
  out.mean_distance = total / sources;  // estimates the per-vertex row sum
  out.diameter = diam;
  return out;
}

MetricMeasureSpace component_metric(const Graph& g, int component_index,
                                    double mass_per_vertex) {
  auto summary = components(g);
  if (component_index < 0 || component_index >= summary.count())
    throw std::invalid_argument("component_metric: component index out of range");
  const auto& verts = summary.components[component_index];
  const int m = static_cast<int>(verts.size());
  std::vector<int> local(g.n, -1);
  for (int k = 0; k < m; ++k) local[verts[k]] = k;

  Adjacency adj(g);
  MetricMeasureSpace space(m);
  std::vector<int> dist(g.n, -1), touched;
  for (int k = 0; k < m; ++k) {
    bfs(adj, verts[k], dist, touched);
    for (int w : touched) {
      space.d(k, local[w]) = dist[w];
      dist[w] = -1;
    }
  }
  for (int k = 0; k < m; ++k) space.mass[k] = mass_per_vertex;
  return space;
}

std::vector<double> component_distance_sample(const Graph& g,
                                              std::span<const int> vertices, int pairs,
                                              std::uint64_t seed) {
  if (vertices.empty()) throw std::invalid_argument("component_distance_sample: empty");
  Adjacency adj(g);
  Rng rng(seed);
  std::vector<int> dist(g.n, -1), touched;
  std::vector<double> out;
  out.reserve(pairs);
  for (int k = 0; k < pairs; ++k) {
    int u = vertices[rng.uniform_int(vertices.size())];
    int v = vertices[rng.uniform_int(vertices.size())];
    bfs(adj, u, dist, touched);
    if (dist[v] < 0)
      throw std::invalid_argument("component_distance_sample: vertices not connected");
    out.push_back(dist[v]);
    for (int w : touched) dist[w] = -1;
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace critlab
