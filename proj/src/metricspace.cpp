#include "critlab/metricspace.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <queue>
#include <sstream>
#include <stdexcept>

#include "critlab/graphstats.hpp"
#include "critlab/rng.hpp"

namespace critlab {

double MetricMeasureSpace::total_mass() const {
  double s = 0.0;
  for (double v : mass) s += v;
  return s;
}

double MetricMeasureSpace::diameter() const {
  double v = 0.0;
  for (double x : dist) v = std::max(v, x);
  return v;
}

std::string MetricMeasureSpace::to_json() const {
  std::ostringstream out;
  char buf[32];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.12g", v);
    out << buf;
  };
  out << "{\"m\":" << m << ",\"dist\":[";
  for (int i = 0; i < m; ++i) {
    if (i) out << ",";
    out << "[";
    for (int j = 0; j < m; ++j) {
      if (j) out << ",";
      num(d(i, j));
    }
    out << "]";
  }
  out << "],\"mass\":[";
  for (int i = 0; i < m; ++i) {
    if (i) out << ",";
    num(mass[i]);
  }
  out << "]}";
  return out.str();
}

std::string MetricMeasureSpace::to_csv() const {
  std::ostringstream out;
  out << "# m=" << m << "\n";
  out << "i,j,dist\n";
  char buf[64];
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      std::snprintf(buf, sizeof buf, "%d,%d,%.17g\n", i + 1, j + 1, d(i, j));
      out << buf;
    }
  out << "i,mass\n";
  for (int i = 0; i < m; ++i) {
    std::snprintf(buf, sizeof buf, "%d,%.17g\n", i + 1, mass[i]);
    out << buf;
  }
  return out.str();
}

bool check_metric_axioms(const MetricMeasureSpace& x, double tol, std::string* why) {
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  for (int i = 0; i < x.m; ++i) {
    if (std::fabs(x.d(i, i)) > tol) return fail("nonzero diagonal");
    if (x.mass[i] < 0.0) return fail("negative mass");
    for (int j = 0; j < x.m; ++j) {
      if (x.d(i, j) < -tol) return fail("negative distance");
      if (std::fabs(x.d(i, j) - x.d(j, i)) > tol) return fail("asymmetric");
    }
  }
  for (int j = 0; j < x.m; ++j)
    for (int i = 0; i < x.m; ++i) {
      double dij = x.d(i, j);
      for (int k = 0; k < x.m; ++k)
        if (x.d(i, k) > dij + x.d(j, k) + tol) return fail("triangle inequality violated");
    }
  return true;
}

MetricMeasureSpace scale(const MetricMeasureSpace& x, double a, double b) {
  if (a <= 0.0 || b <= 0.0) throw std::invalid_argument("scale: factors must be positive");
  MetricMeasureSpace y = x;
  for (double& v : y.dist) v *= a;
  for (double& v : y.mass) v *= b;
  return y;
}

GlueResult glue_blobs(const BlobSystem& sys) {
  const int n = sys.superstructure.n;
  if (static_cast<int>(sys.blobs.size()) != n || static_cast<int>(sys.x.size()) != n)
    throw std::invalid_argument("glue_blobs: blob/weight counts must match the superstructure");
  for (int i = 0; i < n; ++i) {
    if (sys.x[i] <= 0.0) throw std::invalid_argument("glue_blobs: weights must be positive");
    if (std::fabs(sys.blobs[i].total_mass() - 1.0) > 1e-9)
      throw std::invalid_argument("glue_blobs: blob measures must be probability measures");
  }

  GlueResult out;
  out.u.resize(n);
  for (int i = 0; i < n; ++i) {
    const auto& blob = sys.blobs[i];
    double u = 0.0;
    for (int p = 0; p < blob.m; ++p)
      for (int q = 0; q < blob.m; ++q) u += blob.d(p, q) * blob.mass[p] * blob.mass[q];
    out.u[i] = u;
    out.tau += sys.x[i] * sys.x[i] * u;
    out.diam_max = std::max(out.diam_max, blob.diameter());
  }

  // junction points per superstructure edge
  Rng rng(sys.junction_seed);
  auto junction = [&](int i, int j) -> int {
    if (sys.junctions) {
      const auto& rows = *sys.junctions;
      int idx = rows.at(i).at(j);
      if (idx < 0 || idx >= sys.blobs[i].m)
        throw std::invalid_argument("glue_blobs: junction index out of range");
      return idx;
    }
    const auto& blob = sys.blobs[i];
    return static_cast<int>(rng.categorical(blob.mass, blob.total_mass()));
  };
  // resolve in a fixed order so the sampled variant is reproducible
  std::vector<std::pair<int, int>> edge_junctions(sys.superstructure.edges.size());
  for (std::size_t e = 0; e < sys.superstructure.edges.size(); ++e) {
    auto [i, j] = sys.superstructure.edges[e];
    edge_junctions[e] = {junction(i, j), junction(j, i)};
  }

  auto comp = components(sys.superstructure);
  std::vector<int> comp_of(n, -1);
  for (int c = 0; c < comp.count(); ++c)
    for (int v : comp.components[c]) comp_of[v] = c;

  for (int c = 0; c < comp.count(); ++c) {
    const auto& blobs_here = comp.components[c];
    // global point layout
    std::vector<int> offset(n, -1);
    int points = 0;
    for (int b : blobs_here) {
      offset[b] = points;
      points += sys.blobs[b].m;
    }

    // junction graph: nodes are (blob, point) pairs that serve as junctions
    struct JNode { int blob; int point; };
    std::vector<JNode> jnodes;
    std::vector<std::vector<int>> jof(n);  // node ids per blob
    auto node_id = [&](int blob, int point) {
      for (int id : jof[blob])
        if (jnodes[id].point == point) return id;
      jnodes.push_back({blob, point});
      jof[blob].push_back(static_cast<int>(jnodes.size() - 1));
      return static_cast<int>(jnodes.size() - 1);
    };
    std::vector<std::pair<std::pair<int, int>, double>> links;  // unit-length cross links
    for (std::size_t e = 0; e < sys.superstructure.edges.size(); ++e) {
      auto [i, j] = sys.superstructure.edges[e];
      if (comp_of[i] != c) continue;
      int a = node_id(i, edge_junctions[e].first);
      int b = node_id(j, edge_junctions[e].second);
      links.push_back({{a, b}, 1.0});
    }

    const int jn = static_cast<int>(jnodes.size());
    // all-pairs shortest paths over junction nodes (Dijkstra per source over a
    // dense-ish small graph: intra-blob complete + unit cross links)
    std::vector<std::vector<double>> dj(jn, std::vector<double>(jn, 0.0));
    const double inf = std::numeric_limits<double>::infinity();
    for (int src = 0; src < jn; ++src) {
      std::vector<double> best(jn, inf);
      best[src] = 0.0;
      std::priority_queue<std::pair<double, int>, std::vector<std::pair<double, int>>,
                          std::greater<>> heap;
      heap.push({0.0, src});
      while (!heap.empty()) {
        auto [dv, v] = heap.top();
        heap.pop();
        if (dv > best[v]) continue;
        int blob = jnodes[v].blob;
        for (int w : jof[blob]) {
          if (w == v) continue;
          double nd = dv + sys.blobs[blob].d(jnodes[v].point, jnodes[w].point);
          if (nd < best[w]) {
            best[w] = nd;
            heap.push({nd, w});
          }
        }
        for (auto& [pair, len] : links) {
          int other = -1;
          if (pair.first == v) other = pair.second;
          else if (pair.second == v) other = pair.first;
          if (other < 0) continue;
          double nd = dv + len;
          if (nd < best[other]) {
            best[other] = nd;
            heap.push({nd, other});
          }
        }
      }
      for (int w = 0; w < jn; ++w) dj[src][w] = best[w];
    }

    MetricMeasureSpace space(points);
    for (int bi : blobs_here) {
      const auto& blob_i = sys.blobs[bi];
      for (int p = 0; p < blob_i.m; ++p)
        space.mass[offset[bi] + p] = sys.x[bi] * blob_i.mass[p];
      for (int bj : blobs_here) {
        if (bj < bi) continue;
        const auto& blob_j = sys.blobs[bj];
        for (int p = 0; p < blob_i.m; ++p) {
          int q0 = (bi == bj) ? p + 1 : 0;
          for (int q = q0; q < blob_j.m; ++q) {
            double best = bi == bj ? blob_i.d(p, q) : inf;
            for (int a : jof[bi]) {
              double da = blob_i.d(p, jnodes[a].point);
              for (int b : jof[bj]) {
                double cand = da + dj[a][b] + blob_j.d(jnodes[b].point, q);
                best = std::min(best, cand);
              }
            }
            space.d(offset[bi] + p, offset[bj] + q) = best;
            space.d(offset[bj] + q, offset[bi] + p) = best;
          }
        }
      }
    }
    out.spaces.push_back(std::move(space));
    out.members.push_back(blobs_here);
  }
  return out;
}

namespace {

struct GHSearch {
  const MetricMeasureSpace& x1;
  const MetricMeasureSpace& x2;
  int m1, m2;
  std::vector<int> f;  // x1 -> x2
  std::vector<int> g;  // x2 -> x1
  double best;

  GHSearch(const MetricMeasureSpace& a, const MetricMeasureSpace& b)
      : x1(a), x2(b), m1(a.m), m2(b.m), f(a.m, -1), g(b.m, -1),
        best(std::max(a.diameter(), b.diameter()) + 1e-12) {}

  // distortion of the pair (p in X1, q in X2) against all assigned pairs
  double pair_dis(int p, int q, double current) const {
    double worst = current;
    for (int i = 0; i < m1; ++i)
      if (f[i] >= 0) worst = std::max(worst, std::fabs(x1.d(p, i) - x2.d(q, f[i])));
    for (int j = 0; j < m2; ++j)
      if (g[j] >= 0) worst = std::max(worst, std::fabs(x1.d(p, g[j]) - x2.d(q, j)));
    return worst;
  }

  void search_f(int idx, double current) {
    if (current >= best) return;
    if (idx == m1) {
      search_g(0, current);
      return;
    }
    for (int q = 0; q < m2; ++q) {
      double next = pair_dis(idx, q, current);
      if (next >= best) continue;
      f[idx] = q;
      search_f(idx + 1, next);
      f[idx] = -1;
    }
  }

  void search_g(int idx, double current) {
    if (current >= best) return;
    if (idx == m2) {
      best = current;
      return;
    }
    // rows of X2 already hit by f do not need a g-assignment to make the
    // relation surjective, but g must still be total; trying all targets is
    // required for exactness
    for (int p = 0; p < m1; ++p) {
      double next = pair_dis(p, idx, current);
      if (next >= best) continue;
      g[idx] = p;
      search_g(idx + 1, next);
      g[idx] = -1;
    }
  }
};

}  // namespace

double gh_distance_exact(const MetricMeasureSpace& x1, const MetricMeasureSpace& x2) {
  if (x1.m < 1 || x2.m < 1) throw std::invalid_argument("gh_distance_exact: empty space");
  if (x1.m > 7 || x2.m > 7)
    throw std::invalid_argument(
        "gh_distance_exact: more than 7 points; use distance_profile instead");
  GHSearch s(x1, x2);
  s.search_f(0, 0.0);
  return s.best / 2.0;
}

std::vector<double> distance_profile(const MetricMeasureSpace& x, int samples,
                                     std::uint64_t seed) {
  double total = x.total_mass();
  if (total <= 0.0) throw std::invalid_argument("distance_profile: zero total mass");
  Rng rng(seed);
  std::vector<double> cum(x.m);
  double acc = 0.0;
  for (int i = 0; i < x.m; ++i) {
    acc += x.mass[i];
    cum[i] = acc;
  }
  auto pick = [&]() {
    double t = rng.uniform() * total;
    return static_cast<int>(std::lower_bound(cum.begin(), cum.end(), t) - cum.begin());
  };
  std::vector<double> out;
  out.reserve(samples);
  for (int s = 0; s < samples; ++s) {
    int u = std::min(pick(), x.m - 1);
    int v = std::min(pick(), x.m - 1);
    out.push_back(x.d(u, v));
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace critlab
