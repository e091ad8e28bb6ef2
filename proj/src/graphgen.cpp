#include "critlab/graphgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "critlab/rng.hpp"

namespace critlab {

void Graph::finalize() {
  for (auto& [i, j] : edges) {
    if (i == j) throw std::invalid_argument("graph: self loop");
    if (i < 0 || j >= n) throw std::invalid_argument("graph: endpoint out of range");
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
}

std::string Graph::to_csv() const {
  std::ostringstream out;
  out << "# n=" << n << "\n";
  out << "i,j\n";
  for (auto& [i, j] : edges) out << (i + 1) << "," << (j + 1) << "\n";
  return out.str();
}

Graph Graph::from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("# n=", 0) != 0)
    throw std::invalid_argument("graph csv: missing '# n=' header");
  Graph g(std::stoi(line.substr(4)));
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line[0] == 'i') continue;
    int i, j;
    if (std::sscanf(line.c_str(), "%d,%d", &i, &j) == 2) g.add_edge(i - 1, j - 1);
  }
  g.finalize();
  return g;
}

namespace {

// Thinned geometric skipping over the row tail j in (i, n): candidate hits at
// rate pmax, accepted with probability p_ij / pmax.  Exact for any row.
template <typename ProbFn>
void sample_row(int i, int n, double pmax, ProbFn&& prob, Rng& rng, Graph& g) {
  if (pmax <= 0.0) return;
  if (pmax >= 1.0) {
    for (int j = i + 1; j < n; ++j)
      if (rng.bernoulli(prob(j))) g.add_edge(i, j);
    return;
  }
  std::uint64_t j = static_cast<std::uint64_t>(i);
  for (;;) {
    std::uint64_t skip = rng.geometric_skip(pmax);
    if (skip >= static_cast<std::uint64_t>(n)) break;  // also covers the inf sentinel
    j += 1 + skip;
    if (j >= static_cast<std::uint64_t>(n)) break;
    int jj = static_cast<int>(j);
    double p = prob(jj);
    if (p >= pmax || rng.uniform() * pmax < p) g.add_edge(i, jj);
  }
}

double edge_prob(double beta_over_n, EdgeRule rule) {
  return rule == EdgeRule::capped ? std::min(1.0, beta_over_n)
                                  : -std::expm1(-beta_over_n);
}

}  // namespace

Graph sample_graphon_graph(const WeightMatrix& weights, EdgeRule rule, std::uint64_t seed) {
  const int n = weights.n;
  Graph g(n);
  Rng rng(seed);
  for (int i = 0; i < n; ++i) {
    double bmax = 0.0;
    for (int j = i + 1; j < n; ++j) bmax = std::max(bmax, weights.beta(i, j));
    if (bmax <= 0.0) continue;
    double pmax = edge_prob(bmax / n, rule);
    sample_row(i, n, pmax,
               [&](int j) { return edge_prob(weights.beta(i, j) / n, rule); }, rng, g);
  }
  g.finalize();
  return g;
}

Graph sample_rank_one_direct(std::span<const double> x, double q, std::uint64_t seed) {
  const int n = static_cast<int>(x.size());
  if (q <= 0.0) throw std::invalid_argument("sample_rank_one: q must be positive");
  for (double v : x)
    if (v <= 0.0) throw std::invalid_argument("sample_rank_one: weights must be positive");
  std::vector<double> sufmax(n + 1, 0.0);
  for (int i = n - 1; i >= 0; --i) sufmax[i] = std::max(sufmax[i + 1], x[i]);
  Graph g(n);
  Rng rng(seed);
  for (int i = 0; i < n; ++i) {
    if (i + 1 >= n) break;
    double pmax = -std::expm1(-q * x[i] * sufmax[i + 1]);
    sample_row(i, n, pmax,
               [&](int j) { return -std::expm1(-q * x[i] * x[j]); }, rng, g);
  }
  g.finalize();
  return g;
}

RankOneExploration sample_rank_one_exploration(std::span<const double> x, double q,
                                               std::uint64_t seed) {
  const int n = static_cast<int>(x.size());
  if (q <= 0.0) throw std::invalid_argument("sample_rank_one: q must be positive");
  for (double v : x)
    if (v <= 0.0) throw std::invalid_argument("sample_rank_one: weights must be positive");
  Rng rng(seed);
  RankOneExploration out;
  out.graph = Graph(n);
  out.order.reserve(n);

  std::vector<char> discovered(n, 0);
  std::vector<int> queue;   // discovered, in discovery order; explored prefix
  std::size_t head = 0;
  double total_weight = std::accumulate(x.begin(), x.end(), 0.0);

  auto pick_fresh_root = [&]() -> int {
    // weight-proportional pick among undiscovered vertices
    double remaining = 0.0;
    for (int i = 0; i < n; ++i)
      if (!discovered[i]) remaining += x[i];
    double t = rng.uniform() * remaining;
    double acc = 0.0;
    int last = -1;
    for (int i = 0; i < n; ++i) {
      if (discovered[i]) continue;
      last = i;
      acc += x[i];
      if (t < acc) return i;
    }
    return last;
  };
  (void)total_weight;

  while (static_cast<int>(out.order.size()) < n) {
    if (head == queue.size()) {
      int root = pick_fresh_root();
      discovered[root] = 1;
      queue.push_back(root);
    }
    int v = queue[head];
    // surplus edges toward vertices already waiting in the queue
    for (std::size_t k = head + 1; k < queue.size(); ++k) {
      int w = queue[k];
      if (rng.bernoulli(-std::expm1(-q * x[v] * x[w]))) out.graph.add_edge(v, w);
    }
    // children among undiscovered vertices, ordered by their exponential marks
    std::vector<std::pair<double, int>> kids;
    for (int i = 0; i < n; ++i) {
      if (discovered[i]) continue;
      double xi = rng.exponential(q * x[i]);
      if (xi <= x[v]) kids.emplace_back(xi, i);
    }
    std::sort(kids.begin(), kids.end());
    for (auto& [mark, child] : kids) {
      (void)mark;
      discovered[child] = 1;
      queue.push_back(child);
      out.graph.add_edge(v, child);
    }
    out.order.push_back(v);
    ++head;
  }
  out.graph.finalize();
  return out;
}

std::string RootedOrderedTree::to_csv() const {
  std::ostringstream out;
  out << "# n=" << n << " root=" << (root + 1) << "\n";
  out << "v,parent\n";
  for (int v = 0; v < n; ++v) out << (v + 1) << "," << (parent[v] + 1) << "\n";
  return out.str();
}

bool RootedOrderedTree::valid() const {
  if (n <= 0 || root < 0 || root >= n) return false;
  if (static_cast<int>(parent.size()) != n || static_cast<int>(children.size()) != n)
    return false;
  int links = 0;
  for (int v = 0; v < n; ++v) {
    if (v == root) {
      if (parent[v] != -1) return false;
      continue;
    }
    if (parent[v] < 0 || parent[v] >= n) return false;
    ++links;
    // acyclicity: walk to the root
    int steps = 0, u = v;
    while (u != root) {
      u = parent[u];
      if (u < 0 || ++steps > n) return false;
    }
  }
  return links == n - 1;
}

RootedOrderedTree sample_p_tree(std::span<const double> p, std::uint64_t seed) {
  const int m = static_cast<int>(p.size());
  if (m < 1) throw std::invalid_argument("sample_p_tree: empty pmf");
  double total = 0.0;
  for (double v : p) {
    if (v <= 0.0) throw std::invalid_argument("sample_p_tree: zero-mass entry");
    total += v;
  }
  Rng rng(seed);
  RootedOrderedTree t;
  t.n = m;
  t.parent.assign(m, -1);
  t.children.assign(m, {});

  std::vector<char> seen(m, 0);
  int root = static_cast<int>(rng.categorical(p, total));
  t.root = root;
  seen[root] = 1;
  int found = 1;
  int prev = root;
  while (found < m) {
    int j = static_cast<int>(rng.categorical(p, total));
    if (!seen[j]) {
      seen[j] = 1;
      t.parent[j] = prev;
      t.children[prev].push_back(j);
      ++found;
    }
    prev = j;
  }
  // The first-appearance child order is size-biased; the target law carries a
  // uniform plane embedding (the 1/d_v! factor), so shuffle each child list.
  for (auto& kids : t.children) {
    for (std::size_t k = kids.size(); k > 1; --k) {
      std::size_t r = rng.uniform_int(k);
      std::swap(kids[k - 1], kids[r]);
    }
  }
  return t;
}

TiltWeight tree_tilt_weight(const RootedOrderedTree& tree, std::span<const double> p,
                            double a) {
  const int m = tree.n;
  if (static_cast<int>(p.size()) != m)
    throw std::invalid_argument("tree_tilt_weight: pmf size mismatch");
  if (a <= 0.0) throw std::invalid_argument("tree_tilt_weight: a must be positive");

  TiltWeight out;
  double log_edge_factor = 0.0;
  for (int v = 0; v < m; ++v) {
    if (v == tree.root) continue;
    double x = a * p[v] * p[tree.parent[v]];
    double f = x > 1e-12 ? std::expm1(x) / x : 1.0 + x / 2.0;
    log_edge_factor += std::log(f);
  }
  // permitted edges: right-siblings along each root path
  std::vector<int> child_pos(m, -1);
  for (int v = 0; v < m; ++v)
    for (std::size_t k = 0; k < tree.children[v].size(); ++k)
      child_pos[tree.children[v][k]] = static_cast<int>(k);
  double permitted_sum = 0.0;
  for (int v = 0; v < m; ++v) {
    if (v == tree.root) continue;
    int node = v;
    while (node != tree.root) {
      int par = tree.parent[node];
      const auto& kids = tree.children[par];
      for (std::size_t k = child_pos[node] + 1; k < kids.size(); ++k) {
        int u = kids[k];
        out.permitted.emplace_back(std::min(u, v), std::max(u, v));
        permitted_sum += a * p[u] * p[v];
      }
      node = par;
    }
  }
  std::sort(out.permitted.begin(), out.permitted.end());
  out.l = std::exp(log_edge_factor + permitted_sum);
  return out;
}

std::vector<RootedOrderedTree> enumerate_ordered_trees(int m) {
  if (m < 1 || m > 5) throw std::invalid_argument("enumerate_ordered_trees: m out of range");
  std::vector<RootedOrderedTree> all;
  if (m == 1) {
    RootedOrderedTree t;
    t.n = 1;
    t.root = 0;
    t.parent = {-1};
    t.children = {{}};
    all.push_back(t);
    return all;
  }
  std::vector<int> parent(m, -1);
  // all rooted labeled trees by brute force over parent maps
  for (int root = 0; root < m; ++root) {
    std::vector<int> slots;
    for (int v = 0; v < m; ++v)
      if (v != root) slots.push_back(v);
    std::vector<int> choice(slots.size(), 0);
    for (;;) {
      for (std::size_t k = 0; k < slots.size(); ++k) parent[slots[k]] = choice[k];
      parent[root] = -1;
      bool ok = true;
      for (int v = 0; v < m && ok; ++v) {
        if (v == root) continue;
        if (parent[v] == v) { ok = false; break; }
        int u = v, steps = 0;
        while (u != root && steps <= m) u = parent[u], ++steps;
        if (u != root) ok = false;
      }
      if (ok) {
        RootedOrderedTree base;
        base.n = m;
        base.root = root;
        base.parent = parent;
        base.children.assign(m, {});
        for (int v = 0; v < m; ++v)
          if (v != root) base.children[parent[v]].push_back(v);
        // expand every plane embedding
        std::vector<RootedOrderedTree> expanded{base};
        for (int v = 0; v < m; ++v) {
          if (base.children[v].size() < 2) continue;
          std::vector<RootedOrderedTree> next;
          std::vector<int> perm = base.children[v];
          std::sort(perm.begin(), perm.end());
          do {
            for (auto t : expanded) {
              t.children[v] = perm;
              next.push_back(std::move(t));
            }
          } while (std::next_permutation(perm.begin(), perm.end()));
          expanded.swap(next);
        }
        for (auto& t : expanded) all.push_back(std::move(t));
      }
      // next parent assignment
      std::size_t k = 0;
      for (; k < choice.size(); ++k) {
        if (++choice[k] < m) break;
        choice[k] = 0;
      }
      if (k == choice.size()) break;
    }
  }
  return all;
}

namespace {

double ordered_tree_prob(const RootedOrderedTree& t, std::span<const double> p) {
  double prob = 1.0;
  for (int v = 0; v < t.n; ++v) {
    int d = static_cast<int>(t.children[v].size());
    prob *= std::pow(p[v], d);
    for (int k = 2; k <= d; ++k) prob /= k;
  }
  return prob;
}

}  // namespace

ConnectedComponentSample sample_connected_component(std::span<const double> p, double a,
                                                    int pool, std::uint64_t seed,
                                                    bool allow_exact) {
  const int m = static_cast<int>(p.size());
  if (pool < 1) throw std::invalid_argument("sample_connected_component: pool must be >= 1");
  Rng rng(seed);

  RootedOrderedTree tree;
  TiltWeight tilt;
  ConnectedComponentSample out;

  if (allow_exact && m <= 4) {
    auto trees = enumerate_ordered_trees(m);
    std::vector<double> w(trees.size());
    double total = 0.0;
    std::vector<TiltWeight> tilts(trees.size());
    for (std::size_t i = 0; i < trees.size(); ++i) {
      tilts[i] = tree_tilt_weight(trees[i], p, a);
      w[i] = ordered_tree_prob(trees[i], p) * tilts[i].l;
      total += w[i];
    }
    std::size_t pick = rng.categorical(w, total);
    tree = trees[pick];
    tilt = tilts[pick];
    out.exact = true;
    out.ess = static_cast<double>(trees.size());
  } else {
    std::vector<RootedOrderedTree> trees(pool);
    std::vector<double> w(pool);
    double total = 0.0, total_sq = 0.0;
    for (int i = 0; i < pool; ++i) {
      trees[i] = sample_p_tree(p, rng.next_u64());
      w[i] = tree_tilt_weight(trees[i], p, a).l;
      total += w[i];
      total_sq += w[i] * w[i];
    }
    std::size_t pick = rng.categorical(w, total);
    tree = trees[pick];
    tilt = tree_tilt_weight(tree, p, a);
    out.exact = false;
    out.ess = total * total / total_sq;
  }

  Graph g(m);
  for (int v = 0; v < m; ++v)
    if (v != tree.root) g.add_edge(v, tree.parent[v]);
  for (auto& [u, v] : tilt.permitted)
    if (rng.bernoulli(-std::expm1(-a * p[u] * p[v]))) g.add_edge(u, v);
  g.finalize();
  out.graph = g;
  return out;
}

Graph sample_rgiv(double n, double lambda, std::uint64_t seed,
                  std::vector<double>* marks_out) {
  if (n < 10.0) throw std::invalid_argument("sample_rgiv: n must be >= 10");
  const double t = 1.5707963267948966 + lambda * std::pow(n, -1.0 / 3.0);
  if (t <= 0.0) throw std::invalid_argument("sample_rgiv: window time is not positive");
  Rng rng(seed);
  const int count = static_cast<int>(rng.poisson(n * t));
  std::vector<double> v(count);
  for (int i = 0; i < count; ++i) v[i] = rng.uniform();
  std::sort(v.begin(), v.end());
  Graph g(count);
  // ascending marks: min(Vi, Vj) = Vi for i < j, so each row is homogeneous
  for (int i = 0; i + 1 < count; ++i) {
    double p = -std::expm1(-t * v[i] / n);
    sample_row(i, count, p, [&](int) { return p; }, rng, g);
  }
  g.finalize();
  if (marks_out) *marks_out = std::move(v);
  return g;
}

BPSummary sample_branching_process(const Matrix& k, int root_type, std::uint64_t cap,
                                   std::uint64_t seed) {
  if (cap < 1) throw std::invalid_argument("sample_branching_process: cap must be >= 1");
  const int n = k.n;
  Rng rng(seed);
  int root = root_type >= 0 ? root_type : static_cast<int>(rng.uniform_int(n));
  if (root >= n) throw std::invalid_argument("sample_branching_process: bad root type");

  std::vector<double> rowmax(n, 0.0);
  for (int i = 0; i < n; ++i) {
    const double* row = k.row(i);
    for (int j = 0; j < n; ++j) rowmax[i] = std::max(rowmax[i], row[j]);
  }

  BPSummary s;
  std::vector<int> current{root}, next;
  s.total = 1;
  s.generation_sizes.push_back(1);
  int level = 0;
  while (!current.empty()) {
    if (s.total >= cap) {
      s.truncated = true;
      break;
    }
    next.clear();
    for (int type : current) {
      double pmax = rowmax[type] / n;
      if (pmax <= 0.0) continue;
      const double* row = k.row(type);
      std::uint64_t j = static_cast<std::uint64_t>(-1);
      for (;;) {
        std::uint64_t skip = rng.geometric_skip(std::min(1.0, pmax));
        if (skip >= static_cast<std::uint64_t>(n)) break;
        j += 1 + skip;
        if (j >= static_cast<std::uint64_t>(n)) break;
        double p = row[static_cast<int>(j)] / n;
        if (p >= pmax || rng.uniform() * pmax < p) next.push_back(static_cast<int>(j));
      }
    }
    if (next.empty()) break;
    ++level;
    s.generation_sizes.push_back(next.size());
    s.total += next.size();
    s.weighted_depth += static_cast<double>(level) * static_cast<double>(next.size());
    current.swap(next);
  }
  s.height = level;
  return s;
}

}  // namespace critlab
