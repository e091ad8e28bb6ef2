#include "critlab/experiment.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "critlab/graphgen.hpp"
#include "critlab/graphstats.hpp"
#include "critlab/limits.hpp"
#include "critlab/rng.hpp"
#include "critlab/spectral.hpp"
#include "critlab/util.hpp"

namespace critlab {

std::string experiment_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::graphon_components: return "graphon-components";
    case ExperimentKind::rank_one_vs_limit: return "rank-one-vs-limit";
    case ExperimentKind::rgiv: return "rgiv";
    case ExperimentKind::subcritical_oracles: return "subcritical-oracles";
    case ExperimentKind::blob_universality: return "blob-universality";
    case ExperimentKind::sbm_constants: return "sbm-constants";
    case ExperimentKind::spectral_constants: return "spectral-constants";
  }
  return "spectral-constants";
}

namespace {

ExperimentKind experiment_from_name(const std::string& s) {
  for (ExperimentKind k :
       {ExperimentKind::graphon_components, ExperimentKind::rank_one_vs_limit,
        ExperimentKind::rgiv, ExperimentKind::subcritical_oracles,
        ExperimentKind::blob_universality, ExperimentKind::sbm_constants,
        ExperimentKind::spectral_constants})
    if (experiment_name(k) == s) return k;
  throw std::invalid_argument("unknown experiment: " + s);
}

std::vector<double> parse_list(const std::string& val) {
  std::vector<double> out;
  std::istringstream in(val);
  std::string tok;
  while (std::getline(in, tok, ',')) out.push_back(std::stod(tok));
  if (out.empty()) throw std::invalid_argument("empty list value");
  return out;
}

void apply_kv(ExperimentConfig& cfg, const std::string& key, const std::string& val,
              std::string& kernel_block, std::string& window_block) {
  auto starts = [&](const char* p) { return key.rfind(p, 0) == 0; };
  if (key == "experiment") cfg.experiment = experiment_from_name(val);
  else if (starts("kernel.")) kernel_block += key.substr(7) + "=" + val + "\n";
  else if (starts("window.")) window_block += key.substr(7) + "=" + val + "\n";
  else if (key == "n") {
    cfg.ns.clear();
    for (double v : parse_list(val)) cfg.ns.push_back(static_cast<int>(v));
  } else if (key == "lambda") cfg.lambdas = parse_list(val);
  else if (key == "replicates") cfg.replicates = std::stoi(val);
  else if (key == "seed") cfg.master_seed = std::stoull(val);
  else if (key == "out") cfg.out_dir = val;
  else if (key == "scheme") {
    if (val == "grid") cfg.scheme = WeightScheme::grid;
    else if (val == "uniform-order-stat") cfg.scheme = WeightScheme::uniform_order_stat;
    else if (val == "cell-average") cfg.scheme = WeightScheme::cell_average;
    else throw std::invalid_argument("bad scheme: " + val);
  } else if (key == "delta0") cfg.delta0 = std::stod(val);
  else if (key == "grid") cfg.grid = std::stoi(val);
  else if (key == "pool") cfg.pool = std::stoi(val);
  else if (key == "threads") cfg.threads = static_cast<unsigned>(std::stoul(val));
  else if (starts("tol.")) cfg.tolerances[key.substr(4)] = std::stod(val);
  else if (starts("target.")) cfg.targets[key.substr(7)] = std::stod(val);
  else if (key == "sbm.k") cfg.sbm_k = std::stoi(val);
  else if (key == "sbm.kappa") cfg.sbm_kappa = parse_list(val);
  else if (key == "sbm.mu") cfg.sbm_mu = parse_list(val);
  else if (key == "sbm.a") cfg.sbm_a = parse_list(val);
  else if (key == "sbm.b") cfg.sbm_b = parse_list(val);
  else throw std::invalid_argument("unknown config key: " + key);
}

}  // namespace

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
  ExperimentConfig cfg;
  std::string kernel_block, window_block;
  std::size_t first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    auto j = nlohmann::json::parse(text);
    for (auto& [key, value] : j.items()) {
      std::string val;
      if (value.is_string()) val = value.get<std::string>();
      else if (value.is_array()) {
        std::ostringstream s;
        for (std::size_t i = 0; i < value.size(); ++i) {
          if (i) s << ",";
          s << value[i].get<double>();
        }
        val = s.str();
      } else val = value.dump();
      apply_kv(cfg, key, val, kernel_block, window_block);
    }
  } else {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
      auto hash = line.find('#');
      if (hash != std::string::npos) line.resize(hash);
      auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      std::string key = line.substr(0, eq), val = line.substr(eq + 1);
      auto strip = [](std::string& s) {
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
          s.erase(s.begin());
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
          s.pop_back();
      };
      strip(key);
      strip(val);
      if (key.empty()) continue;
      apply_kv(cfg, key, val, kernel_block, window_block);
    }
  }
  if (!kernel_block.empty()) cfg.kernel = KernelSpec::parse(kernel_block);
  if (!window_block.empty()) cfg.window = KernelSpec::parse(window_block);
  if (cfg.replicates < 1) throw std::invalid_argument("replicates must be >= 1");
  for (int n : cfg.ns)
    if (n < 2) throw std::invalid_argument("n must be >= 2");
  return cfg;
}

std::string ExperimentConfig::echo() const {
  std::ostringstream out;
  out << "experiment=" << experiment_name(experiment) << "\n";
  {
    std::istringstream k(kernel.serialize());
    std::string line;
    while (std::getline(k, line)) out << "kernel." << line << "\n";
  }
  if (window) {
    std::istringstream k(window->serialize());
    std::string line;
    while (std::getline(k, line)) out << "window." << line << "\n";
  }
  out << "n=";
  for (std::size_t i = 0; i < ns.size(); ++i) out << (i ? "," : "") << ns[i];
  out << "\nlambda=";
  for (std::size_t i = 0; i < lambdas.size(); ++i) out << (i ? "," : "") << lambdas[i];
  out << "\nreplicates=" << replicates << "\nseed=" << master_seed
      << "\nscheme=" << scheme_name(scheme) << "\ndelta0=" << delta0
      << "\ngrid=" << grid << "\npool=" << pool << "\nthreads=" << threads << "\n";
  if (!out_dir.empty()) out << "out=" << out_dir << "\n";
  for (auto& [k, v] : tolerances) out << "tol." << k << "=" << v << "\n";
  for (auto& [k, v] : targets) out << "target." << k << "=" << v << "\n";
  return out.str();
}

bool ResultTable::all_pass() const {
  for (auto& c : checks)
    if (!c.pass) return false;
  return true;
}

std::string ResultTable::to_csv() const {
  std::ostringstream out;
  for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
  out << "\n";
  char buf[32];
  for (auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.12g", row[i]);
      out << (i ? "," : "") << buf;
    }
    out << "\n";
  }
  return out.str();
}

std::string ResultTable::summary_json() const {
  nlohmann::json j;
  j["all_pass"] = all_pass();
  j["checks"] = nlohmann::json::array();
  for (auto& c : checks) {
    nlohmann::json jc;
    jc["name"] = c.name;
    jc["value"] = c.value;
    jc["threshold"] = c.threshold;
    jc["relation"] = c.relation;
    jc["pass"] = c.pass;
    j["checks"].push_back(jc);
  }
  for (auto& [k, v] : scalars) j["scalars"][k] = v;
  return j.dump(2);
}

KSResult ks_statistic(std::span<const double> a, std::span<const double> b) {
  return ks_two_sample(a, b);
}

// ---------------------------------------------------------------------------
// subcritical oracles

namespace {

// columns of (I - A)^{-1} via a cached Cholesky factor
struct ResolventSolver {
  Matrix chol;
  explicit ResolventSolver(const Matrix& a) {
    const int n = a.n;
    Matrix sys(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) sys.at(i, j) = (i == j ? 1.0 : 0.0) - a.at(i, j);
    chol = cholesky_factor(sys);
  }
  std::vector<double> solve(std::span<const double> b) const {
    return cholesky_solve_factored(chol, b);
  }
};

}  // namespace

SubcriticalOracles subcritical_oracles(const Matrix& kappa) {
  const int n = kappa.n;
  SubcriticalOracles out;
  out.spectral_radius = dominant_abs_eigenvalue(kappa);
  if (out.spectral_radius >= 1.0)
    throw std::runtime_error("subcritical_oracles: kernel is not subcritical");

  Matrix a(n);  // probability matrix A_ij = kappa_ij / n
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a.at(i, j) = kappa.at(i, j) / n;
  ResolventSolver solver(a);

  auto avg = [n](std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / n;
  };
  auto hadamard = [n](std::span<const double> x, std::span<const double> y) {
    std::vector<double> z(n);
    for (int i = 0; i < n; ++i) z[i] = x[i] * y[i];
    return z;
  };
  // y = B_r x with (B_r)_ij = A_ij^r
  auto pow_apply = [&](int r, std::span<const double> x) {
    std::vector<double> y(n, 0.0);
    for (int i = 0; i < n; ++i) {
      const double* row = a.row(i);
      double s = 0.0;
      for (int j = 0; j < n; ++j) {
        double p = row[j];
        double pr = r == 1 ? p : (r == 2 ? p * p : (r == 3 ? p * p * p : p * p * p * p));
        s += pr * x[j];
      }
      y[i] = s;
    }
    return y;
  };

  std::vector<double> one(n, 1.0);
  out.g1 = solver.solve(one);
  // progeny moments via cumulants of the independent Bernoulli children sums
  std::vector<double> k1 = pow_apply(1, out.g1);
  {
    // g2 = (I-A)^{-1} [ (A g1)^2 + 2 g1 - 1 - B2 g1^2 ]
    std::vector<double> rhs(n);
    std::vector<double> ag1sq = pow_apply(2, hadamard(out.g1, out.g1));
    for (int i = 0; i < n; ++i)
      rhs[i] = k1[i] * k1[i] + 2.0 * out.g1[i] - 1.0 - ag1sq[i];
    out.g2 = solver.solve(rhs);
  }
  // third and fourth moments from the cumulant expansion of S = sum eps_j X_j
  std::vector<double> k2(n), es2(n);
  {
    auto ag2 = pow_apply(1, out.g2);
    auto b2g1sq = pow_apply(2, hadamard(out.g1, out.g1));
    for (int i = 0; i < n; ++i) {
      k2[i] = ag2[i] - b2g1sq[i];
      es2[i] = k2[i] + k1[i] * k1[i];
    }
  }
  std::vector<double> r3(n);
  {
    auto b2 = pow_apply(2, hadamard(out.g1, out.g2));
    auto g1cube = hadamard(out.g1, hadamard(out.g1, out.g1));
    auto b3 = pow_apply(3, g1cube);
    for (int i = 0; i < n; ++i) r3[i] = -3.0 * b2[i] + 2.0 * b3[i];
  }
  {
    std::vector<double> rhs(n);
    for (int i = 0; i < n; ++i) {
      double es3_known = r3[i] + 3.0 * k2[i] * k1[i] + k1[i] * k1[i] * k1[i];
      rhs[i] = 1.0 + 3.0 * k1[i] + 3.0 * es2[i] + es3_known;
    }
    out.g3 = solver.solve(rhs);
  }
  std::vector<double> k3(n), es3(n);
  {
    auto ag3 = pow_apply(1, out.g3);
    for (int i = 0; i < n; ++i) {
      k3[i] = ag3[i] + r3[i];
      es3[i] = k3[i] + 3.0 * k2[i] * k1[i] + k1[i] * k1[i] * k1[i];
    }
  }
  {
    auto b2g1g3 = pow_apply(2, hadamard(out.g1, out.g3));
    auto b2g2sq = pow_apply(2, hadamard(out.g2, out.g2));
    auto b3g1sqg2 = pow_apply(3, hadamard(hadamard(out.g1, out.g1), out.g2));
    auto g1sq = hadamard(out.g1, out.g1);
    auto b4g1p4 = pow_apply(4, hadamard(g1sq, g1sq));
    std::vector<double> rhs(n);
    for (int i = 0; i < n; ++i) {
      double r4 = -4.0 * b2g1g3[i] - 3.0 * b2g2sq[i] + 12.0 * b3g1sqg2[i] - 6.0 * b4g1p4[i];
      double es4_known = r4 + 4.0 * k3[i] * k1[i] + 3.0 * k2[i] * k2[i] +
                         6.0 * k2[i] * k1[i] * k1[i] + std::pow(k1[i], 4);
      rhs[i] = 1.0 + 4.0 * k1[i] + 6.0 * es2[i] + 4.0 * es3[i] + es4_known;
    }
    out.g4 = solver.solve(rhs);
  }

  out.mean_g1 = avg(out.g1);
  out.mean_g2 = avg(out.g2);
  out.mean_g4 = avg(out.g4);
  {
    auto u = solver.solve(out.g1);  // (I-A)^{-2} 1
    auto z = pow_apply(1, u);       // A (I-A)^{-2} 1 = E[Z] per type
    out.mean_z = avg(z);
  }

  // connection-probability bound R_ij >= n P(i <-> j): R = n(A (I-A)^{-1})
  Matrix r(n);
  {
    std::vector<double> col(n), sol(n);
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) col[i] = a.at(i, j);
      sol = solver.solve(col);
      for (int i = 0; i < n; ++i) r.at(i, j) = n * sol[i];
    }
  }

  // eqn-72-style gap bound for s2 via the BK decomposition
  double t1 = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (j != i) t1 += (r.at(i, j) / n) * a.at(i, j) * out.g1[i];
  std::vector<double> rowsum(n, 0.0), s_vec(n, 0.0);
  for (int i = 0; i < n; ++i) {
    const double* rr = r.row(i);
    const double* ar = a.row(i);
    double rs = 0.0, sv = 0.0;
    for (int j = 0; j < n; ++j) {
      rs += rr[j];
      sv += rr[j] * ar[j];
    }
    rowsum[i] = rs;
    s_vec[i] = sv;
  }
  double sa = 0.0;
  for (int k = 0; k < n; ++k) sa += rowsum[k] * out.g1[k] * s_vec[k];
  sa /= static_cast<double>(n) * n;
  // S_b = (1/n^2) sum_ij R_ij * sum_k R_ik A_jk g1_k
  double sb = 0.0;
  {
    std::vector<double> tmp(n);
    for (int i = 0; i < n; ++i) {
      const double* ri = r.row(i);
      for (int j = 0; j < n; ++j) tmp[j] = 0.0;
      // tmp_j = sum_k R_ik A_jk g1_k  = A (g1 o R_i.) evaluated per j
      std::vector<double> gr(n);
      for (int k = 0; k < n; ++k) gr[k] = out.g1[k] * ri[k];
      for (int j = 0; j < n; ++j) {
        const double* aj = a.row(j);
        double s = 0.0;
        for (int k = 0; k < n; ++k) s += aj[k] * gr[k];
        tmp[j] = s;
      }
      for (int j = 0; j < n; ++j) sb += ri[j] * tmp[j];
    }
    sb /= static_cast<double>(n) * n;
  }
  double sc = 0.0;
  {
    std::vector<double> gr(n), w(n);
    for (int rr = 0; rr < n; ++rr) {
      const double* rv = r.row(rr);
      for (int k = 0; k < n; ++k) gr[k] = out.g1[k] * rv[k];
      for (int j = 0; j < n; ++j) {
        const double* aj = a.row(j);
        double s = 0.0;
        for (int k = 0; k < n; ++k) s += aj[k] * gr[k];
        w[j] = s;
      }
      double inner = 0.0;
      for (int j = 0; j < n; ++j) inner += rv[j] * w[j];
      sc += rowsum[rr] * inner;
    }
    sc /= static_cast<double>(n) * n * n;
  }
  out.gap_s2 = (t1 + sa + sb + sc) / n;

  // truncation-corrected bounds for s3 and the distance sum
  auto tail_x = [&](double m) {
    double p = std::min({out.mean_g1 / m, out.mean_g2 / (m * m),
                         out.mean_g4 / (m * m * m * m), 1.0});
    return p;
  };
  out.gap_s3 = std::numeric_limits<double>::infinity();
  for (double m = 2.0; m < 1e9; m *= 1.5) {
    double cand = 2.0 * m * out.gap_s2 + 2.0 * std::sqrt(out.mean_g4 * tail_x(m));
    out.gap_s3 = std::min(out.gap_s3, cand);
  }
  {
    // P(height >= m) <= (1/n) 1^t A^m 1, walked incrementally
    out.gap_d = std::numeric_limits<double>::infinity();
    std::vector<double> v(n, 1.0), av(n);
    for (int m = 1; m <= 600; ++m) {
      matvec(a, v, av);
      v.swap(av);
      double ph = std::min(avg(v), 1.0);
      double cand = m * out.gap_s2 + std::sqrt(out.mean_g4 * ph);
      out.gap_d = std::min(out.gap_d, cand);
      if (ph < 1e-18) break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// limit-side samples

std::vector<double> limit_gamma1_samples(double lambda, int replicates,
                                         std::uint64_t seed, double dt,
                                         unsigned threads) {
  std::vector<double> out(replicates, 0.0);
  parallel_for(0, replicates, [&](std::size_t r) {
    Rng stream = Rng::stream(seed, r);
    LimitSample s = sample_limit_sizes_auto(lambda, stream.next_u64(), dt);
    out[r] = s.excursions.empty() ? 0.0 : s.excursions[0].length;
  }, threads);
  return out;
}

std::vector<std::uint64_t> limit_surplus1_samples(double lambda, int replicates,
                                                  std::uint64_t seed, double dt,
                                                  unsigned threads) {
  std::vector<std::uint64_t> out(replicates, 0);
  parallel_for(0, replicates, [&](std::size_t r) {
    Rng stream = Rng::stream(seed, r);
    LimitSample s = sample_limit_sizes_auto(lambda, stream.next_u64(), dt);
    out[r] = s.excursions.empty() ? 0 : s.excursions[0].marks;
  }, threads);
  return out;
}

// ---------------------------------------------------------------------------
// experiment bodies

namespace {

void add_check(ResultTable& t, const std::string& name, double value,
               double threshold, const std::string& relation) {
  ResultTable::Check c;
  c.name = name;
  c.value = value;
  c.threshold = threshold;
  c.relation = relation;
  c.pass = relation == ">" ? value > threshold : value <= threshold;
  t.checks.push_back(c);
}

struct C1Info {
  double mass = 0.0;       // sum of weights over the largest-mass component
  std::uint64_t surplus = 0;
};

C1Info largest_component(const Graph& g, std::span<const double> x) {
  auto summary = components(g);
  C1Info info;
  int arg = -1;
  for (int c = 0; c < summary.count(); ++c) {
    double mass = 0.0;
    for (int v : summary.components[c]) mass += x.empty() ? 1.0 : x[v];
    if (mass > info.mass) {
      info.mass = mass;
      arg = c;
    }
  }
  if (arg >= 0) info.surplus = static_cast<std::uint64_t>(summary.surplus[arg]);
  return info;
}

Matrix kernel_grid_matrix(const KernelSpec& spec, int n) {
  KernelSpec s = spec;
  if (s.singular()) s.cap = std::min(s.cap, std::pow(static_cast<double>(n), 2.0 / 3.0));
  Matrix k(n);
  for (int i = 0; i < n; ++i) {
    double x = static_cast<double>(i + 1) / n;
    for (int j = i; j < n; ++j) {
      double y = static_cast<double>(j + 1) / n;
      double v = i == j ? 0.0 : eval_kernel(s, x, y);
      k.at(i, j) = v;
      k.at(j, i) = v;
    }
  }
  return k;
}

ResultTable run_spectral_constants(const ExperimentConfig& cfg) {
  ResultTable t;
  t.columns = {"n", "top_eigenvalue", "second_abs_eigenvalue", "alpha", "chi", "zeta"};
  double lambda = cfg.lambdas.front();
  for (int n : cfg.ns) {
    Matrix kw = kernel_grid_matrix(cfg.kernel, n);
    SpectralSummary s = leading_eigenpair(kw);
    Matrix h = cfg.window ? kernel_grid_matrix(*cfg.window, n) : kernel_grid_matrix(cfg.kernel, n);
    if (!cfg.window)
      for (double& v : h.a) v *= lambda;
    LimitConstants c = limit_constants(s, h);
    t.rows.push_back({static_cast<double>(n), s.top_eigenvalue, s.second_abs_eigenvalue,
                      c.alpha, c.chi, c.zeta});
    t.scalars["alpha"] = c.alpha;
    t.scalars["chi"] = c.chi;
    t.scalars["zeta"] = c.zeta;
    t.scalars["top_eigenvalue"] = s.top_eigenvalue;
    t.scalars["spectral_gap"] = s.top_eigenvalue - s.second_abs_eigenvalue;
  }
  double tol = cfg.tol("constants", 1e-2);
  for (auto& [name, target] : cfg.targets) {
    auto it = t.scalars.find(name);
    if (it == t.scalars.end()) continue;
    add_check(t, name + "_abs_err", std::fabs(it->second - target), tol, "<=");
  }
  return t;
}

ResultTable run_rank_one_vs_limit(const ExperimentConfig& cfg) {
  ResultTable t;
  t.columns = {"replicate", "lambda", "c1_rescaled", "c1_surplus"};
  const int n = cfg.ns.front();
  const int reps = cfg.replicates;
  const double scale = std::pow(static_cast<double>(n), -2.0 / 3.0);
  std::vector<double> x(n, scale);
  double pval = cfg.tol("p", 1e-3);

  for (double lambda : cfg.lambdas) {
    double q = std::pow(static_cast<double>(n), 1.0 / 3.0) + lambda;
    std::vector<double> masses(reps);
    std::vector<std::uint64_t> surpluses(reps);
    std::uint64_t base = cfg.master_seed ^ std::hash<double>{}(lambda);
    parallel_for(0, reps, [&](std::size_t r) {
      Rng stream = Rng::stream(base, r);
      Graph g = sample_rank_one_direct(x, q, stream.next_u64());
      C1Info info = largest_component(g, x);
      masses[r] = info.mass;
      surpluses[r] = info.surplus;
    }, cfg.threads);
    auto gammas = limit_gamma1_samples(lambda, reps, base + 101, 1e-4, cfg.threads);
    auto marks = limit_surplus1_samples(lambda, reps, base + 101, 1e-4, cfg.threads);
    KSResult ks = ks_two_sample(masses, gammas);
    ChiSquareResult chi = chi_square_two_sample_counts(surpluses, marks);
    std::ostringstream tag;
    tag << "lambda=" << lambda;
    add_check(t, "ks_size_" + tag.str(), ks.p, pval, ">");
    add_check(t, "chi_surplus_" + tag.str(), chi.p, pval, ">");
    t.scalars["ks_d_" + tag.str()] = ks.d;
    for (int r = 0; r < reps; ++r)
      t.rows.push_back({static_cast<double>(r), lambda, masses[r],
                        static_cast<double>(surpluses[r])});
  }
  return t;
}

ResultTable run_rgiv(const ExperimentConfig& cfg) {
  ResultTable t;
  t.columns = {"replicate", "lambda", "c1_rescaled", "c1_surplus"};
  const double n = static_cast<double>(cfg.ns.front());
  const int reps = cfg.replicates;
  const double a2 = std::pow(2.0, 1.0 / 3.0) / std::pow(3.0, 1.0 / 3.0);
  const double a3 = std::pow(3.0, 2.0 / 3.0) / std::pow(2.0, 2.0 / 3.0);
  double pval = cfg.tol("p", 1e-3);
  for (double lambda : cfg.lambdas) {
    std::vector<double> sizes(reps);
    std::vector<std::uint64_t> surpluses(reps);
    std::uint64_t base = cfg.master_seed ^ 0x51a7;
    parallel_for(0, reps, [&](std::size_t r) {
      Rng stream = Rng::stream(base, r);
      Graph g = sample_rgiv(n, lambda, stream.next_u64());
      C1Info info = largest_component(g, {});
      sizes[r] = info.mass * a2 / std::pow(n, 2.0 / 3.0);
      surpluses[r] = info.surplus;
    }, cfg.threads);
    auto gammas = limit_gamma1_samples(a3 * lambda, reps, base + 77, 1e-4, cfg.threads);
    auto marks = limit_surplus1_samples(a3 * lambda, reps, base + 77, 1e-4, cfg.threads);
    KSResult ks = ks_two_sample(sizes, gammas);
    ChiSquareResult chi = chi_square_two_sample_counts(surpluses, marks);
    std::ostringstream tag;
    tag << "lambda=" << lambda;
    add_check(t, "ks_size_" + tag.str(), ks.p, pval, ">");
    add_check(t, "chi_surplus_" + tag.str(), chi.p, pval, ">");
    for (int r = 0; r < reps; ++r)
      t.rows.push_back({static_cast<double>(r), lambda, sizes[r],
                        static_cast<double>(surpluses[r])});
  }
  return t;
}

ResultTable run_graphon_components(const ExperimentConfig& cfg) {
  ResultTable t;
  t.columns = {"replicate", "lambda", "c1_rescaled", "c1_surplus"};
  const int n = cfg.ns.front();
  const int reps = cfg.replicates;
  double pval = cfg.tol("p", 1e-3);

  Matrix kw = kernel_grid_matrix(cfg.kernel, n);
  SpectralSummary s = leading_eigenpair(kw);

  for (double lambda : cfg.lambdas) {
    KernelSpec h = cfg.window ? *cfg.window : cfg.kernel.scaled(lambda);
    Matrix hm = kernel_grid_matrix(h, n);
    LimitConstants c = limit_constants(s, hm);
    double lambda_eff = c.zeta / std::pow(c.chi, 2.0 / 3.0);
    WeightMatrix beta = build_weight_matrix(
        cfg.kernel, &h, n, cfg.scheme,
        cfg.scheme == WeightScheme::uniform_order_stat
            ? std::optional<std::uint64_t>(cfg.master_seed)
            : std::nullopt);
    const double rescale = std::pow(c.chi, 1.0 / 3.0) / std::pow(n, 2.0 / 3.0);
    std::vector<double> sizes(reps);
    std::vector<std::uint64_t> surpluses(reps);
    std::uint64_t base = cfg.master_seed ^ 0x6a1b;
    parallel_for(0, reps, [&](std::size_t r) {
      Rng stream = Rng::stream(base, r);
      Graph g = sample_graphon_graph(beta, EdgeRule::capped, stream.next_u64());
      C1Info info = largest_component(g, {});
      sizes[r] = info.mass * rescale;
      surpluses[r] = info.surplus;
    }, cfg.threads);
    auto gammas = limit_gamma1_samples(lambda_eff, reps, base + 13, 1e-4, cfg.threads);
    auto marks = limit_surplus1_samples(lambda_eff, reps, base + 13, 1e-4, cfg.threads);
    KSResult ks = ks_two_sample(sizes, gammas);
    ChiSquareResult chi = chi_square_two_sample_counts(surpluses, marks);
    std::ostringstream tag;
    tag << "lambda=" << lambda;
    add_check(t, "ks_size_" + tag.str(), ks.p, pval, ">");
    add_check(t, "chi_surplus_" + tag.str(), chi.p, pval, ">");
    t.scalars["lambda_eff_" + tag.str()] = lambda_eff;
    for (int r = 0; r < reps; ++r)
      t.rows.push_back({static_cast<double>(r), lambda, sizes[r],
                        static_cast<double>(surpluses[r])});
  }
  return t;
}

Matrix subcritical_kernel_matrix(const ExperimentConfig& cfg, int n, double lambda) {
  KernelSpec h = cfg.window ? *cfg.window : cfg.kernel.scaled(lambda);
  WeightMatrix beta = build_weight_matrix(
      cfg.kernel, &h, n, cfg.scheme,
      cfg.scheme == WeightScheme::uniform_order_stat
          ? std::optional<std::uint64_t>(cfg.master_seed)
          : std::nullopt);
  const double drop = std::pow(static_cast<double>(n), -cfg.delta0);
  Matrix kappa(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double v = std::max(beta.beta(i, j) - drop, 0.0);
      kappa.at(i, j) = v;
      kappa.at(j, i) = v;
    }
  return kappa;
}

ResultTable run_subcritical_oracles(const ExperimentConfig& cfg) {
  ResultTable t;
  t.columns = {"replicate", "s2", "s3", "mean_distance"};
  const int n = cfg.ns.front();
  const int reps = cfg.replicates;
  Matrix kappa = subcritical_kernel_matrix(cfg, n, cfg.lambdas.front());
  SubcriticalOracles oracle = subcritical_oracles(kappa);

  WeightMatrix kw(n, WeightScheme::explicit_);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) kw.set_beta(i, j, kappa.at(i, j));

  std::vector<double> s2(reps), s3(reps), dsum(reps);
  std::uint64_t base = cfg.master_seed ^ 0x5ca1e;
  parallel_for(0, reps, [&](std::size_t r) {
    Rng stream = Rng::stream(base, r);
    Graph g = sample_graphon_graph(kw, EdgeRule::capped, stream.next_u64());
    auto summary = components(g);
    std::array<int, 2> ks{2, 3};
    auto s = susceptibilities(summary, n, ks);
    s2[r] = s[0];
    s3[r] = s[1];
    dsum[r] = distance_stats(g).mean_distance;
  }, cfg.threads);

  auto band = [&](const std::string& name, std::span<const double> sample, double oracle_mean,
                  double gap) {
    MeanSE m = mean_se(sample);
    add_check(t, name + "_upper", m.mean, oracle_mean + 4.0 * m.se, "<=");
    add_check(t, name + "_lower", oracle_mean - gap - 4.0 * m.se, m.mean, "<=");
    t.scalars[name + "_mc"] = m.mean;
    t.scalars[name + "_se"] = m.se;
    t.scalars[name + "_oracle"] = oracle_mean;
    t.scalars[name + "_gap_bound"] = gap;
  };
  band("s2", s2, oracle.mean_g1, oracle.gap_s2);
  band("s3", s3, oracle.mean_g2, oracle.gap_s3);
  band("distance", dsum, oracle.mean_z, oracle.gap_d);
  t.scalars["spectral_radius"] = oracle.spectral_radius;
  for (int r = 0; r < reps; ++r)
    t.rows.push_back({static_cast<double>(r), s2[r], s3[r], dsum[r]});
  return t;
}

ResultTable run_blob_universality(const ExperimentConfig& cfg) {
  ResultTable t;
  t.columns = {"replicate", "glued_mass_c1"};
  const int n = cfg.ns.front();
  const int reps = cfg.replicates;
  const double lambda = cfg.lambdas.front();
  double pval = cfg.tol("p", 1e-3);

  Matrix kw = kernel_grid_matrix(cfg.kernel, n);
  SpectralSummary s = leading_eigenpair(kw);
  KernelSpec h = cfg.window ? *cfg.window : cfg.kernel.scaled(lambda);
  Matrix hm = kernel_grid_matrix(h, n);
  LimitConstants c = limit_constants(s, hm);
  double lambda_eff = c.zeta / std::pow(c.chi, 2.0 / 3.0);

  Matrix kappa = subcritical_kernel_matrix(cfg, n, lambda);
  WeightMatrix kwm(n, WeightScheme::explicit_);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) kwm.set_beta(i, j, kappa.at(i, j));

  const double chi13 = std::pow(c.chi, 1.0 / 3.0);
  const double q = std::pow(c.chi, -2.0 / 3.0) *
                   std::pow(static_cast<double>(n), 1.0 / 3.0 - cfg.delta0);
  const double vert_scale = chi13 / std::pow(static_cast<double>(n), 2.0 / 3.0);

  std::vector<double> masses(reps);
  std::uint64_t base = cfg.master_seed ^ 0xb10b;
  parallel_for(0, reps, [&](std::size_t r) {
    Rng stream = Rng::stream(base, r);
    Graph blobs_graph = sample_graphon_graph(kwm, EdgeRule::exponential, stream.next_u64());
    auto summary = components(blobs_graph);
    const int m = summary.count();
    std::vector<double> x(m);
    for (int k = 0; k < m; ++k) x[k] = vert_scale * summary.sizes[k];
    Graph super = sample_rank_one_direct(x, q, stream.next_u64());
    C1Info info = largest_component(super, x);
    masses[r] = info.mass;
  }, cfg.threads);

  auto gammas = limit_gamma1_samples(lambda_eff, reps, base + 5, 1e-4, cfg.threads);
  KSResult ks = ks_two_sample(masses, gammas);
  add_check(t, "ks_glued_mass", ks.p, pval, ">");
  t.scalars["lambda_eff"] = lambda_eff;
  t.scalars["chi"] = c.chi;
  t.scalars["zeta"] = c.zeta;
  for (int r = 0; r < reps; ++r)
    t.rows.push_back({static_cast<double>(r), masses[r]});
  return t;
}

ResultTable run_sbm_constants(const ExperimentConfig& cfg) {
  if (cfg.sbm_k < 1) throw std::invalid_argument("sbm-constants: sbm.k missing");
  const int k = cfg.sbm_k;
  auto need = static_cast<std::size_t>(k) * k;
  if (cfg.sbm_kappa.size() != need || cfg.sbm_a.size() != need ||
      cfg.sbm_mu.size() != static_cast<std::size_t>(k) ||
      cfg.sbm_b.size() != static_cast<std::size_t>(k))
    throw std::invalid_argument("sbm-constants: matrix sizes do not match sbm.k");
  SBMInput input;
  input.k = k;
  input.kappa = Matrix(k);
  input.a = Matrix(k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) {
      input.kappa.at(i, j) = cfg.sbm_kappa[static_cast<std::size_t>(i) * k + j];
      input.a.at(i, j) = cfg.sbm_a[static_cast<std::size_t>(i) * k + j];
    }
  input.mu = cfg.sbm_mu;
  input.b = cfg.sbm_b;
  LimitConstants c = sbm_constants(input);
  ResultTable t;
  t.columns = {"alpha", "chi", "zeta"};
  t.rows.push_back({c.alpha, c.chi, c.zeta});
  t.scalars["alpha"] = c.alpha;
  t.scalars["chi"] = c.chi;
  t.scalars["zeta"] = c.zeta;
  double tol = cfg.tol("constants", 1e-8);
  for (auto& [name, target] : cfg.targets) {
    auto it = t.scalars.find(name);
    if (it == t.scalars.end()) continue;
    add_check(t, name + "_abs_err", std::fabs(it->second - target), tol, "<=");
  }
  return t;
}

}  // namespace

ResultTable run_experiment(const ExperimentConfig& cfg) {
  ResultTable t;
  switch (cfg.experiment) {
    case ExperimentKind::spectral_constants: t = run_spectral_constants(cfg); break;
    case ExperimentKind::rank_one_vs_limit: t = run_rank_one_vs_limit(cfg); break;
    case ExperimentKind::rgiv: t = run_rgiv(cfg); break;
    case ExperimentKind::graphon_components: t = run_graphon_components(cfg); break;
    case ExperimentKind::subcritical_oracles: t = run_subcritical_oracles(cfg); break;
    case ExperimentKind::blob_universality: t = run_blob_universality(cfg); break;
    case ExperimentKind::sbm_constants: t = run_sbm_constants(cfg); break;
  }
  if (!cfg.out_dir.empty()) {
    namespace fs = std::filesystem;
    fs::create_directories(cfg.out_dir);
    std::ofstream(fs::path(cfg.out_dir) / "replicates.csv") << t.to_csv();
    std::ofstream(fs::path(cfg.out_dir) / "summary.json") << t.summary_json();
    std::ofstream(fs::path(cfg.out_dir) / "config.txt") << cfg.echo();
  }
  return t;
}

}  // namespace critlab
