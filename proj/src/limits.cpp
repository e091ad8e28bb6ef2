#include "critlab/limits.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "critlab/rng.hpp"

namespace critlab {

std::string LimitSample::to_csv() const {
  std::ostringstream out;
  out << "rank,length,area,marks\n";
  char buf[96];
  for (std::size_t i = 0; i < excursions.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%.12g,%.12g,%llu\n", i + 1, excursions[i].length,
                  excursions[i].area,
                  static_cast<unsigned long long>(excursions[i].marks));
    out << buf;
  }
  return out.str();
}

LimitSample sample_limit_sizes(double lambda, double horizon, double dt,
                               std::uint64_t seed, LimitSizeOptions opts) {
  if (dt <= 0.0 || horizon <= 0.0)
    throw std::invalid_argument("sample_limit_sizes: need positive horizon and dt");
  if (dt > 1e-3 * std::max(1.0, horizon))
    throw std::invalid_argument("sample_limit_sizes: dt too coarse for the horizon");
  Rng rng(seed);
  const std::size_t steps = static_cast<std::size_t>(std::llround(horizon / dt));

  LimitSample out;
  out.lambda = lambda;
  out.horizon = horizon;
  out.dt = dt;

  double w = 0.0, running_min = 0.0;
  double sqrt_dt = std::sqrt(dt) * opts.noise_scale;
  double bridge_var = dt * opts.noise_scale * opts.noise_scale;

  bool open = false;
  std::size_t open_start = 0;  // index of the zero preceding the excursion
  double open_sum = 0.0;       // sum of reflected values inside

  auto close_excursion = [&](std::size_t end_idx) {
    double length = static_cast<double>(end_idx - open_start) * dt;
    if (length >= opts.min_length_dts * dt) {
      LimitSample::Excursion e;
      e.start = static_cast<double>(open_start) * dt;
      e.length = length;
      e.area = open_sum * dt;
      out.excursions.push_back(e);
    }
    open = false;
    open_sum = 0.0;
  };

  for (std::size_t k = 1; k <= steps; ++k) {
    double t_prev = static_cast<double>(k - 1) * dt;
    double w_prev = w;
    w += sqrt_dt * rng.normal() + lambda * dt - (t_prev + dt / 2.0) * dt;
    // exact Brownian-bridge minimum over the step; without it, sub-grid dips
    // below the running minimum are missed and long excursions get split or
    // merged at a sqrt(dt) rate
    double interval_min = std::min(w_prev, w);
    if (bridge_var > 0.0) {
      double u = rng.uniform_pos();
      double diff = w_prev - w;
      interval_min =
          0.5 * (w_prev + w - std::sqrt(diff * diff - 2.0 * bridge_var * std::log(u)));
    }
    if (interval_min < running_min) {
      // the path touched a fresh minimum inside this step: the open excursion
      // ends here and a new one starts in the same interval
      if (open) close_excursion(k);
      running_min = interval_min;
      open = true;
      open_start = k - 1;
      open_sum = 0.0;
    }
    double reflected = w - running_min;
    if (reflected > 0.0) {
      if (!open) {
        open = true;
        open_start = k - 1;
        open_sum = 0.0;
      }
      open_sum += reflected;
    } else if (open) {
      close_excursion(k);
    }
  }
  // sub-resolution leftovers at the horizon are not real truncations
  if (open && static_cast<double>(steps - open_start) >= opts.min_length_dts) {
    close_excursion(steps);
    out.truncated = true;
  }

  std::sort(out.excursions.begin(), out.excursions.end(),
            [](const auto& a, const auto& b) { return a.length > b.length; });
  for (auto& e : out.excursions) e.marks = rng.poisson(e.area);
  return out;
}

LimitSample sample_limit_sizes_auto(double lambda, std::uint64_t seed, double dt) {
  double horizon = 4.0 * std::fabs(lambda) + 12.0;
  for (int attempt = 0; attempt < 8; ++attempt) {
    LimitSample s = sample_limit_sizes(lambda, horizon, dt, seed + attempt);
    if (!s.truncated) return s;
    horizon *= 2.0;
  }
  throw std::runtime_error("sample_limit_sizes_auto: path did not close; horizon too small");
}

double ExcursionPath::area() const {
  double s = 0.0;
  for (std::size_t k = 1; k + 1 < values.size(); ++k) s += values[k];
  return s * dt;  // endpoints are zero, so trapezoid = plain sum
}

TiltedExcursion sample_tilted_excursion(double length, double theta, int grid,
                                        int pool, std::uint64_t seed) {
  if (length <= 0.0) throw std::invalid_argument("sample_tilted_excursion: bad length");
  if (theta < 0.0) throw std::invalid_argument("sample_tilted_excursion: theta must be >= 0");
  if (grid < 100) throw std::invalid_argument("sample_tilted_excursion: grid must be >= 100");
  if (pool < 1) throw std::invalid_argument("sample_tilted_excursion: pool must be >= 1");
  Rng rng(seed);
  const double dt = length / grid;
  const double sqrt_dt = std::sqrt(dt);

  std::vector<std::vector<double>> paths(pool);
  std::vector<double> logw(pool);
  std::vector<double> walk(grid + 1), bridge(grid + 1);
  for (int c = 0; c < pool; ++c) {
    walk[0] = 0.0;
    for (int k = 1; k <= grid; ++k) walk[k] = walk[k - 1] + sqrt_dt * rng.normal();
    double endv = walk[grid];
    int argmin = 0;
    for (int k = 0; k <= grid; ++k) {
      bridge[k] = walk[k] - endv * static_cast<double>(k) / grid;
      if (bridge[k] < bridge[argmin]) argmin = k;  // leftmost minimum
    }
    auto& exc = paths[c];
    exc.resize(grid + 1);
    double low = bridge[argmin];
    for (int k = 0; k <= grid; ++k) exc[k] = bridge[(argmin + k) % grid] - low;
    exc[grid] = 0.0;
    double area = 0.0;
    for (int k = 1; k < grid; ++k) area += exc[k];
    logw[c] = theta * area * dt;
  }
  double lmax = *std::max_element(logw.begin(), logw.end());
  std::vector<double> w(pool);
  double total = 0.0, total_sq = 0.0;
  for (int c = 0; c < pool; ++c) {
    w[c] = std::exp(logw[c] - lmax);
    total += w[c];
    total_sq += w[c] * w[c];
  }
  std::size_t pick = rng.categorical(w, total);

  TiltedExcursion out;
  out.path.length = length;
  out.path.dt = dt;
  out.path.values = std::move(paths[pick]);
  out.path.tilt_theta = theta;
  out.ess = total * total / total_sq;
  return out;
}

namespace {

// sparse-table range minimum over the grid values
struct RangeMin {
  std::vector<std::vector<double>> table;
  explicit RangeMin(const std::vector<double>& v) {
    int n = static_cast<int>(v.size());
    int levels = 1;
    while ((1 << levels) <= n) ++levels;
    table.assign(levels, std::vector<double>(n));
    table[0] = v;
    for (int l = 1; l < levels; ++l)
      for (int i = 0; i + (1 << l) <= n; ++i)
        table[l][i] = std::min(table[l - 1][i], table[l - 1][i + (1 << (l - 1))]);
  }
  double query(int lo, int hi) const {  // inclusive, lo <= hi
    int span = hi - lo + 1;
    int l = 0;
    while ((2 << l) <= span) ++l;
    return std::min(table[l][lo], table[l][hi - (1 << l) + 1]);
  }
};

}  // namespace

MetricMeasureSpace build_limit_space(const ExcursionPath& h, const ExcursionPath& g,
                                     std::uint64_t seed, int* links_out) {
  if (h.values.size() != g.values.size() || h.values.size() < 2)
    throw std::invalid_argument("build_limit_space: h and g must share the grid");
  const int grid = static_cast<int>(h.values.size()) - 1;
  Rng rng(seed);

  RangeMin rmin(h.values);
  auto tree_d = [&](int s, int t) {
    if (s > t) std::swap(s, t);
    return h.values[s] + h.values[t] - 2.0 * rmin.query(s, t);
  };

  // Poisson identifications under g
  double garea = g.area();
  int nlinks = static_cast<int>(rng.poisson(garea));
  std::vector<double> gw(grid);
  double gtotal = 0.0;
  for (int k = 0; k < grid; ++k) {
    gw[k] = g.values[k];
    gtotal += gw[k];
  }
  std::vector<std::pair<int, int>> links;
  for (int i = 0; i < nlinks && gtotal > 0.0; ++i) {
    int xk = static_cast<int>(rng.categorical(gw, gtotal));
    double y = rng.uniform() * g.values[xk];
    int rk = xk;
    while (rk < grid && g.values[rk] > y) ++rk;
    if (rk > grid - 1) rk = grid - 1;
    links.emplace_back(xk, rk);
  }
  if (links_out) *links_out = static_cast<int>(links.size());

  // endpoint metric closed under the zero-length links
  const int le = 2 * static_cast<int>(links.size());
  std::vector<int> ep(le);
  for (std::size_t i = 0; i < links.size(); ++i) {
    ep[2 * i] = links[i].first;
    ep[2 * i + 1] = links[i].second;
  }
  std::vector<double> closure(static_cast<std::size_t>(le) * le, 0.0);
  if (le > 0) {
    for (int a = 0; a < le; ++a)
      for (int b = 0; b < le; ++b)
        closure[static_cast<std::size_t>(a) * le + b] = tree_d(ep[a], ep[b]);
    for (std::size_t i = 0; i < links.size(); ++i) {
      closure[(2 * i) * le + (2 * i + 1)] = 0.0;
      closure[(2 * i + 1) * le + (2 * i)] = 0.0;
    }
    for (int k = 0; k < le; ++k)
      for (int a = 0; a < le; ++a)
        for (int b = 0; b < le; ++b) {
          double via = closure[static_cast<std::size_t>(a) * le + k] +
                       closure[static_cast<std::size_t>(k) * le + b];
          auto& cell = closure[static_cast<std::size_t>(a) * le + b];
          if (via < cell) cell = via;
        }
  }

  MetricMeasureSpace space(grid);
  const double cell_mass = h.length / grid;
  std::vector<double> to_ep(le);
  for (int s = 0; s < grid; ++s) {
    space.mass[s] = cell_mass;
    for (int a = 0; a < le; ++a) to_ep[a] = tree_d(s, ep[a]);
    for (int t = s + 1; t < grid; ++t) {
      double best = tree_d(s, t);
      for (int a = 0; a < le; ++a) {
        if (to_ep[a] >= best) continue;
        const double* row = closure.data() + static_cast<std::size_t>(a) * le;
        for (int b = 0; b < le; ++b) {
          double cand = to_ep[a] + row[b] + tree_d(ep[b], t);
          if (cand < best) best = cand;
        }
      }
      space.d(s, t) = best;
      space.d(t, s) = best;
    }
  }
  return space;
}

MetricMeasureSpace sample_crit_space(double gamma, int grid, int pool,
                                     std::uint64_t seed, int* surplus_out,
                                     double* ess_out) {
  TiltedExcursion tilted = sample_tilted_excursion(gamma, 1.0, grid, pool, seed);
  if (ess_out) *ess_out = tilted.ess;
  ExcursionPath doubled = tilted.path;
  for (double& v : doubled.values) v *= 2.0;
  Rng rng = Rng::stream(seed, 0x9bf1);
  return build_limit_space(doubled, tilted.path, rng.next_u64(), surplus_out);
}

}  // namespace critlab
