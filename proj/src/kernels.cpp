#include "critlab/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>

#include "critlab/rng.hpp"
#include "critlab/spectral.hpp"

namespace critlab {

namespace {

const char* family_name(KernelFamily f) {
  switch (f) {
    case KernelFamily::constant: return "constant";
    case KernelFamily::min_xy: return "min";
    case KernelFamily::max_xy: return "max";
    case KernelFamily::sum_pow: return "sum-pow";
    case KernelFamily::max_pow_neg: return "max-pow-neg";
    case KernelFamily::absdiff_pow_neg: return "absdiff-pow-neg";
    case KernelFamily::eta_plus_max_pow: return "eta-plus-max-pow";
    case KernelFamily::tabulated: return "tabulated";
  }
  return "constant";
}

KernelFamily family_from_name(const std::string& s) {
  if (s == "constant") return KernelFamily::constant;
  if (s == "min") return KernelFamily::min_xy;
  if (s == "max") return KernelFamily::max_xy;
  if (s == "sum-pow") return KernelFamily::sum_pow;
  if (s == "max-pow-neg") return KernelFamily::max_pow_neg;
  if (s == "absdiff-pow-neg") return KernelFamily::absdiff_pow_neg;
  if (s == "eta-plus-max-pow") return KernelFamily::eta_plus_max_pow;
  if (s == "tabulated") return KernelFamily::tabulated;
  throw std::invalid_argument("unknown kernel family: " + s);
}

void validate(const KernelSpec& spec) {
  switch (spec.family) {
    case KernelFamily::sum_pow:
      if (spec.a <= -2.0 / 3.0)
        throw std::invalid_argument("sum-pow: exponent must exceed -2/3");
      break;
    case KernelFamily::max_pow_neg:
      if (!(spec.a > 0.0 && spec.a < 2.0 / 3.0))
        throw std::invalid_argument("max-pow-neg: a must be in (0, 2/3)");
      break;
    case KernelFamily::absdiff_pow_neg:
      if (!(spec.a > 0.0 && spec.a < 1.0 / 3.0))
        throw std::invalid_argument("absdiff-pow-neg: a must be in (0, 1/3)");
      break;
    case KernelFamily::eta_plus_max_pow:
      if (spec.eta < 0.0 || spec.a <= 0.0)
        throw std::invalid_argument("eta-plus-max-pow: need eta >= 0, a > 0");
      break;
    case KernelFamily::tabulated: {
      int g = spec.table_n;
      if (g < 2 || spec.table.size() != static_cast<std::size_t>(g) * g)
        throw std::invalid_argument("tabulated: bad grid");
      for (int i = 0; i < g; ++i)
        for (int j = 0; j < g; ++j) {
          double v = spec.table[static_cast<std::size_t>(i) * g + j];
          if (v < 0.0 || !std::isfinite(v))
            throw std::invalid_argument("tabulated: entries must be finite and >= 0");
          if (std::fabs(v - spec.table[static_cast<std::size_t>(j) * g + i]) > 1e-12)
            throw std::invalid_argument("tabulated: grid must be symmetric");
        }
      break;
    }
    default:
      break;
  }
}

double eval_raw(const KernelSpec& spec, double x, double y) {
  switch (spec.family) {
    case KernelFamily::constant:
      return 1.0;
    case KernelFamily::min_xy:
      return std::min(x, y);
    case KernelFamily::max_xy:
      return std::max(x, y);
    case KernelFamily::sum_pow:
      return std::pow(x + y, spec.a);
    case KernelFamily::max_pow_neg:
      return std::pow(std::max(x, y), -spec.a);
    case KernelFamily::absdiff_pow_neg:
      return std::pow(std::fabs(x - y), -spec.a);
    case KernelFamily::eta_plus_max_pow:
      return spec.eta + std::pow(std::max(x, y), spec.a);
    case KernelFamily::tabulated: {
      int g = spec.table_n;
      double fx = x * (g - 1), fy = y * (g - 1);
      int ix = std::min(static_cast<int>(fx), g - 2);
      int iy = std::min(static_cast<int>(fy), g - 2);
      double tx = fx - ix, ty = fy - iy;
      auto at = [&](int i, int j) { return spec.table[static_cast<std::size_t>(i) * g + j]; };
      return (1 - tx) * (1 - ty) * at(ix, iy) + tx * (1 - ty) * at(ix + 1, iy) +
             (1 - tx) * ty * at(ix, iy + 1) + tx * ty * at(ix + 1, iy + 1);
    }
  }
  return 0.0;
}

}  // namespace

std::string KernelSpec::serialize() const {
  std::ostringstream out;
  out << "family=" << family_name(family) << "\n";
  out << "a=" << a << "\n";
  out << "eta=" << eta << "\n";
  out << "c=" << c << "\n";
  if (std::isfinite(cap)) out << "cap=" << cap << "\n";
  if (family == KernelFamily::tabulated) {
    out << "table_n=" << table_n << "\n";
    out << "table=";
    for (std::size_t i = 0; i < table.size(); ++i) {
      if (i) out << ",";
      out << table[i];
    }
    out << "\n";
  }
  return out.str();
}

KernelSpec KernelSpec::parse(const std::string& text) {
  KernelSpec spec;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    std::string key = line.substr(0, eq);
    std::string val = line.substr(eq + 1);
    auto strip = [](std::string& s) {
      while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.erase(s.begin());
      while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.pop_back();
    };
    strip(key);
    strip(val);
    if (key == "family") spec.family = family_from_name(val);
    else if (key == "a") spec.a = std::stod(val);
    else if (key == "eta") spec.eta = std::stod(val);
    else if (key == "c") spec.c = std::stod(val);
    else if (key == "cap") spec.cap = std::stod(val);
    else if (key == "table_n") spec.table_n = std::stoi(val);
    else if (key == "table") {
      spec.table.clear();
      std::istringstream cells(val);
      std::string cell;
      while (std::getline(cells, cell, ',')) spec.table.push_back(std::stod(cell));
    }
  }
  validate(spec);
  return spec;
}

double eval_kernel(const KernelSpec& spec, double x, double y) {
  if (std::isnan(x) || std::isnan(y))
    throw std::invalid_argument("eval_kernel: NaN input");
  if (x < 0.0 || x > 1.0 || y < 0.0 || y > 1.0)
    throw std::invalid_argument("eval_kernel: inputs must lie in [0,1]");
  validate(spec);
  double v = eval_raw(spec, x, y);
  if (!std::isfinite(v) || v > spec.cap) v = spec.cap;
  return spec.c * v;
}

double WeightMatrix::max_beta() const {
  double m = 0.0;
  for (double v : tri) m = std::max(m, v);
  return m;
}

Matrix WeightMatrix::dense() const {
  Matrix m(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double v = tri[index(i, j)];
      m.at(i, j) = v;
      m.at(j, i) = v;
    }
  return m;
}

std::string WeightMatrix::to_csv() const {
  std::ostringstream out;
  out << "# n=" << n << " scheme=" << scheme_name(scheme) << " seed="
      << (seed ? std::to_string(*seed) : std::string("none")) << "\n";
  out << "i,j,beta\n";
  char buf[64];
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      std::snprintf(buf, sizeof buf, "%d,%d,%.17g\n", i + 1, j + 1, beta(i, j));
      out << buf;
    }
  return out.str();
}

WeightMatrix WeightMatrix::from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("# n=", 0) != 0)
    throw std::invalid_argument("weight csv: missing header");
  int n = 0;
  {
    std::istringstream hdr(line.substr(2));
    std::string tok;
    while (hdr >> tok) {
      if (tok.rfind("n=", 0) == 0) n = std::stoi(tok.substr(2));
    }
  }
  if (n < 2) throw std::invalid_argument("weight csv: bad n");
  WeightMatrix w(n);
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line[0] == 'i') continue;
    int i, j;
    double v;
    if (std::sscanf(line.c_str(), "%d,%d,%lf", &i, &j, &v) == 3)
      w.set_beta(i - 1, j - 1, v);
  }
  return w;
}

std::string scheme_name(WeightScheme s) {
  switch (s) {
    case WeightScheme::grid: return "grid";
    case WeightScheme::uniform_order_stat: return "uniform-order-stat";
    case WeightScheme::cell_average: return "cell-average";
    case WeightScheme::rgiv: return "rgiv";
    case WeightScheme::sbm: return "sbm";
    case WeightScheme::explicit_: return "explicit";
  }
  return "explicit";
}

namespace {

// 8-point Gauss-Legendre on [-1,1]
constexpr double kGlNodes[8] = {-0.9602898564975363, -0.7966664774136267,
                                -0.5255324099163290, -0.1834346424956498,
                                0.1834346424956498,  0.5255324099163290,
                                0.7966664774136267,  0.9602898564975363};
constexpr double kGlWeights[8] = {0.1012285362903763, 0.2223810344533745,
                                  0.3137066458778873, 0.3626837833783620,
                                  0.3626837833783620, 0.3137066458778873,
                                  0.2223810344533745, 0.1012285362903763};

double cell_average(const KernelSpec& spec, double x0, double x1, double y0, double y1) {
  if (!spec.singular()) {
    double hx = (x1 - x0) / 2.0, cx = (x0 + x1) / 2.0;
    double hy = (y1 - y0) / 2.0, cy = (y0 + y1) / 2.0;
    double sum = 0.0;
    for (int p = 0; p < 8; ++p)
      for (int q = 0; q < 8; ++q)
        sum += kGlWeights[p] * kGlWeights[q] *
               eval_kernel(spec, cx + hx * kGlNodes[p], cy + hy * kGlNodes[q]);
    return sum / 4.0;
  }
  // midpoint sampling is gentler around integrable singularities
  const int g = 32;
  double sum = 0.0;
  for (int p = 0; p < g; ++p)
    for (int q = 0; q < g; ++q)
      sum += eval_kernel(spec, x0 + (x1 - x0) * (p + 0.5) / g,
                         y0 + (y1 - y0) * (q + 0.5) / g);
  return sum / (g * g);
}

}  // namespace

WeightMatrix build_weight_matrix(const KernelSpec& spec_w, const KernelSpec* spec_h,
                                 int n, WeightScheme scheme,
                                 std::optional<std::uint64_t> seed) {
  if (n < 2) throw std::invalid_argument("build_weight_matrix: n must be >= 2");
  if (spec_w.c < 0.0)
    throw std::invalid_argument("build_weight_matrix: base kernel must be nonnegative");
  if (scheme != WeightScheme::grid && scheme != WeightScheme::uniform_order_stat &&
      scheme != WeightScheme::cell_average)
    throw std::invalid_argument("build_weight_matrix: unsupported scheme");
  if (scheme == WeightScheme::uniform_order_stat && !seed)
    throw std::invalid_argument("build_weight_matrix: uniform-order-stat needs a seed");

  const double shift = std::pow(static_cast<double>(n), -1.0 / 3.0);
  const double cap = std::pow(static_cast<double>(n), 2.0 / 3.0);
  KernelSpec w = spec_w;
  KernelSpec h;
  if (spec_h) h = *spec_h;
  if (w.singular()) w.cap = std::min(w.cap, cap);
  if (spec_h && h.singular()) h.cap = std::min(h.cap, cap);

  WeightMatrix out(n, scheme);
  out.seed = seed;

  std::vector<double> coord(n);
  if (scheme == WeightScheme::uniform_order_stat) {
    Rng rng(*seed);
    for (int i = 0; i < n; ++i) coord[i] = rng.uniform();
    std::sort(coord.begin(), coord.end());
  } else {
    for (int i = 0; i < n; ++i) coord[i] = static_cast<double>(i + 1) / n;
  }

  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      double v;
      if (scheme == WeightScheme::cell_average) {
        double x0 = static_cast<double>(i) / n, x1 = static_cast<double>(i + 1) / n;
        double y0 = static_cast<double>(j) / n, y1 = static_cast<double>(j + 1) / n;
        v = cell_average(w, x0, x1, y0, y1);
        if (spec_h) v += shift * cell_average(h, x0, x1, y0, y1);
      } else {
        v = eval_kernel(w, coord[i], coord[j]);
        if (spec_h) v += shift * eval_kernel(h, coord[i], coord[j]);
      }
      out.set_beta(i, j, std::max(v, 0.0));
    }
  }
  return out;
}

ConditionReport condition_diagnostics(const WeightMatrix& weights,
                                      const KernelSpec& spec_w,
                                      const KernelSpec* spec_h, double delta0,
                                      std::span<const int> exceptional) {
  if (!(delta0 > 0.0 && delta0 < 1.0 / 3.0))
    throw std::invalid_argument("condition_diagnostics: need 0 < delta0 < 1/3");
  const int n = weights.n;
  ConditionReport rep;
  rep.delta0 = delta0;

  double l3 = 0.0;
  double theta = 0.0;
  for (int i = 0; i < n; ++i) {
    double row = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      double b = weights.beta(i, j);
      if (j > i) l3 += 2.0 * b * b * b;
      row += b * std::sqrt(b);
    }
    theta = std::max(theta, row / n);
  }
  rep.l3_norm = l3 / (static_cast<double>(n) * n);
  rep.theta_stat = theta;

  std::vector<char> in_b(n, 0);
  for (int v : exceptional) {
    if (v < 0 || v >= n) throw std::invalid_argument("condition_diagnostics: bad B entry");
    in_b[v] = 1;
  }

  const double threshold = std::pow(static_cast<double>(n), -delta0);
  std::uint64_t small = 0;
  double bmass = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      double b = weights.beta(i, j);
      if (!in_b[i] && !in_b[j] && b <= threshold) ++small;
      if (in_b[i]) bmass += b * b;
    }
  }
  rep.small_pair_count = small;
  rep.b_mass = bmass;

  const double lift = std::pow(static_cast<double>(n), 1.0 / 3.0);
  KernelSpec w = spec_w;
  const double cap = std::pow(static_cast<double>(n), 2.0 / 3.0);
  if (w.singular()) w.cap = std::min(w.cap, cap);
  Matrix dev(n);
  for (int i = 0; i < n; ++i) {
    double x = static_cast<double>(i + 1) / n;
    for (int j = i; j < n; ++j) {
      double y = static_cast<double>(j + 1) / n;
      double hval = spec_h ? eval_kernel(*spec_h, x, y) : 0.0;
      double value = hval - lift * (weights.beta(i, j) - eval_kernel(w, x, y));
      dev.at(i, j) = value;
      dev.at(j, i) = value;
    }
  }
  rep.norm_deviation = dominant_abs_eigenvalue(dev);
  return rep;
}

}  // namespace critlab
