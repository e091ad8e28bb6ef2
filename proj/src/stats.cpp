#include "critlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace critlab {

MeanSE mean_se(std::span<const double> xs) {
  MeanSE r;
  r.n = xs.size();
  if (r.n == 0) return r;
  double s = 0.0;
  for (double x : xs) s += x;
  r.mean = s / static_cast<double>(r.n);
  if (r.n > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - r.mean) * (x - r.mean);
    r.sd = std::sqrt(ss / static_cast<double>(r.n - 1));
    r.se = r.sd / std::sqrt(static_cast<double>(r.n));
  }
  return r;
}

double kolmogorov_tail(double x) {
  if (x <= 0.0) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    double term = std::exp(-2.0 * k * k * x * x);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-16) break;
  }
  double p = 2.0 * sum;
  return std::clamp(p, 0.0, 1.0);
}

KSResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("ks_two_sample: empty sample");
  std::vector<double> sa(a.begin(), a.end()), sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  double na = static_cast<double>(sa.size()), nb = static_cast<double>(sb.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < sa.size() && j < sb.size()) {
    double v = std::min(sa[i], sb[j]);
    while (i < sa.size() && sa[i] <= v) ++i;
    while (j < sb.size() && sb[j] <= v) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / na -
                              static_cast<double>(j) / nb));
  }
  KSResult r;
  r.d = d;
  double en = std::sqrt(na * nb / (na + nb));
  r.p = kolmogorov_tail((en + 0.12 + 0.11 / en) * d);
  return r;
}

namespace {

double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int n = 0; n < 500; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * 1e-15) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 500; ++i) {
    double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-15) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double gamma_q(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_q: bad args");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_cf(a, x);
}

double chi_square_tail(double x, double df) {
  if (x <= 0.0) return 1.0;
  return gamma_q(df / 2.0, x / 2.0);
}

ChiSquareResult chi_square_gof(std::span<const double> observed,
                               std::span<const double> expected,
                               double min_expected) {
  if (observed.size() != expected.size() || observed.empty())
    throw std::invalid_argument("chi_square_gof: size mismatch");
  // pool low-expectation cells left to right
  std::vector<double> obs, exp;
  double po = 0.0, pe = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    po += observed[i];
    pe += expected[i];
    if (pe >= min_expected) {
      obs.push_back(po);
      exp.push_back(pe);
      po = pe = 0.0;
    }
  }
  if (pe > 0.0 || po > 0.0) {
    if (!exp.empty()) {
      obs.back() += po;
      exp.back() += pe;
    } else {
      obs.push_back(po);
      exp.push_back(pe);
    }
  }
  ChiSquareResult r;
  if (exp.size() < 2) {
    r.df = 0;
    r.p = 1.0;
    return r;
  }
  for (std::size_t i = 0; i < exp.size(); ++i) {
    double diff = obs[i] - exp[i];
    r.stat += diff * diff / exp[i];
  }
  r.df = static_cast<double>(exp.size() - 1);
  r.p = chi_square_tail(r.stat, r.df);
  return r;
}

ChiSquareResult chi_square_two_sample_counts(std::span<const std::uint64_t> a,
                                             std::span<const std::uint64_t> b,
                                             double min_expected) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("chi_square_two_sample_counts: empty sample");
  std::map<std::uint64_t, std::pair<double, double>> cells;
  for (auto v : a) cells[v].first += 1.0;
  for (auto v : b) cells[v].second += 1.0;
  double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  // pool adjacent cells until both expected halves clear the threshold
  std::vector<std::pair<double, double>> pooled;
  double ca = 0.0, cb = 0.0;
  for (auto& [value, cnt] : cells) {
    (void)value;
    ca += cnt.first;
    cb += cnt.second;
    double tot = ca + cb;
    if (tot * na / (na + nb) >= min_expected && tot * nb / (na + nb) >= min_expected) {
      pooled.emplace_back(ca, cb);
      ca = cb = 0.0;
    }
  }
  if ((ca > 0.0 || cb > 0.0)) {
    if (!pooled.empty()) {
      pooled.back().first += ca;
      pooled.back().second += cb;
    } else {
      pooled.emplace_back(ca, cb);
    }
  }
  ChiSquareResult r;
  if (pooled.size() < 2) {
    r.df = 0;
    r.p = 1.0;
    return r;
  }
  for (auto& [oa, ob] : pooled) {
    double tot = oa + ob;
    double ea = tot * na / (na + nb);
    double eb = tot * nb / (na + nb);
    r.stat += (oa - ea) * (oa - ea) / ea + (ob - eb) * (ob - eb) / eb;
  }
  r.df = static_cast<double>(pooled.size() - 1);
  r.p = chi_square_tail(r.stat, r.df);
  return r;
}

double quantile(std::vector<double> xs, double q) {
  if (xs.empty()) throw std::invalid_argument("quantile: empty sample");
  std::sort(xs.begin(), xs.end());
  double pos = q * static_cast<double>(xs.size() - 1);
  std::size_t lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= xs.size()) return xs.back();
  double frac = pos - static_cast<double>(lo);
  return xs[lo] * (1.0 - frac) + xs[lo + 1] * frac;
}

}  // namespace critlab
