#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>

namespace critlab {

/// Counter-based 64-bit generator (splitmix64 finalizer over an affine
/// counter walk).  Output k depends only on (key, k), so replicate streams
/// derived via stream() are reproducible independently and in parallel.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : key_(finalize(seed ^ 0x6a09e667f3bcc909ULL)) {}

  /// Derived stream for replicate `id`: hash(master_seed, id).
  static Rng stream(std::uint64_t master, std::uint64_t id) {
    Rng r(master);
    r.key_ = finalize(r.key_ + finalize(id * 0x9e3779b97f4a7c15ULL + 0xbf58476d1ce4e5b9ULL));
    return r;
  }

  std::uint64_t next_u64() {
    ctr_ += 0x9e3779b97f4a7c15ULL;
    return finalize(key_ ^ ctr_);
  }

  /// Uniform on [0,1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform on (0,1).
  double uniform_pos() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Uniform integer in [0, n).
  std::uint64_t uniform_int(std::uint64_t n) {
    // multiply-shift; bias is negligible for n << 2^64
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  /// Standard normal via Box-Muller (second value cached).
  double normal() {
    if (have_cache_) {
      have_cache_ = false;
      return cache_;
    }
    double u1 = uniform_pos();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    cache_ = r * std::sin(a);
    have_cache_ = true;
    return r * std::cos(a);
  }

  /// Exponential with the given rate.
  double exponential(double rate) {
    if (rate <= 0.0) throw std::invalid_argument("exponential: rate must be > 0");
    return -std::log(uniform_pos()) / rate;
  }

  /// Poisson sample; product method for small means, PTRS rejection above.
  std::uint64_t poisson(double mean) {
    if (mean < 0.0 || !std::isfinite(mean))
      throw std::invalid_argument("poisson: bad mean");
    if (mean == 0.0) return 0;
    if (mean < 30.0) {
      double limit = std::exp(-mean);
      double prod = 1.0;
      std::uint64_t k = 0;
      do {
        ++k;
        prod *= uniform_pos();
      } while (prod > limit);
      return k - 1;
    }
    return poisson_ptrs(mean);
  }

  /// Bernoulli(p).
  bool bernoulli(double p) { return uniform() < p; }

  /// Geometric skip: number of failures before the next success for
  /// Bernoulli(p) trials (0-based index of the next hit).
  std::uint64_t geometric_skip(double p) {
    if (p >= 1.0) return 0;
    if (p <= 0.0) return std::numeric_limits<std::uint64_t>::max();
    double g = std::floor(std::log(uniform_pos()) / std::log1p(-p));
    if (g > 9.0e18) return std::numeric_limits<std::uint64_t>::max();
    return static_cast<std::uint64_t>(g);
  }

  /// Index sampled proportionally to nonnegative weights.
  std::size_t categorical(std::span<const double> w, double total) {
    double t = uniform() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < w.size(); ++i) {
      acc += w[i];
      if (t < acc) return i;
    }
    return w.empty() ? 0 : w.size() - 1;
  }

 private:
  static std::uint64_t finalize(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t poisson_ptrs(double mean) {
    // Hormann's transformed rejection with squeeze.
    const double slam = std::sqrt(mean);
    const double llam = std::log(mean);
    const double b = 0.931 + 2.53 * slam;
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double vr = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
      double u = uniform() - 0.5;
      double v = uniform_pos();
      double us = 0.5 - std::fabs(u);
      double kd = std::floor((2.0 * a / us + b) * u + mean + 0.43);
      if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(kd);
      if (kd < 0.0 || (us < 0.013 && v > us)) continue;
      if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
          kd * llam - mean - std::lgamma(kd + 1.0))
        return static_cast<std::uint64_t>(kd);
    }
  }

  std::uint64_t key_;
  std::uint64_t ctr_ = 0;
  double cache_ = 0.0;
  bool have_cache_ = false;
};

}  // namespace critlab
