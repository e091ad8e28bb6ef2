#include <cmath>
#include <vector>

#include "doctest.h"

#include "critlab/rng.hpp"
#include "critlab/stats.hpp"

using namespace critlab;

TEST_CASE("rng streams are deterministic and independent of construction order") {
  Rng a = Rng::stream(42, 7);
  Rng b = Rng::stream(42, 7);
  for (int i = 0; i < 16; ++i) CHECK(a.next_u64() == b.next_u64());
  Rng c = Rng::stream(42, 8);
  CHECK(Rng::stream(42, 7).next_u64() != c.next_u64());
}

TEST_CASE("uniform moments") {
  Rng rng(1234);
  const int n = 200000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    sum += u;
    sum2 += u * u;
  }
  CHECK(std::fabs(sum / n - 0.5) < 0.005);
  CHECK(std::fabs(sum2 / n - 1.0 / 3.0) < 0.005);
}

TEST_CASE("normal and poisson moments") {
  Rng rng(99);
  const int n = 200000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    double z = rng.normal();
    s += z;
    s2 += z * z;
  }
  CHECK(std::fabs(s / n) < 0.01);
  CHECK(std::fabs(s2 / n - 1.0) < 0.02);

  for (double mean : {0.5, 7.0, 120.0}) {
    double ps = 0.0, ps2 = 0.0;
    const int reps = 100000;
    for (int i = 0; i < reps; ++i) {
      double k = static_cast<double>(rng.poisson(mean));
      ps += k;
      ps2 += k * k;
    }
    double m = ps / reps;
    double var = ps2 / reps - m * m;
    CHECK(std::fabs(m - mean) < 5.0 * std::sqrt(mean / reps) + 1e-9);
    CHECK(std::fabs(var - mean) < 0.05 * mean + 0.05);
  }
}

TEST_CASE("ks statistic basics") {
  std::vector<double> a{1.0, 2.0, 3.0};
  KSResult same = ks_two_sample(a, a);
  CHECK(same.d == doctest::Approx(0.0));
  std::vector<double> lo{0.0}, hi{1.0};
  CHECK(ks_two_sample(lo, hi).d == doctest::Approx(1.0));
}

TEST_CASE("ks p-value calibration on null samples") {
  // over 100 trials of two null uniform samples, the rejection rate at 0.05
  // stays near nominal
  int reject = 0;
  for (int trial = 0; trial < 100; ++trial) {
    Rng rng(5000 + trial);
    std::vector<double> a(10000), b(10000);
    for (auto& v : a) v = rng.uniform();
    for (auto& v : b) v = rng.uniform();
    if (ks_two_sample(a, b).p < 0.05) ++reject;
  }
  CHECK(reject >= 1);
  CHECK(reject <= 12);
}

TEST_CASE("chi-square tail against known values") {
  CHECK(chi_square_tail(3.841, 1) == doctest::Approx(0.05).epsilon(0.01));
  CHECK(chi_square_tail(18.307, 10) == doctest::Approx(0.05).epsilon(0.01));
  CHECK(gamma_q(1.0, 1.0) == doctest::Approx(std::exp(-1.0)));
}

TEST_CASE("two-sample chi-square accepts identical laws and rejects different ones") {
  Rng rng(7);
  std::vector<std::uint64_t> a, b, c;
  for (int i = 0; i < 20000; ++i) {
    a.push_back(rng.poisson(2.0));
    b.push_back(rng.poisson(2.0));
    c.push_back(rng.poisson(3.0));
  }
  CHECK(chi_square_two_sample_counts(a, b).p > 1e-3);
  CHECK(chi_square_two_sample_counts(a, c).p < 1e-6);
}
