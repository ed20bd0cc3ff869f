#include "doctest.h"

#include <cmath>

#include "fracdiff/fgn_covariance.hpp"
#include "fracdiff/multiscale.hpp"
#include "fracdiff/simulation.hpp"
#include "fracdiff/stats.hpp"

using namespace fracdiff;

TEST_CASE("fBM paths start at zero and have the right terminal variance") {
  const SamplingGrid g = SamplingGrid::with_count(0.01, 100);
  std::vector<double> terminal;
  for (std::uint64_t r = 0; r < 2000; ++r) {
    const Trajectory b = sample_fbm(0.7, g, SeedSpec{11, r}, 2.0);
    CHECK(b[0] == 0.0);
    terminal.push_back(b[100]);
  }
  CHECK(variance(terminal) == doctest::Approx(4.0).epsilon(0.08));
}

TEST_CASE("slow increment covariance at H = 1/2 matches the closed-form bias") {
  for (double ratio : {0.1, 1.0, 10.0}) {
    const double delta = 0.05;
    const double eps = delta * ratio;
    const double var = physical_fbm_increment_autocovariance(0.5, 1.3, eps, delta, 0);
    CHECK(var / delta == doctest::Approx(expected_bias_h_half(1.3, eps, delta)).epsilon(1e-12));
  }
  // ε → 0 recovers fGn.
  const double limit = physical_fbm_increment_autocovariance(0.7, 1.0, 1e-9, 0.1, 2);
  CHECK(limit == doctest::Approx(fgn_autocovariance(0.7, 0.1, 2)).epsilon(1e-6));
}

TEST_CASE("stationary fOU recursion has the stationary variance") {
  for (double h : {0.3, 0.7}) {
    const SamplingGrid g = SamplingGrid::with_count(0.5, 4);
    std::vector<double> first;
    std::vector<double> last;
    for (std::uint64_t r = 0; r < 3000; ++r) {
      const Trajectory y = sample_stationary_fou(2.0, 1.5, h, g, SeedSpec{5, r});
      first.push_back(y[0]);
      last.push_back(y[4]);
    }
    const double expected = stationary_fou_autocovariance(h, 2.0, 1.5, 0.0);
    CHECK(variance(first) == doctest::Approx(expected).epsilon(0.08));
    CHECK(variance(last) == doctest::Approx(expected).epsilon(0.08));
  }
}

TEST_CASE("physical fBM slow component against the exact slow sampler") {
  const MultiscaleParams p{0.05, 0.5, 1.0, 0.7};
  const SamplingGrid g = SamplingGrid::with_count(0.1, 10);
  const PhysicalFbmSlowSampler exact(0.7, 1.0, 0.05, g);
  std::vector<double> a;
  std::vector<double> b;
  for (std::uint64_t r = 0; r < 2000; ++r) {
    a.push_back(sample_physical_fbm(p, g, SeedSpec{9, r}).slow[10]);
    b.push_back(exact.sample(SeedSpec{9, r})[10]);
  }
  double expected = 0.0;
  for (std::size_t i = 0; i < 10; ++i) {
    for (std::size_t j = 0; j < 10; ++j) {
      const std::size_t lag = i > j ? i - j : j - i;
      expected += physical_fbm_increment_autocovariance(0.7, 1.0, 0.05, 0.1, lag);
    }
  }
  CHECK(variance(a) == doctest::Approx(expected).epsilon(0.1));
  CHECK(variance(b) == doctest::Approx(expected).epsilon(0.1));
}

TEST_CASE("TFE system averages to the linear decay") {
  const TfeSystemParams p{1.5, 0.0, 1e-5, 0.7};
  const SamplingGrid g = SamplingGrid::with_count(0.05, 40);
  const auto s = sample_tfe_system(p, g, SeedSpec{1, 0}, 2.0);
  for (std::size_t k = 0; k <= 40; k += 10) {
    CHECK(std::abs(s.slow[k] - 2.0 * std::exp(-1.5 * g.time(k))) < 0.02);
  }
  CHECK_THROWS_AS(sample_tfe_system(TfeSystemParams{1.0, -1.0, 0.1, 0.7}, g, SeedSpec{}, 1.0),
                  Error);
}
