#include "doctest.h"

#include <cmath>

#include "fracdiff/fgn_covariance.hpp"
#include "fracdiff/gaussian_sampler.hpp"

using namespace fracdiff;
using Method = StationaryGaussianSampler::Method;

namespace {

// Time-averaged lag products pooled over replicates.
std::vector<double> empirical_autocovariance(const StationaryGaussianSampler& sampler,
                                             std::size_t lags, std::size_t replicates) {
  std::vector<double> acc(lags, 0.0);
  std::vector<double> count(lags, 0.0);
  Rng rng = make_rng(SeedSpec{7, 0});
  for (std::size_t r = 0; r < replicates; ++r) {
    const auto x = sampler.sample(rng);
    for (std::size_t k = 0; k < lags; ++k) {
      for (std::size_t i = 0; i + k < x.size(); ++i) {
        acc[k] += x[i] * x[i + k];
        count[k] += 1.0;
      }
    }
  }
  for (std::size_t k = 0; k < lags; ++k) acc[k] /= count[k];
  return acc;
}

}  // namespace

TEST_CASE("circulant and Cholesky samples reproduce the fGn autocovariance") {
  for (double h : {0.3, 0.8}) {
    const auto gamma = [h](std::size_t k) { return fgn_autocovariance(h, 1.0, k); };
    for (Method m : {Method::cholesky, Method::circulant}) {
      const StationaryGaussianSampler sampler(gamma, 256, m);
      CHECK(sampler.method() == m);
      const auto emp = empirical_autocovariance(sampler, 4, 400);
      for (std::size_t k = 0; k < 4; ++k) CHECK(std::abs(emp[k] - gamma(k)) < 0.03);
    }
  }
}

TEST_CASE("automatic switches to circulant above the Cholesky limit") {
  const auto gamma = [](std::size_t k) { return fgn_autocovariance(0.7, 1.0, k); };
  CHECK(StationaryGaussianSampler(gamma, 100).method() == Method::cholesky);
  const StationaryGaussianSampler big(gamma, StationaryGaussianSampler::kCholeskyLimit + 1);
  CHECK(big.method() == Method::circulant);
  CHECK(big.embedding_size() >= 2 * StationaryGaussianSampler::kCholeskyLimit);
}

TEST_CASE("sampling is deterministic in the seed") {
  const auto s = make_fgn_sampler(0.6, 0.01, 300);
  Rng a = make_rng(SeedSpec{3, 1});
  Rng b = make_rng(SeedSpec{3, 1});
  CHECK(s.sample(a) == s.sample(b));
  Rng c = make_rng(SeedSpec{3, 2});
  Rng d = make_rng(SeedSpec{3, 1});
  CHECK(s.sample(c) != s.sample(d));
}

TEST_CASE("H = 1/2 gives white noise with variance delta") {
  const auto s = make_fgn_sampler(0.5, 0.04, 1000);
  CHECK(s.method() == Method::white);
  const auto emp = empirical_autocovariance(s, 3, 50);
  CHECK(emp[0] == doctest::Approx(0.04).epsilon(0.03));
  CHECK(std::abs(emp[1]) < 0.002);
}
