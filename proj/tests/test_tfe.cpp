#include "doctest.h"

#include <cmath>

#include "fracdiff/simulation.hpp"
#include "fracdiff/tfe.hpp"

using namespace fracdiff;

TEST_CASE("averaged trajectory and loss") {
  const SamplingGrid g = SamplingGrid::with_count(0.1, 20);
  const Trajectory a = averaged_trajectory(0.8, 2.0, g);
  CHECK(a[0] == 2.0);
  CHECK(a[20] == doctest::Approx(2.0 * std::exp(-1.6)));
  CHECK(tfe_loss(0.8, a, 2.0) == doctest::Approx(0.0).epsilon(1e-30));
  CHECK(tfe_loss(1.0, a, 2.0) > 0.0);
}

TEST_CASE("exact recovery on averaged data") {
  const SamplingGrid g = SamplingGrid::with_count(0.01, 200);
  for (double theta : {0.3, 1.0, 2.5}) {
    const Trajectory a = averaged_trajectory(theta, 1.0, g);
    CHECK(std::abs(tfe_estimate(a, TfeInstance{1.0, 0.0, 5.0}) - theta) < 1e-7);
  }
  CHECK_THROWS_AS(tfe_estimate(averaged_trajectory(1.0, 1.0, g), TfeInstance{1.0, 2.0, 1.0}), Error);
}

TEST_CASE("estimate on simulated multiscale data") {
  const SamplingGrid g = SamplingGrid::with_count(0.01, 200);
  const auto s = sample_tfe_system(TfeSystemParams{1.0, 1e-4, 1e-4, 0.7}, g, SeedSpec{3, 0}, 1.0);
  CHECK(std::abs(tfe_estimate(s.slow, TfeInstance{}) - 1.0) < 0.1);
}
