#include "doctest.h"

#include <cmath>

#include "fracdiff/inverse_problem.hpp"
#include "fracdiff/simulation.hpp"

using namespace fracdiff;

TEST_CASE("relaxation gain") {
  CHECK(relaxation_gain(0.0, 0.3) == 0.3);
  CHECK(relaxation_gain(2.0, 0.5) == doctest::Approx((1.0 - std::exp(-1.0)) / 2.0));
  CHECK(relaxation_gain(1e-12, 0.5) == doctest::Approx(0.5));
}

TEST_CASE("inverse calibration inverts the forward map") {
  for (double theta : {0.0, 0.5, 2.0}) {
    for (double delta : {1.0, 0.1, 0.01}) {
      const SamplingGrid g = SamplingGrid::with_count(delta, 50);
      const FouParams params{theta, 1.7, 0.6};
      const Trajectory driver = sample_fbm(0.6, g, SeedSpec{2, 0});
      const CalibrationResult forward_cal = interpolation_calibration(driver);
      const Trajectory x = forward_map(forward_cal, params, 0.3);
      const CalibrationResult back = inverse_calibration(x, params);
      REQUIRE(back.gradients.size() == 50);
      for (std::size_t k = 0; k < 50; ++k) {
        CHECK(std::abs(back.gradients[k] - forward_cal.gradients[k]) <
              1e-12 * std::max(1.0, std::abs(forward_cal.gradients[k])));
      }
      const Trajectory rebuilt = calibrated_driver(back);
      CHECK(rebuilt[50] == doctest::Approx(driver[50]).epsilon(1e-10));
    }
  }
}

TEST_CASE("convergence diagnostic shrinks with the mesh") {
  const auto diag = convergence_diagnostic(SeedSpec{4, 0}, FouParams{1.0, 1.0, 0.7}, 0.125, 4, 1.6,
                                           1.0, 8);
  REQUIRE(diag.distances.size() == 5);
  CHECK(diag.deltas[4] == doctest::Approx(0.125 / 16.0));
  CHECK(diag.distances.back() < 0.5 * diag.distances.front());
  CHECK(diag.gradient_gaps.back() < diag.gradient_gaps.front());
}
