#include "doctest.h"

#include <cmath>

#include "fracdiff/core.hpp"
#include "fracdiff/stats.hpp"

using namespace fracdiff;

TEST_CASE("moments") {
  const std::vector<double> x{1.0, 2.0, 3.0, 4.0};
  CHECK(mean(x) == 2.5);
  CHECK(variance(x) == doctest::Approx(5.0 / 3.0));
  CHECK(standard_error(x) == doctest::Approx(std::sqrt(5.0 / 12.0)));
  CHECK(root_mean_square(x) == doctest::Approx(std::sqrt(7.5)));
}

TEST_CASE("fits") {
  const std::vector<double> x{1.0, 2.0, 4.0, 8.0};
  std::vector<double> y;
  for (double v : x) y.push_back(3.0 * std::pow(v, -0.75));
  const LinearFit f = loglog_fit(x, y);
  CHECK(f.slope == doctest::Approx(-0.75));
  CHECK(std::exp(f.intercept) == doctest::Approx(3.0));
  CHECK(f.slope_standard_error < 1e-10);
  const LinearFit l = linear_fit(std::vector<double>{0, 1, 2}, std::vector<double>{1, 3, 5});
  CHECK(l.slope == doctest::Approx(2.0));
  CHECK(l.intercept == doctest::Approx(1.0));
}

TEST_CASE("Anderson-Darling accepts normals and rejects uniforms") {
  Rng rng = make_rng(SeedSpec{12, 0});
  const auto z = standard_normals(rng, 2000);
  CHECK(anderson_darling_normality(z).p_value > 0.01);
  std::vector<double> u;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int i = 0; i < 2000; ++i) u.push_back(unif(rng));
  CHECK(anderson_darling_normality(u).p_value < 1e-3);
}

TEST_CASE("monotonicity") {
  CHECK(strictly_decreasing(std::vector<double>{3, 2, 1}));
  CHECK_FALSE(strictly_decreasing(std::vector<double>{3, 3, 1}));
  CHECK(non_increasing(std::vector<double>{3, 3, 1}));
  CHECK_FALSE(non_increasing(std::vector<double>{1, 2}));
}
