#include "doctest.h"

#include <cmath>

#include "fracdiff/spectral_conjecture.hpp"

using namespace fracdiff;

TEST_CASE("identity shift and white-noise shifts") {
  const ShiftGramFamily f(0.7, 16);
  CHECK(f.trace(0) == doctest::Approx(16.0).epsilon(1e-10));
  const ShiftGramFamily white(0.5, 16);
  for (std::size_t k = 1; k <= 16; ++k) CHECK(std::abs(white.trace(k)) < 1e-12);
}

TEST_CASE("trace products agree with explicit multiplication") {
  const ShiftGramFamily f(0.3, 12);
  for (auto [k, l] : {std::pair<std::size_t, std::size_t>{1, 3}, {5, 2}, {0, 7}, {12, 12}}) {
    const double explicit_trace = (f.matrix(k) * f.matrix(l)).trace();
    CHECK(f.trace_product(k, l) == doctest::Approx(explicit_trace).epsilon(1e-10));
  }
  CHECK(f.trace_product(0, 0) == doctest::Approx(12.0).epsilon(1e-10));
  CHECK(build_shift_gram(0.3, 12, 4).trace() == doctest::Approx(f.trace(4)).epsilon(1e-10));
}

TEST_CASE("second moment of Q") {
  const ShiftGramFamily f(0.7, 10);
  CHECK(q_moment(f, 0, 0) == doctest::Approx(120.0).epsilon(1e-10));
  const auto mc = q_moment_monte_carlo(0.7, 10, 3, 1, 20000, SeedSpec{2, 0});
  CHECK(std::abs(mc.mean - q_moment(f, 3, 1)) < 4.0 * mc.standard_error);
}

TEST_CASE("scan reports bounded traces") {
  const ConjectureScan scan = conjecture_scan({0.3, 0.7}, {8, 16}, 1.5);
  CHECK(scan.cells.size() == 4);
  for (const auto& c : scan.cells) {
    CHECK(c.trace_identity == doctest::Approx(static_cast<double>(c.size)).epsilon(1e-10));
  }
  CHECK(scan.flags.empty());
  CHECK_THROWS_AS(ShiftGramFamily(0.7, 0), Error);
}
