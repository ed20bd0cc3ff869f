#include "doctest.h"

#include <cmath>

#include "fracdiff/experiments.hpp"
#include "fracdiff/signature.hpp"

using namespace fracdiff;

namespace {

Eigen::MatrixXd sample_nodes(std::size_t n, std::size_t d) {
  Eigen::MatrixXd x(n + 1, d);
  for (std::size_t k = 0; k <= n; ++k) {
    for (std::size_t i = 0; i < d; ++i) {
      x(k, i) = std::sin(1.3 * static_cast<double>(k) * static_cast<double>(i + 1)) +
                0.1 * static_cast<double>(k);
    }
  }
  return x;
}

}  // namespace

TEST_CASE("segment signature is the tensor exponential") {
  const std::vector<double> inc{0.5, -2.0};
  const TruncatedTensor s = segment_signature(inc, 3);
  CHECK(s.coefficient({}) == 1.0);
  CHECK(s.coefficient({1}) == -2.0);
  CHECK(s.coefficient({0, 1}) == doctest::Approx(-0.5));
  CHECK(s.coefficient({1, 1, 0}) == doctest::Approx(4.0 * 0.5 / 6.0));
}

TEST_CASE("Chen identity and shuffle relations") {
  const auto nodes = sample_nodes(12, 3);
  const auto path = PiecewiseLinearPath::through_nodes(SamplingGrid::with_count(0.1, 12), nodes);
  const TruncatedTensor whole = pwl_signature(path, 3, 0, 12);
  const TruncatedTensor split = pwl_signature(path, 3, 0, 5) * pwl_signature(path, 3, 5, 12);
  CHECK((whole - split).max_abs() < 1e-12 * whole.max_abs());
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(whole.coefficient({i}) == doctest::Approx(nodes(12, i) - nodes(0, i)));
  }
  CHECK(shuffles({0}, {1, 2}).size() == 3);
  CHECK(shuffles({0, 1}, {2}).size() == 3);
  CHECK(shuffle_residual(whole, {0}, {1, 2}) < 1e-12 * whole.max_abs() * whole.max_abs());
  CHECK(shuffle_residual(whole, {2}, {2}) < 1e-12);
}

TEST_CASE("signature matches nested quadrature") {
  const auto nodes = sample_nodes(6, 2);
  const auto path = PiecewiseLinearPath::through_nodes(SamplingGrid::with_count(0.2, 6), nodes);
  const TruncatedTensor sig = pwl_signature(path, 3, 0, 6);
  for (const Word& w : {Word{0, 1}, Word{1, 0, 1}, Word{1, 1, 0}}) {
    CHECK(quadrature_iterated_integral(nodes, 0.2, w) ==
          doctest::Approx(sig.coefficient(w)).epsilon(1e-10));
  }
}

TEST_CASE("p-variation against brute force") {
  Eigen::MatrixXd x(10, 1);
  for (int k = 0; k < 10; ++k) x(k, 0) = std::cos(2.1 * k) * (1 + 0.2 * k);
  for (double p : {1.0, 1.5, 2.5}) {
    CHECK(p_variation_norm(x, p) == doctest::Approx(brute_force_p_variation(x, p)).epsilon(1e-12));
  }
  const std::vector<double> mono{0.0, 1.0, 3.0, 6.0};
  CHECK(p_variation_norm(mono, 1.0) == doctest::Approx(6.0));
  CHECK(p_variation_norm(mono, 2.0) == doctest::Approx(6.0));
}

TEST_CASE("rough lift distances") {
  CHECK(lift_level_for_hurst(0.7) == 2);
  CHECK(lift_level_for_hurst(0.3) == 3);
  const ScalarRoughLift a({0.0, 1.0, 0.5, 2.0}, 2, 2.5);
  CHECK(a.increment(2, 0, 3) == doctest::Approx(2.0));
  CHECK(rough_pvar_distance(a, a) == 0.0);
  const ScalarRoughLift b({0.0, 1.0, 0.5, 2.5}, 2, 2.5);
  CHECK(rough_pvar_distance(a, b) > 0.0);
  const std::vector<double> u{0.0, 1.0, 2.0};
  const std::vector<double> v{0.0, 0.0, 0.0};
  CHECK(holder_distance(u, v, 1.0, 0.5) == doctest::Approx(2.0));
}
