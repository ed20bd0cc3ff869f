#pragma once

#include <cmath>
#include <cstddef>
#include <limits>

#include "fracdiff/core.hpp"

namespace fracdiff {

struct ScalarMinimum {
  double argument;
  double value;
};

/// Minimizes f on [lower, upper]: the best of `grid_points` equispaced
/// evaluations brackets the search, then golden-section refines the bracket
/// until it is narrower than `width`.
template <class F>
ScalarMinimum minimize_on_interval(F&& f, double lower, double upper, std::size_t grid_points = 64,
                                   double width = 1e-8) {
  if (!(lower <= upper) || !std::isfinite(lower) || !std::isfinite(upper)) {
    fail(ErrorKind::invalid_argument, "search interval must be a finite [lower, upper]");
  }
  if (lower == upper) return {lower, f(lower)};
  if (grid_points < 3) grid_points = 3;
  const double step = (upper - lower) / static_cast<double>(grid_points - 1);
  std::size_t best = 0;
  double best_value = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid_points; ++i) {
    const double v = f(lower + step * static_cast<double>(i));
    if (v < best_value) {
      best_value = v;
      best = i;
    }
  }
  if (!std::isfinite(best_value)) {
    fail(ErrorKind::estimation_failure, "objective is not finite anywhere on the search grid");
  }
  double a = best == 0 ? lower : lower + step * static_cast<double>(best - 1);
  double b = best + 1 == grid_points ? upper : lower + step * static_cast<double>(best + 1);
  const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - ratio * (b - a);
  double d = a + ratio * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int iter = 0; iter < 400 && b - a > width; ++iter) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - ratio * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + ratio * (b - a);
      fd = f(d);
    }
  }
  ScalarMinimum result{0.5 * (a + b), 0.0};
  result.value = f(result.argument);
  if (best_value < result.value) result = {lower + step * static_cast<double>(best), best_value};
  return result;
}

}  // namespace fracdiff
