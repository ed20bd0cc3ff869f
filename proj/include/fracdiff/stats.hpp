#pragma once

#include <span>
#include <vector>

namespace fracdiff {

double mean(std::span<const double> x);
/// Unbiased sample variance.
double variance(std::span<const double> x);
double standard_error(std::span<const double> x);
/// √(mean of squares).
double root_mean_square(std::span<const double> x);

struct LinearFit {
  double slope;
  double intercept;
  double slope_standard_error;
};

LinearFit linear_fit(std::span<const double> x, std::span<const double> y);
/// Least-squares slope of log y against log x.
LinearFit loglog_fit(std::span<const double> x, std::span<const double> y);

struct NormalityTest {
  double statistic;  // A² with the small-sample correction
  double p_value;
};

/// Anderson–Darling test for normality with mean and variance estimated.
NormalityTest anderson_darling_normality(std::span<const double> sample);

bool strictly_decreasing(std::span<const double> x);
bool non_increasing(std::span<const double> x);

}  // namespace fracdiff
