#include "fracdiff/multiscale.hpp"

#include <algorithm>
#include <cmath>

namespace fracdiff {

double sigma2_hat(const Trajectory& x, double hurst) {
  return sigma2_hat(x, FgnCovariance(hurst, x.grid().delta(), x.grid().count()));
}

double sigma2_hat(const Trajectory& x, const FgnCovariance& covariance) {
  if (covariance.size() != x.grid().count()) {
    fail(ErrorKind::invalid_argument, "covariance size does not match the trajectory");
  }
  const IncrementVector dx = increments(x);
  return covariance.quadratic_form(dx.deltas()) / static_cast<double>(dx.size());
}

namespace {

double sum_of_squares(const std::vector<double>& v) {
  double s = 0.0;
  for (double d : v) s += d * d;
  return s;
}

}  // namespace

double hurst_hat(const Trajectory& fine) {
  const std::size_t count = fine.grid().count();
  if (count < 4 || count % 2 != 0) {
    fail(ErrorKind::insufficient_data, "H estimation needs an even number of cells, at least 4");
  }
  const double fine_sum = sum_of_squares(second_order_increments(fine));
  const double coarse_sum = sum_of_squares(second_order_increments(fine.decimate(2)));
  if (!(fine_sum > 0.0) || !(coarse_sum > 0.0)) {
    fail(ErrorKind::degenerate_data, "second-order increments vanish; H is not identifiable");
  }
  return 0.5 - std::log(fine_sum / coarse_sum) / (2.0 * std::log(2.0));
}

double expected_bias_h_half(double sigma, double epsilon, double delta) {
  if (!(sigma > 0.0) || !(epsilon > 0.0) || !(delta > 0.0)) {
    fail(ErrorKind::invalid_argument, "sigma, epsilon and delta must be positive");
  }
  const double r = epsilon / delta;
  return sigma * sigma * (1.0 + r * std::expm1(-1.0 / r));
}

std::pair<double, double> admissible_alpha(double hurst, AlphaRegime regime) {
  check_hurst(hurst);
  if (regime == AlphaRegime::consistency) {
    return {0.0, std::min(1.0, hurst / (1.0 - hurst))};
  }
  return {0.0, std::min(hurst / (0.5 + hurst), hurst / (1.5 - hurst))};
}

double predicted_rate_exponent(double hurst, double alpha) {
  check_hurst(hurst);
  if (!(alpha > 0.0)) fail(ErrorKind::invalid_argument, "alpha must be positive");
  if (hurst >= 0.5) return std::min(hurst * (1.0 - alpha), 0.5 * alpha);
  return std::min({2.0 * hurst - alpha, hurst - alpha * (1.0 - hurst), 0.5 * alpha});
}

SubsamplingSchedule::SubsamplingSchedule(std::vector<double> epsilons, double alpha, double horizon)
    : epsilons_(std::move(epsilons)), alpha_(alpha), horizon_(horizon) {
  if (epsilons_.empty()) fail(ErrorKind::invalid_argument, "schedule needs at least one epsilon");
  for (double e : epsilons_) {
    if (!(e > 0.0 && e < 1.0)) fail(ErrorKind::invalid_argument, "epsilon must lie in (0,1)");
  }
  if (!(alpha > 0.0)) fail(ErrorKind::invalid_argument, "alpha must be positive");
  if (!(horizon > 0.0)) fail(ErrorKind::invalid_argument, "horizon must be positive");
}

double SubsamplingSchedule::delta(std::size_t i) const { return std::pow(epsilon(i), alpha_); }

SamplingGrid SubsamplingSchedule::grid(std::size_t i) const {
  return SamplingGrid::make(delta(i), horizon_);
}

}  // namespace fracdiff
