#include "fracdiff/likelihood.hpp"

#include <cmath>

#include "fracdiff/scalar_search.hpp"

namespace fracdiff {

namespace {

void check_sigma(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) fail(ErrorKind::invalid_argument, "sigma must be positive");
}

void check_theta(double theta) {
  if (!(theta >= 0.0) || !std::isfinite(theta)) {
    fail(ErrorKind::invalid_argument, "theta must be non-negative");
  }
}

// a = 1 − e^{−θδ}.
double shift_weight(double theta, double delta) { return -std::expm1(-theta * delta); }

}  // namespace

double relaxation_factor(double theta, double delta) {
  const double u = theta * delta;
  if (u < 1e-8) return 1.0 - 0.5 * u;
  return -std::expm1(-u) / u;
}

double relaxation_factor_derivative(double theta, double delta) {
  const double u = theta * delta;
  if (u < 1.0) {
    // f'(u) = Σ_{n≥1} n(−1)ⁿ u^{n−1}/(n+1)!
    double sum = 0.0;
    double power = 1.0;      // u^{n−1}
    double factorial = 2.0;  // (n+1)!
    for (int n = 1; n < 40; ++n) {
      const double term = n * power / factorial;
      sum += (n % 2 == 0 ? term : -term);
      if (term < 1e-18) break;
      power *= u;
      factorial *= n + 2;
    }
    return delta * sum;
  }
  return delta * (std::exp(-u) * (u + 1.0) - 1.0) / (u * u);
}

LikelihoodContext::LikelihoodContext(Trajectory data, double hurst)
    : data_(std::move(data)),
      covariance_(std::make_shared<const FgnCovariance>(hurst, data_.grid().delta(),
                                                        data_.grid().count())) {
  cache_forms();
}

LikelihoodContext::LikelihoodContext(Trajectory data,
                                     std::shared_ptr<const FgnCovariance> covariance)
    : data_(std::move(data)), covariance_(std::move(covariance)) {
  if (!covariance_) fail(ErrorKind::invalid_argument, "null covariance");
  if (covariance_->size() != data_.grid().count() || covariance_->delta() != data_.grid().delta()) {
    fail(ErrorKind::invalid_argument, "covariance does not match the data grid");
  }
  cache_forms();
}

void LikelihoodContext::cache_forms() {
  const auto v = data_.values();
  const std::size_t n = size();
  std::vector<double> dx(n);
  std::vector<double> lagged(n);
  for (std::size_t k = 0; k < n; ++k) {
    dx[k] = v[k + 1] - v[k];
    lagged[k] = v[k];
  }
  const Eigen::VectorXd wd = covariance_->whiten(dx);
  const Eigen::VectorXd wl = covariance_->whiten(lagged);
  increments_form_ = wd.squaredNorm();
  cross_form_ = wd.dot(wl);
  lagged_form_ = wl.squaredNorm();
}

double LikelihoodContext::residual_form(double theta) const {
  const double a = shift_weight(theta, delta());
  return increments_form_ + a * (2.0 * cross_form_ + a * lagged_form_);
}

double LikelihoodContext::residual_form_slope(double theta) const {
  const double a = shift_weight(theta, delta());
  return delta() * std::exp(-theta * delta()) * (cross_form_ + a * lagged_form_);
}

double log_likelihood(const LikelihoodContext& ctx, double theta, double sigma) {
  check_sigma(sigma);
  check_theta(theta);
  const double phi = relaxation_factor(theta, ctx.delta());
  const double n = static_cast<double>(ctx.size());
  return -ctx.residual_form(theta) / (2.0 * sigma * sigma * phi * phi) - n * std::log(sigma * phi);
}

Score score(const LikelihoodContext& ctx, double theta, double sigma) {
  check_sigma(sigma);
  check_theta(theta);
  const double delta = ctx.delta();
  const double n = static_cast<double>(ctx.size());
  const double phi = relaxation_factor(theta, delta);
  const double dphi = relaxation_factor_derivative(theta, delta);
  const double q = ctx.residual_form(theta);
  const double s2 = sigma * sigma;
  const double slope = ctx.residual_form_slope(theta);

  const double drift_scale = delta * dphi / (s2 * phi * phi * phi) * q;
  const double jacobian = -delta * n * dphi / phi;
  const double left_slope = -delta / (2.0 * s2 * phi * phi) * slope;
  const double right_slope = -delta / (2.0 * s2 * phi * phi) * slope;
  const double d_theta = drift_scale + jacobian + left_slope + right_slope;

  const double d_sigma = delta * q / (s2 * sigma * phi * phi) - delta * n / sigma;
  return Score{d_theta, d_sigma};
}

ExpansionTerms expansion_terms(const LikelihoodContext& ctx, double theta, double sigma) {
  check_sigma(sigma);
  check_theta(theta);
  const double t = ctx.horizon();
  const double n = static_cast<double>(ctx.size());
  const double s2 = sigma * sigma;
  const double ell0 = -t / (2.0 * s2 * n) * ctx.increments_form() - t * std::log(sigma);
  const double bracket = ctx.increments_form() / n + 2.0 * ctx.cross_form() / n +
                         theta * t * ctx.lagged_form() / (n * n) - s2;
  const double ell1 = -theta * t / (2.0 * s2) * bracket;
  const double full = log_likelihood(ctx, theta, sigma);
  return ExpansionTerms{ell0, ell1, full - ell0 / ctx.delta() - ell1};
}

double profile_sigma2(const LikelihoodContext& ctx, double theta) {
  check_theta(theta);
  const double phi = relaxation_factor(theta, ctx.delta());
  return ctx.residual_form(theta) / (static_cast<double>(ctx.size()) * phi * phi);
}

ProfileEstimate profile_mle(const LikelihoodContext& ctx, double theta_lower, double theta_upper) {
  check_theta(theta_lower);
  if (!(theta_upper >= theta_lower)) fail(ErrorKind::invalid_argument, "empty theta interval");
  if (!(ctx.increments_form() > 0.0) && !(ctx.lagged_form() > 0.0)) {
    fail(ErrorKind::estimation_failure, "data increments are identically zero");
  }
  // The profiled likelihood is −N/2 − (N/2)·log(residual_form(θ)/N): maximizing
  // it is minimizing the residual form.
  const ScalarMinimum best = minimize_on_interval(
      [&](double theta) { return ctx.residual_form(theta); }, theta_lower, theta_upper);
  if (!(best.value > 0.0)) {
    fail(ErrorKind::estimation_failure, "profiled residual vanishes; sigma is not identifiable");
  }
  const double sigma = std::sqrt(profile_sigma2(ctx, best.argument));
  return ProfileEstimate{best.argument, sigma, log_likelihood(ctx, best.argument, sigma)};
}

}  // namespace fracdiff
