#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <limits>

#include "fracdiff/fgn_covariance.hpp"

namespace fracdiff {

namespace {

constexpr double kAsymptoticSwitch = 35.0;

// Σ_{n=1..terms} ½ Π_{k=0}^{2n-1}(2H−k) x^{2H−2n}; terms < 0 selects optimal
// truncation (stop once terms stop shrinking).
double expansion_sum(double hurst, double x, int terms) {
  const double two_h = 2.0 * hurst;
  double product = 1.0;
  double sum = 0.0;
  double previous = std::numeric_limits<double>::infinity();
  const int limit = terms < 0 ? 200 : terms;
  for (int n = 1; n <= limit; ++n) {
    product *= (two_h - (2.0 * n - 2.0)) * (two_h - (2.0 * n - 1.0));
    const double term = 0.5 * product * std::pow(x, two_h - 2.0 * n);
    if (terms < 0) {
      if (std::abs(term) >= previous) break;
      previous = std::abs(term);
    }
    sum += term;
    if (terms < 0 && std::abs(term) <= 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

// r(s) = ¼[∫_0^s e^{v−s}v^{2H}dv + e^{−s}Γ(2H+1) + e^{s}Γ(2H+1, s)] − ½s^{2H},
// obtained by integrating the second-derivative kernel representation of
// Cov(Y_0, Y_s) by parts twice.
double small_lag_autocovariance(double hurst, double s) {
  const double a = 2.0 * hurst + 1.0;
  // ∫_0^s e^{v−s} v^{a−1} dv = s^a e^{−s} Σ_j s^j / (j!(a+j)); positive terms.
  double term = 1.0;
  double series = 1.0 / a;
  for (int j = 1; j < 400; ++j) {
    term *= s / j;
    const double add = term / (a + j);
    series += add;
    if (add <= 1e-17 * series) break;
  }
  const double lower_part = std::pow(s, a) * std::exp(-s) * series;
  const double gamma_a = std::tgamma(a);
  const double upper_part = std::exp(s) * boost::math::tgamma(a, s);
  return 0.25 * (lower_part + std::exp(-s) * gamma_a + upper_part) - 0.5 * std::pow(s, 2.0 * hurst);
}

}  // namespace

double fou_autocovariance_expansion(double hurst, double sigma, double epsilon, double lag,
                                    int terms) {
  check_hurst(hurst);
  if (hurst == 0.5) {
    fail(ErrorKind::unsupported, "the large-lag covariance expansion excludes H = 1/2");
  }
  if (!(lag > 0.0)) fail(ErrorKind::invalid_argument, "lag must be positive");
  if (!(epsilon > 0.0)) fail(ErrorKind::invalid_argument, "epsilon must be positive");
  if (terms < 1) fail(ErrorKind::invalid_argument, "need at least one expansion term");
  return sigma * sigma * expansion_sum(hurst, lag / epsilon, terms);
}

double unit_fou_variance(double hurst) {
  check_hurst(hurst);
  return hurst * std::tgamma(2.0 * hurst);
}

double unit_fou_autocovariance(double hurst, double lag) {
  check_hurst(hurst);
  const double s = std::abs(lag);
  if (hurst == 0.5) return 0.5 * std::exp(-s);
  if (s == 0.0) return unit_fou_variance(hurst);
  if (s >= kAsymptoticSwitch) return expansion_sum(hurst, s, -1);
  return small_lag_autocovariance(hurst, s);
}

double stationary_fou_autocovariance(double hurst, double lambda, double beta, double lag) {
  if (!(lambda > 0.0)) fail(ErrorKind::invalid_argument, "lambda must be positive");
  return beta * beta * std::pow(lambda, -2.0 * hurst) * unit_fou_autocovariance(hurst, lambda * lag);
}

}  // namespace fracdiff
