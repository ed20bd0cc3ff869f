#include "fracdiff/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fracdiff/core.hpp"

namespace fracdiff {

namespace {

void require_size(std::span<const double> x, std::size_t n) {
  if (x.size() < n) fail(ErrorKind::insufficient_data, "sample too small");
}

// log Φ(z), accurate in both tails.
double log_normal_cdf(double z) { return std::log(0.5 * std::erfc(-z / std::numbers::sqrt2)); }

}  // namespace

double mean(std::span<const double> x) {
  require_size(x, 1);
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
  require_size(x, 2);
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

double standard_error(std::span<const double> x) {
  return std::sqrt(variance(x) / static_cast<double>(x.size()));
}

double root_mean_square(std::span<const double> x) {
  require_size(x, 1);
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s / static_cast<double>(x.size()));
}

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) fail(ErrorKind::invalid_argument, "fit inputs differ in length");
  require_size(x, 2);
  const double mx = mean(x);
  const double my = mean(y);
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) fail(ErrorKind::degenerate_data, "fit abscissae are all equal");
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - intercept - slope * x[i];
    sse += r * r;
  }
  const double se = x.size() > 2 ? std::sqrt(sse / static_cast<double>(x.size() - 2) / sxx) : 0.0;
  return LinearFit{slope, intercept, se};
}

LinearFit loglog_fit(std::span<const double> x, std::span<const double> y) {
  std::vector<double> lx(x.size());
  std::vector<double> ly(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) lx[i] = std::log(x[i]);
  for (std::size_t i = 0; i < y.size(); ++i) ly[i] = std::log(y[i]);
  return linear_fit(lx, ly);
}

NormalityTest anderson_darling_normality(std::span<const double> sample) {
  require_size(sample, 8);
  const double m = mean(sample);
  const double s = std::sqrt(variance(sample));
  if (!(s > 0.0)) fail(ErrorKind::degenerate_data, "sample has zero variance");
  std::vector<double> z(sample.begin(), sample.end());
  for (double& v : z) v = (v - m) / s;
  std::sort(z.begin(), z.end());
  const auto n = static_cast<double>(z.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double weight = 2.0 * static_cast<double>(i) + 1.0;
    acc += weight * (log_normal_cdf(z[i]) + log_normal_cdf(-z[z.size() - 1 - i]));
  }
  const double a2 = -n - acc / n;
  const double a = a2 * (1.0 + 0.75 / n + 2.25 / (n * n));
  double p;
  if (a >= 0.6) {
    p = std::exp(1.2937 - 5.709 * a + 0.0186 * a * a);
  } else if (a >= 0.34) {
    p = std::exp(0.9177 - 4.279 * a - 1.38 * a * a);
  } else if (a >= 0.2) {
    p = 1.0 - std::exp(-8.318 + 42.796 * a - 59.938 * a * a);
  } else {
    p = 1.0 - std::exp(-13.436 + 101.14 * a - 223.73 * a * a);
  }
  return NormalityTest{a, std::clamp(p, 0.0, 1.0)};
}

bool strictly_decreasing(std::span<const double> x) {
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (!(x[i] < x[i - 1])) return false;
  }
  return true;
}

bool non_increasing(std::span<const double> x) {
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (!(x[i] <= x[i - 1])) return false;
  }
  return true;
}

}  // namespace fracdiff
