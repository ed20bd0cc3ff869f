#include "doctest.h"

#include <cmath>

#include "fracdiff/likelihood.hpp"
#include "fracdiff/simulation.hpp"

using namespace fracdiff;

namespace {

Trajectory fou_path(double theta, double sigma, double hurst, double delta, std::size_t n,
                    std::uint64_t replicate) {
  const SamplingGrid g = SamplingGrid::with_count(delta, n);
  return sample_stationary_fou(theta, sigma, hurst, g, SeedSpec{17, replicate});
}

// Dense Gaussian log-density of the φ-scaled residual, constants dropped.
double dense_log_likelihood(const Trajectory& x, double hurst, double theta, double sigma) {
  const std::size_t n = x.grid().count();
  const double delta = x.grid().delta();
  const double phi = relaxation_factor(theta, delta);
  const Eigen::MatrixXd s = FgnCovariance(hurst, delta, n).dense();
  Eigen::VectorXd r(n);
  for (std::size_t k = 0; k < n; ++k) r[k] = x[k + 1] - std::exp(-theta * delta) * x[k];
  const double q = r.dot(s.fullPivLu().solve(r));
  return -q / (2.0 * sigma * sigma * phi * phi) - static_cast<double>(n) * std::log(sigma * phi);
}

}  // namespace

TEST_CASE("relaxation factor and derivative") {
  CHECK(relaxation_factor(0.0, 0.2) == doctest::Approx(1.0));
  const double h = 1e-6;
  for (double theta : {0.0, 0.4, 3.0}) {
    const double fd = (relaxation_factor(theta + h, 0.1) - relaxation_factor(std::max(0.0, theta - h), 0.1)) /
                      (theta + h - std::max(0.0, theta - h));
    CHECK(relaxation_factor_derivative(theta, 0.1) == doctest::Approx(fd).epsilon(1e-5));
  }
}

TEST_CASE("log-likelihood matches dense algebra") {
  const Trajectory x = fou_path(1.0, 1.0, 0.3, 0.1, 60, 0);
  const LikelihoodContext ctx(x, 0.3);
  for (double theta : {0.0, 0.7, 2.5}) {
    CHECK(log_likelihood(ctx, theta, 1.3) ==
          doctest::Approx(dense_log_likelihood(x, 0.3, theta, 1.3)).epsilon(1e-9));
  }
}

TEST_CASE("score is the gradient of delta times the log-likelihood") {
  const Trajectory x = fou_path(1.0, 1.0, 0.7, 0.05, 80, 1);
  const LikelihoodContext ctx(x, 0.7);
  const double h = 1e-5;
  for (auto [theta, sigma] : {std::pair{0.8, 1.1}, std::pair{2.0, 0.6}}) {
    const Score s = score(ctx, theta, sigma);
    const double d = ctx.delta();
    const double ft = d * (log_likelihood(ctx, theta + h, sigma) - log_likelihood(ctx, theta - h, sigma)) / (2 * h);
    const double fs = d * (log_likelihood(ctx, theta, sigma + h) - log_likelihood(ctx, theta, sigma - h)) / (2 * h);
    CHECK(s.theta == doctest::Approx(ft).epsilon(1e-6));
    CHECK(s.sigma == doctest::Approx(fs).epsilon(1e-6));
  }
}

TEST_CASE("expansion terms reassemble the likelihood") {
  const Trajectory x = fou_path(1.0, 1.0, 0.7, 0.1, 100, 2);
  const LikelihoodContext ctx(x, 0.7);
  const ExpansionTerms e = expansion_terms(ctx, 1.0, 1.0);
  CHECK(e.ell0 / ctx.delta() + e.ell1 + e.residual ==
        doctest::Approx(log_likelihood(ctx, 1.0, 1.0)).epsilon(1e-12));
}

TEST_CASE("profile MLE recovers the parameters") {
  std::vector<double> thetas;
  std::vector<double> sigmas;
  for (std::uint64_t r = 0; r < 20; ++r) {
    const Trajectory x = fou_path(1.0, 1.5, 0.7, 0.05, 400, 10 + r);
    const LikelihoodContext ctx(x, 0.7);
    const ProfileEstimate est = profile_mle(ctx, 0.0, 10.0);
    CHECK(est.sigma * est.sigma == doctest::Approx(profile_sigma2(ctx, est.theta)));
    CHECK(est.log_likelihood >= log_likelihood(ctx, 1.0, 1.5) - 1e-9);
    thetas.push_back(est.theta);
    sigmas.push_back(est.sigma);
  }
  double mt = 0.0;
  double ms = 0.0;
  for (std::size_t i = 0; i < 20; ++i) {
    mt += thetas[i] / 20.0;
    ms += sigmas[i] / 20.0;
  }
  CHECK(ms == doctest::Approx(1.5).epsilon(0.03));
  CHECK(std::abs(mt - 1.0) < 0.6);
}
