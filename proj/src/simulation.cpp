#include "fracdiff/simulation.hpp"

#include <cmath>
#include <sstream>

#include "fracdiff/fgn_covariance.hpp"

namespace fracdiff {

namespace {

// (1 − e^{−u})/u, stable near 0.
double relaxation_weight(double u) {
  if (u < 1e-8) return 1.0 - 0.5 * u;
  return -std::expm1(-u) / u;
}

struct FouRun {
  std::vector<double> fast;    // Y at the observation nodes
  std::vector<double> driver;  // B^H at the observation nodes, relative to t = 0
};

// Y ← e^{−λh}Y + β·φ_h(λ)·ΔB^H on a fine grid with a discarded burn-in prefix.
// φ_h(λ) is the cell average of the kernel, which makes the step exact for the
// piecewise-linear interpolation of the fine driver.
FouRun run_fou_recursion(double lambda, double beta, double hurst, const SamplingGrid& grid,
                         Rng& rng, std::size_t substeps) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    fail(ErrorKind::invalid_argument, "lambda must be positive");
  }
  if (substeps == 0) fail(ErrorKind::invalid_argument, "substeps must be >= 1");
  const double delta = grid.delta();
  const auto per_cell = static_cast<std::size_t>(
      static_cast<double>(substeps) * std::max(1.0, std::ceil(lambda * delta)));
  const double h = delta / static_cast<double>(per_cell);
  const auto burn = static_cast<std::size_t>(std::ceil(kBurnInRelaxations / (lambda * h)));
  const std::size_t total = burn + grid.count() * per_cell;

  using Method = StationaryGaussianSampler::Method;
  const auto method = hurst == 0.5 ? Method::white : Method::circulant;
  const std::vector<double> noise = make_fgn_sampler(hurst, h, total, method).sample(rng);

  const double decay = std::exp(-lambda * h);
  const double gain = beta * relaxation_weight(lambda * h);
  FouRun run;
  run.fast.reserve(grid.count() + 1);
  run.driver.reserve(grid.count() + 1);
  double y = 0.0;
  for (std::size_t i = 0; i < burn; ++i) y = decay * y + gain * noise[i];
  double b = 0.0;
  run.fast.push_back(y);
  run.driver.push_back(b);
  std::size_t i = burn;
  for (std::size_t k = 0; k < grid.count(); ++k) {
    for (std::size_t j = 0; j < per_cell; ++j, ++i) {
      y = decay * y + gain * noise[i];
      b += noise[i];
    }
    run.fast.push_back(y);
    run.driver.push_back(b);
  }
  return run;
}

}  // namespace

IncrementVector sample_fgn(double hurst, const SamplingGrid& grid, const SeedSpec& seed) {
  return sample_fgn(make_fgn_sampler(hurst, grid.delta(), grid.count()), grid, seed);
}

IncrementVector sample_fgn(const StationaryGaussianSampler& sampler, const SamplingGrid& grid,
                           const SeedSpec& seed) {
  if (sampler.size() != grid.count()) {
    fail(ErrorKind::invalid_argument, "sampler size does not match the grid");
  }
  Rng rng = make_rng(seed, Stream::fgn);
  return IncrementVector(grid, sampler.sample(rng));
}

Trajectory sample_fbm(double hurst, const SamplingGrid& grid, const SeedSpec& seed, double scale) {
  return Trajectory::from_increments(sample_fgn(hurst, grid, seed)).scaled(scale);
}

Trajectory sample_stationary_fou(double lambda, double beta, double hurst,
                                 const SamplingGrid& grid, const SeedSpec& seed,
                                 std::size_t substeps) {
  check_hurst(hurst);
  Rng rng = make_rng(seed, Stream::fgn);
  FouRun run = run_fou_recursion(lambda, beta, hurst, grid, rng, substeps);
  return Trajectory(grid, std::move(run.fast));
}

PhysicalFbmSample sample_physical_fbm(const MultiscaleParams& params, const SamplingGrid& grid,
                                      const SeedSpec& seed, std::size_t substeps) {
  params.validate();
  const double eps_h = std::pow(params.epsilon, params.hurst);
  Rng rng = make_rng(seed, Stream::fgn);
  FouRun run = run_fou_recursion(1.0 / params.epsilon, params.sigma / eps_h, params.hurst, grid,
                                 rng, substeps);
  const std::size_t n = run.fast.size();
  std::vector<double> slow(n);
  std::vector<double> driver(n);
  for (std::size_t k = 0; k < n; ++k) {
    driver[k] = params.sigma * run.driver[k];
    slow[k] = driver[k] - eps_h * (run.fast[k] - run.fast[0]);
  }
  return PhysicalFbmSample{Trajectory(grid, std::move(slow)), Trajectory(grid, std::move(run.fast)),
                           Trajectory(grid, std::move(driver))};
}

double physical_fbm_increment_autocovariance(double hurst, double sigma, double epsilon,
                                             double delta, std::size_t lag) {
  check_hurst(hurst);
  if (!(epsilon > 0.0)) fail(ErrorKind::invalid_argument, "epsilon must be positive");
  const double ratio = delta / epsilon;
  const double k = static_cast<double>(lag);
  const double r_next = unit_fou_autocovariance(hurst, (k + 1.0) * ratio);
  const double r_here = unit_fou_autocovariance(hurst, k * ratio);
  const double r_prev = unit_fou_autocovariance(hurst, std::abs(k - 1.0) * ratio);
  return sigma * sigma *
         (fgn_autocovariance(hurst, delta, lag) +
          std::pow(epsilon, 2.0 * hurst) * (r_next - 2.0 * r_here + r_prev));
}

PhysicalFbmSlowSampler::PhysicalFbmSlowSampler(double hurst, double sigma, double epsilon,
                                               const SamplingGrid& grid)
    : grid_(grid),
      sampler_(
          [=](std::size_t lag) {
            return physical_fbm_increment_autocovariance(hurst, sigma, epsilon, grid.delta(), lag);
          },
          grid.count()) {
  if (!(sigma > 0.0)) fail(ErrorKind::invalid_argument, "sigma must be positive");
}

Trajectory PhysicalFbmSlowSampler::sample(const SeedSpec& seed) const {
  Rng rng = make_rng(seed, Stream::fgn);
  return Trajectory::from_increments(IncrementVector(grid_, sampler_.sample(rng)));
}

void TfeSystemParams::validate() const {
  if (!(theta >= 0.0) || !std::isfinite(theta)) {
    fail(ErrorKind::invalid_argument, "theta must be non-negative");
  }
  if (!(eta >= 0.0) || !std::isfinite(eta)) fail(ErrorKind::invalid_argument, "eta must be >= 0");
  if (!(epsilon > 0.0)) fail(ErrorKind::invalid_argument, "epsilon must be positive");
  if (!(hurst > 0.5 && hurst < 1.0)) {
    std::ostringstream os;
    os << "the slow perturbation needs H in (1/2, 1), got " << hurst;
    fail(ErrorKind::invalid_argument, os.str());
  }
}

namespace {

// a³/3 − a⁴/4 + 7a⁵/60 − a⁶/24 for a − 2(1 − e^{−a}) + ½(1 − e^{−2a}).
double ou_integral_variance_factor(double a) {
  if (a < 1e-3) return a * a * a * (1.0 / 3.0 - a / 4.0 + 7.0 * a * a / 60.0 - a * a * a / 24.0);
  return a + 2.0 * std::expm1(-a) - 0.5 * std::expm1(-2.0 * a);
}

}  // namespace

TfeSystemSample sample_tfe_system(const TfeSystemParams& params, const SamplingGrid& grid,
                                  const SeedSpec& seed, double x0, std::optional<double> y0,
                                  std::size_t substeps) {
  params.validate();
  if (substeps == 0) fail(ErrorKind::invalid_argument, "substeps must be >= 1");
  if (!std::isfinite(x0)) fail(ErrorKind::invalid_argument, "x0 must be finite");
  const double h = grid.delta() / static_cast<double>(substeps);
  const std::size_t total = grid.count() * substeps;
  const double eps = params.epsilon;

  // Exact transition of (Y, ∫Y) over one sub-step.
  const double a = h / eps;
  const double one_minus = -std::expm1(-a);
  const double y_decay = std::exp(-a);
  const double y_sd = std::sqrt(-std::expm1(-2.0 * a));
  const double int_var = 2.0 * eps * eps * ou_integral_variance_factor(a);
  const double cross = eps * one_minus * one_minus;
  const double int_loading = cross / y_sd;
  const double int_resid_sd = std::sqrt(std::max(int_var - int_loading * int_loading, 0.0));

  const double slow_decay = std::exp(-params.theta * h);
  const double slow_mid = std::exp(-0.5 * params.theta * h);
  const double noise_gain = std::sqrt(params.eta) * relaxation_weight(params.theta * h);

  std::vector<double> fbm_noise(total, 0.0);
  if (params.eta > 0.0) {
    Rng frng = make_rng(seed, Stream::fgn);
    using Method = StationaryGaussianSampler::Method;
    const auto method = total <= 256 ? Method::cholesky : Method::circulant;
    fbm_noise = make_fgn_sampler(params.hurst, h, total, method).sample(frng);
  }
  Rng brng = make_rng(seed, Stream::fast_brownian);
  std::normal_distribution<double> normal(0.0, 1.0);
  double y;
  if (y0) {
    y = *y0;
  } else {
    Rng arng = make_rng(seed, Stream::aux);
    y = normal(arng);
  }
  double x = x0;
  std::vector<double> slow{x};
  std::vector<double> fast{y};
  slow.reserve(grid.count() + 1);
  fast.reserve(grid.count() + 1);
  for (std::size_t i = 0; i < total; ++i) {
    const double z1 = normal(brng);
    const double z2 = normal(brng);
    const double integral = eps * one_minus * y + int_loading * z1 + int_resid_sd * z2;
    y = y_decay * y + y_sd * z1;
    x = slow_decay * x + slow_mid * integral + noise_gain * fbm_noise[i];
    if ((i + 1) % substeps == 0) {
      slow.push_back(x);
      fast.push_back(y);
    }
  }
  return TfeSystemSample{Trajectory(grid, std::move(slow)), Trajectory(grid, std::move(fast)),
                         params};
}

}  // namespace fracdiff
