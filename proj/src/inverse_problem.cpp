#include "fracdiff/inverse_problem.hpp"

#include <cmath>
#include <numeric>

#include "fracdiff/gaussian_sampler.hpp"
#include "fracdiff/signature.hpp"

namespace fracdiff {

double relaxation_gain(double theta, double delta) {
  const double u = theta * delta;
  if (u < 1e-8) return delta * (1.0 - 0.5 * u);
  return -std::expm1(-u) / theta;
}

CalibrationResult interpolation_calibration(const Trajectory& driver) {
  const auto v = driver.values();
  const double delta = driver.grid().delta();
  std::vector<double> c(driver.grid().count());
  for (std::size_t k = 0; k < c.size(); ++k) c[k] = (v[k + 1] - v[k]) / delta;
  return CalibrationResult{driver.grid(), std::move(c), FouParams{0.0, 1.0, 0.5}};
}

CalibrationResult inverse_calibration(const Trajectory& x, const FouParams& params) {
  params.validate();
  const double delta = x.grid().delta();
  const double decay = std::exp(-params.theta * delta);
  const double scale = params.sigma * relaxation_gain(params.theta, delta);
  const auto v = x.values();
  std::vector<double> c(x.grid().count());
  for (std::size_t k = 0; k < c.size(); ++k) c[k] = (v[k + 1] - decay * v[k]) / scale;
  return CalibrationResult{x.grid(), std::move(c), params};
}

Trajectory forward_map(const CalibrationResult& calibration, const FouParams& params, double x0) {
  params.validate();
  const double delta = calibration.grid.delta();
  const double decay = std::exp(-params.theta * delta);
  const double scale = params.sigma * relaxation_gain(params.theta, delta);
  std::vector<double> x(calibration.gradients.size() + 1);
  x[0] = x0;
  for (std::size_t k = 0; k < calibration.gradients.size(); ++k) {
    x[k + 1] = decay * x[k] + scale * calibration.gradients[k];
  }
  return Trajectory(calibration.grid, std::move(x));
}

Trajectory calibrated_driver(const CalibrationResult& calibration) {
  const double delta = calibration.grid.delta();
  std::vector<double> z(calibration.gradients.size() + 1, 0.0);
  for (std::size_t k = 0; k < calibration.gradients.size(); ++k) {
    z[k + 1] = z[k] + delta * calibration.gradients[k];
  }
  return Trajectory(calibration.grid, std::move(z));
}

ConvergenceDiagnostic convergence_diagnostic(const SeedSpec& seed, const FouParams& params,
                                             double delta0, std::size_t levels, double p,
                                             double horizon, std::size_t oversampling) {
  params.validate();
  if (!(params.hurst > 0.25)) fail(ErrorKind::unsupported, "the diagnostic needs H > 1/4");
  if (!(p * params.hurst > 1.0)) fail(ErrorKind::invalid_argument, "the diagnostic needs p > 1/H");
  if (oversampling == 0) fail(ErrorKind::invalid_argument, "oversampling must be >= 1");
  const std::size_t finest_stride = std::size_t{1} << levels;
  const SamplingGrid coarse = SamplingGrid::make(delta0, horizon);
  const SamplingGrid fine = coarse.refined(finest_stride * oversampling);

  Rng rng = make_rng(seed, Stream::fgn);
  using Method = StationaryGaussianSampler::Method;
  const auto method = params.hurst == 0.5 ? Method::white : Method::circulant;
  const std::vector<double> noise =
      make_fgn_sampler(params.hurst, fine.delta(), fine.count(), method).sample(rng);

  // Exponential integrator with the cell-averaged kernel on the fine grid.
  const double h = fine.delta();
  const double decay = std::exp(-params.theta * h);
  const double gain = params.sigma * relaxation_gain(params.theta, h) / h;
  std::vector<double> b(fine.count() + 1, 0.0);
  std::vector<double> x(fine.count() + 1, 0.0);
  for (std::size_t i = 0; i < fine.count(); ++i) {
    b[i + 1] = b[i] + noise[i];
    x[i + 1] = decay * x[i] + gain * noise[i];
  }
  const Trajectory driver_fine(fine, std::move(b));
  const Trajectory fou_fine(fine, std::move(x));

  const std::size_t lift_level = lift_level_for_hurst(params.hurst);
  ConvergenceDiagnostic out;
  for (std::size_t n = 0; n <= levels; ++n) {
    const std::size_t stride = (finest_stride >> n) * oversampling;
    const Trajectory driver = driver_fine.decimate(stride);
    const Trajectory fou = fou_fine.decimate(stride);
    const CalibrationResult from_driver = interpolation_calibration(driver);
    const CalibrationResult from_fou = inverse_calibration(fou, params);
    const Trajectory a = calibrated_driver(from_driver);
    const Trajectory c = calibrated_driver(from_fou);
    const ScalarRoughLift lift_a({a.values().begin(), a.values().end()}, lift_level, p);
    const ScalarRoughLift lift_c({c.values().begin(), c.values().end()}, lift_level, p);
    const double delta = driver.grid().delta();
    double gap = 0.0;
    for (std::size_t k = 0; k < from_driver.gradients.size(); ++k) {
      gap += delta * std::abs(from_driver.gradients[k] - from_fou.gradients[k]);
    }
    out.deltas.push_back(delta);
    out.distances.push_back(rough_pvar_distance(lift_a, lift_c));
    out.gradient_gaps.push_back(gap / static_cast<double>(from_driver.gradients.size()));
  }
  return out;
}

}  // namespace fracdiff
