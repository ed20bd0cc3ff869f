#pragma once

#include <cstddef>
#include <optional>

#include "fracdiff/core.hpp"
#include "fracdiff/gaussian_sampler.hpp"

namespace fracdiff {

inline constexpr std::size_t kDefaultSubsteps = 16;
/// Burn-in length in units of 1/λ; e^{-19} < 1e-8.
inline constexpr double kBurnInRelaxations = 19.0;

/// Exact fGn increments on the grid.
IncrementVector sample_fgn(double hurst, const SamplingGrid& grid, const SeedSpec& seed);
/// Same, reusing a prepared sampler (its size must equal grid.count()).
IncrementVector sample_fgn(const StationaryGaussianSampler& sampler, const SamplingGrid& grid,
                           const SeedSpec& seed);

/// scale·B^H on the grid nodes, B^H_0 = 0.
Trajectory sample_fbm(double hurst, const SamplingGrid& grid, const SeedSpec& seed,
                      double scale = 1.0);

/// Stationary Y = β∫_{-∞}^t e^{-λ(t-s)} dB^H_s observed on the grid, started
/// after a burn-in of 19/λ from Y = 0. Internal step h = δ/(M·max(1,⌈λδ⌉)).
Trajectory sample_stationary_fou(double lambda, double beta, double hurst,
                                 const SamplingGrid& grid, const SeedSpec& seed,
                                 std::size_t substeps = kDefaultSubsteps);

struct PhysicalFbmSample {
  Trajectory slow;    // X^ε
  Trajectory fast;    // Y^ε
  Trajectory driver;  // σB^H
};

/// dX = ε^{H−1}Y dt, dY = −Y/ε dt + σε^{−H} dB^H. Y is the stationary fOU at
/// λ = 1/ε, β = σ/ε^H; X is rebuilt from X_t − X_0 = σB^H_t − ε^H(Y_t − Y_0), X_0 = 0.
PhysicalFbmSample sample_physical_fbm(const MultiscaleParams& params, const SamplingGrid& grid,
                                      const SeedSpec& seed,
                                      std::size_t substeps = kDefaultSubsteps);

/// Autocovariance of the grid increments of the slow component:
/// σ²[γ_δ(k) + ε^{2H}(r(s_{k+1}) − 2r(s_k) + r(s_{|k−1|}))], s_k = kδ/ε.
double physical_fbm_increment_autocovariance(double hurst, double sigma, double epsilon,
                                             double delta, std::size_t lag);

/// Exact sampler for the slow component alone on a grid, using the stationary
/// Gaussian law of its increments. Reusable across replicates.
class PhysicalFbmSlowSampler {
 public:
  PhysicalFbmSlowSampler(double hurst, double sigma, double epsilon, const SamplingGrid& grid);
  const SamplingGrid& grid() const noexcept { return grid_; }
  Trajectory sample(const SeedSpec& seed) const;

 private:
  SamplingGrid grid_;
  StationaryGaussianSampler sampler_;
};

struct TfeSystemParams {
  double theta = 1.0;
  double eta = 0.0;
  double epsilon = 1e-2;
  double hurst = 0.7;
  void validate() const;
};

struct TfeSystemSample {
  Trajectory slow;
  Trajectory fast;
  TfeSystemParams params;
};

/// dX = (−θX + Y)dt + √η dB^H, dY = −Y/ε dt + √(2/ε) dB with B ⟂ B^H.
/// Y and ∫Y are stepped jointly from their exact Gaussian transition; the slow
/// line uses the exponential integrator on sub-steps of δ/M. When y0 is empty
/// the fast state starts from its N(0,1) invariant law.
TfeSystemSample sample_tfe_system(const TfeSystemParams& params, const SamplingGrid& grid,
                                  const SeedSpec& seed, double x0,
                                  std::optional<double> y0 = std::nullopt,
                                  std::size_t substeps = kDefaultSubsteps);

}  // namespace fracdiff
