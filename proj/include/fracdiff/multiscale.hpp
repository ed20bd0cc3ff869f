#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "fracdiff/core.hpp"
#include "fracdiff/fgn_covariance.hpp"

namespace fracdiff {

/// (1/N)(Δx)ᵀΣ⁻¹(Δx) for the fGn covariance of the data grid.
double sigma2_hat(const Trajectory& x, double hurst);
double sigma2_hat(const Trajectory& x, const FgnCovariance& covariance);

/// Ĥ = ½ − log(S_{δ/2}/S_δ)/(2 log 2) from a path observed at δ/2; S_h sums the
/// squared second-order increments at spacing h.
double hurst_hat(const Trajectory& fine);

/// Mean of σ̂² on physical Brownian motion (H = ½): σ²(1 + (ε/δ)(e^{−δ/ε} − 1)).
double expected_bias_h_half(double sigma, double epsilon, double delta);

enum class AlphaRegime { consistency, clt };

/// Open interval of subsampling exponents α for which the theory applies.
std::pair<double, double> admissible_alpha(double hurst, AlphaRegime regime);

/// L² rate exponent of σ̂² in ε with δ = ε^α:
/// min{H(1−α), α/2} for H ≥ ½, min{H − α(1−H), α/2} for H < ½.
double predicted_rate_exponent(double hurst, double alpha);

/// δ = ε^α over a list of ε at a fixed horizon.
class SubsamplingSchedule {
 public:
  SubsamplingSchedule(std::vector<double> epsilons, double alpha, double horizon);
  std::size_t size() const noexcept { return epsilons_.size(); }
  double epsilon(std::size_t i) const { return epsilons_.at(i); }
  double alpha() const noexcept { return alpha_; }
  double delta(std::size_t i) const;
  SamplingGrid grid(std::size_t i) const;

 private:
  std::vector<double> epsilons_;
  double alpha_;
  double horizon_;
};

}  // namespace fracdiff
