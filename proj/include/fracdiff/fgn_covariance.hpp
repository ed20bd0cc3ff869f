#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

#include "fracdiff/core.hpp"

namespace fracdiff {

/// Autocovariance of fractional Gaussian noise at step δ:
/// γ(k) = ½δ^{2H}((k+1)^{2H} − 2k^{2H} + (k−1)^{2H}), γ(0) = δ^{2H}.
double fgn_autocovariance(double hurst, double delta, std::size_t lag);

/// γ(0..n-1).
std::vector<double> fgn_autocovariances(double hurst, double delta, std::size_t n);

/// Toeplitz covariance of N fGn increments with a cached Cholesky factor
/// Σ = L·Lᵀ. Immutable after construction.
class FgnCovariance {
 public:
  /// Throws ill_conditioned if the factorization breaks down.
  FgnCovariance(double hurst, double delta, std::size_t size);

  double hurst() const noexcept { return hurst_; }
  double delta() const noexcept { return delta_; }
  std::size_t size() const noexcept { return first_row_.size(); }
  std::span<const double> first_row() const noexcept { return first_row_; }
  double entry(std::size_t i, std::size_t j) const;

  Eigen::MatrixXd dense() const;
  const Eigen::MatrixXd& factor() const noexcept { return lower_; }

  /// L⁻¹u.
  Eigen::VectorXd whiten(std::span<const double> u) const;
  /// Σ⁻¹v via two triangular solves.
  Eigen::VectorXd solve(std::span<const double> v) const;
  /// L·w.
  Eigen::VectorXd color(std::span<const double> w) const;

  /// uᵀΣ⁻¹v without forming Σ⁻¹.
  double quadratic_form(std::span<const double> u, std::span<const double> v) const;
  double quadratic_form(std::span<const double> u) const { return quadratic_form(u, u); }

 private:
  void check_length(std::size_t n) const;

  double hurst_;
  double delta_;
  std::vector<double> first_row_;
  Eigen::MatrixXd lower_;
};

/// ‖Σ⁻¹‖₂ = 1/λ_min(Σ). Dense symmetric eigen-solve up to `dense_limit`,
/// inverse power iteration beyond it.
double inverse_spectral_norm(const FgnCovariance& cov, std::size_t dense_limit = 2048,
                             double rel_tol = 1e-10);

/// Large-lag expansion of the stationary fOU autocovariance
/// E[Y^ε_t Y^ε_{t+s}] ≈ ½σ² Σ_{n=1..terms} (Π_{k=0}^{2n-1}(2H−k)) (s/ε)^{2H−2n}.
/// Not defined at H = ½ (throws unsupported).
double fou_autocovariance_expansion(double hurst, double sigma, double epsilon, double lag,
                                    int terms);

/// Autocovariance of the unit stationary fOU Y_t = ∫_{-∞}^t e^{-(t-s)} dB^H_s
/// at lag s ≥ 0. r(0) = HΓ(2H). Uses an incomplete-gamma representation for
/// small lags and the optimally truncated large-lag expansion beyond.
double unit_fou_autocovariance(double hurst, double lag);

/// Stationary variance of the unit fOU, HΓ(2H) (so c_H = 2HΓ(2H)).
double unit_fou_variance(double hurst);

/// Autocovariance of Y_t = β∫_{-∞}^t e^{-λ(t-s)} dB^H_s: β²λ^{-2H} r(λ·lag).
double stationary_fou_autocovariance(double hurst, double lambda, double beta, double lag);

}  // namespace fracdiff
