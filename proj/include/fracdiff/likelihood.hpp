#pragma once

#include <memory>

#include "fracdiff/core.hpp"
#include "fracdiff/fgn_covariance.hpp"

namespace fracdiff {

/// φ_δ(θ) = (1 − e^{−θδ})/(θδ), φ_δ(0) = 1.
double relaxation_factor(double theta, double delta);
/// dφ_δ/dθ.
double relaxation_factor_derivative(double theta, double delta);

/// Observed fOU path with known H. Caches the three quadratic forms
/// ΔxᵀΣ⁻¹Δx, ΔxᵀΣ⁻¹S₋₁x and (S₋₁x)ᵀΣ⁻¹S₋₁x; every θ-dependent residual form is a
/// quadratic in a = 1 − e^{−θδ} built from them, since Δ_θx = Δx + a·S₋₁x.
class LikelihoodContext {
 public:
  LikelihoodContext(Trajectory data, double hurst);
  /// Reuses a covariance built for the data grid.
  LikelihoodContext(Trajectory data, std::shared_ptr<const FgnCovariance> covariance);

  const Trajectory& data() const noexcept { return data_; }
  double hurst() const noexcept { return covariance_->hurst(); }
  const FgnCovariance& covariance() const noexcept { return *covariance_; }
  std::size_t size() const noexcept { return data_.grid().count(); }
  double delta() const noexcept { return data_.grid().delta(); }
  double horizon() const noexcept { return data_.grid().horizon(); }

  double increments_form() const noexcept { return increments_form_; }
  double cross_form() const noexcept { return cross_form_; }
  double lagged_form() const noexcept { return lagged_form_; }

  /// (Δ_θx)ᵀΣ⁻¹(Δ_θx).
  double residual_form(double theta) const;
  /// (∂_θΔ_θx)ᵀΣ⁻¹(Δ_θx) = δe^{−θδ}(S₋₁x)ᵀΣ⁻¹(Δ_θx).
  double residual_form_slope(double theta) const;

 private:
  void cache_forms();

  Trajectory data_;
  std::shared_ptr<const FgnCovariance> covariance_;
  double increments_form_ = 0.0;
  double cross_form_ = 0.0;
  double lagged_form_ = 0.0;
};

/// −(Δ_θx)ᵀΣ⁻¹(Δ_θx)/(2σ²φ²) − N log(σφ).
double log_likelihood(const LikelihoodContext& ctx, double theta, double sigma);

struct Score {
  double theta;
  double sigma;
};

/// Gradient of δ·ℓ_δ in (θ, σ).
Score score(const LikelihoodContext& ctx, double theta, double sigma);

struct ExpansionTerms {
  double ell0;
  double ell1;
  double residual;
};

/// ℓ_δ = ℓ₀/δ + ℓ₁ + residual.
ExpansionTerms expansion_terms(const LikelihoodContext& ctx, double theta, double sigma);

/// σ̂²(θ) = (Δ_θx)ᵀΣ⁻¹(Δ_θx)/(Nφ²).
double profile_sigma2(const LikelihoodContext& ctx, double theta);

struct ProfileEstimate {
  double theta;
  double sigma;
  double log_likelihood;
};

ProfileEstimate profile_mle(const LikelihoodContext& ctx, double theta_lower, double theta_upper);

}  // namespace fracdiff
