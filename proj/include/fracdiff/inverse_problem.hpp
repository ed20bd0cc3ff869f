#pragma once

#include <cstddef>
#include <vector>

#include "fracdiff/core.hpp"

namespace fracdiff {

/// Slopes of a piecewise-linear driver on each grid cell.
struct CalibrationResult {
  SamplingGrid grid;
  std::vector<double> gradients;
  FouParams params;
};

/// (1 − e^{−θδ})/θ, with the limit δ at θ = 0 and a Taylor branch for θδ < 1e-8.
double relaxation_gain(double theta, double delta);

/// c_k = (B_{kδ} − B_{(k−1)δ})/δ.
CalibrationResult interpolation_calibration(const Trajectory& driver);

/// Driver slopes that the piecewise-linear fOU model needs to hit x exactly:
/// c_k = (x_k − e^{−θδ}x_{k−1}) / (σ·relaxation_gain(θ, δ)).
CalibrationResult inverse_calibration(const Trajectory& x, const FouParams& params);

/// x_k = e^{−θδ}x_{k−1} + relaxation_gain(θ, δ)·σ·c_k.
Trajectory forward_map(const CalibrationResult& calibration, const FouParams& params, double x0);

/// Driver path δ·Σ_{j≤k} c_j through the nodes, starting at 0.
Trajectory calibrated_driver(const CalibrationResult& calibration);

struct ConvergenceDiagnostic {
  std::vector<double> deltas;
  /// Rough p-variation distance between the interpolated and calibrated lifts.
  std::vector<double> distances;
  /// Mean over cells of δ|c_{B,k} − c_{x,k}|.
  std::vector<double> gradient_gaps;
};

/// One B^H path on a grid finer than δ₀2^{−levels} by `oversampling`, the fOU
/// solved on it, then for n = 0..levels the distance between the lifts of the
/// interpolated driver and of the driver recovered by inverse calibration at δₙ.
ConvergenceDiagnostic convergence_diagnostic(const SeedSpec& seed, const FouParams& params,
                                             double delta0, std::size_t levels, double p,
                                             double horizon, std::size_t oversampling = 16);

}  // namespace fracdiff
