#pragma once

#include "fracdiff/core.hpp"

namespace fracdiff {

/// Linear slow drift −θx + y with a zero-mean fast OU, so the averaged drift
/// is −θx. The estimator searches θ over [lower, upper].
struct TfeInstance {
  double x0 = 1.0;
  double lower = 0.0;
  double upper = 5.0;
  void validate() const;
};

/// X̄_t = x0·e^{−θt} at every node.
Trajectory averaged_trajectory(double theta, double x0, const SamplingGrid& grid);

/// Σ_{k=1..N} (x_k − X̄^θ_{t_k})².
double tfe_loss(double theta, const Trajectory& data, double x0);

/// argmin of tfe_loss over the instance bounds.
double tfe_estimate(const Trajectory& data, const TfeInstance& instance);

}  // namespace fracdiff
