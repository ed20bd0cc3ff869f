#include "fracdiff/tfe.hpp"

#include <cmath>

#include "fracdiff/scalar_search.hpp"

namespace fracdiff {

void TfeInstance::validate() const {
  if (!std::isfinite(x0)) fail(ErrorKind::invalid_argument, "x0 must be finite");
  if (!(lower <= upper) || !std::isfinite(lower) || !std::isfinite(upper)) {
    fail(ErrorKind::invalid_argument, "theta bounds must form a nonempty interval");
  }
}

Trajectory averaged_trajectory(double theta, double x0, const SamplingGrid& grid) {
  std::vector<double> v(grid.count() + 1);
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = x0 * std::exp(-theta * grid.time(k));
  return Trajectory(grid, std::move(v));
}

double tfe_loss(double theta, const Trajectory& data, double x0) {
  const auto v = data.values();
  const SamplingGrid& grid = data.grid();
  double loss = 0.0;
  for (std::size_t k = 1; k < v.size(); ++k) {
    const double r = v[k] - x0 * std::exp(-theta * grid.time(k));
    loss += r * r;
  }
  return loss;
}

double tfe_estimate(const Trajectory& data, const TfeInstance& instance) {
  instance.validate();
  // With x0 = 0 the averaged path is identically zero and the loss is flat.
  if (instance.x0 == 0.0) fail(ErrorKind::estimation_failure, "loss is flat in theta when x0 = 0");
  return minimize_on_interval([&](double theta) { return tfe_loss(theta, data, instance.x0); },
                              instance.lower, instance.upper)
      .argument;
}

}  // namespace fracdiff
