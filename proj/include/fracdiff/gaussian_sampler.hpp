#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <vector>

#include "fracdiff/core.hpp"

namespace fracdiff {

/// Exact sampler for a zero-mean stationary Gaussian sequence of length n with
/// a given autocovariance. Small sizes multiply a cached Cholesky factor into
/// an i.i.d. normal vector; large sizes use circulant embedding (Davies–Harte).
class StationaryGaussianSampler {
 public:
  enum class Method { automatic, cholesky, circulant, white };

  static constexpr std::size_t kCholeskyLimit = 2048;

  using Autocovariance = std::function<double(std::size_t)>;

  StationaryGaussianSampler(const Autocovariance& autocov, std::size_t n,
                            Method method = Method::automatic);

  std::size_t size() const noexcept { return n_; }
  Method method() const noexcept { return method_; }
  /// Length of the circulant embedding (0 unless method() == circulant).
  std::size_t embedding_size() const noexcept { return sqrt_eigen_.size(); }

  std::vector<double> sample(Rng& rng) const;

 private:
  void build_cholesky(const std::vector<double>& row);
  void build_circulant(const Autocovariance& autocov);

  std::size_t n_;
  Method method_;
  double white_scale_ = 0.0;
  Eigen::MatrixXd lower_;
  std::vector<double> sqrt_eigen_;
};

/// fGn sampler at step δ; i.i.d. when H = ½.
StationaryGaussianSampler make_fgn_sampler(double hurst, double delta, std::size_t n,
                                           StationaryGaussianSampler::Method method =
                                               StationaryGaussianSampler::Method::automatic);

}  // namespace fracdiff
