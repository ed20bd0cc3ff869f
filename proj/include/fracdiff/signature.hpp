#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

#include "fracdiff/core.hpp"

namespace fracdiff {

using Word = std::vector<std::size_t>;

/// Element of T^{(n)}(R^d), n ≤ 3. Level k is stored as a flat row-major
/// array of size d^k; the level-0 scalar is kept explicitly.
class TruncatedTensor {
 public:
  static constexpr std::size_t kMaxLevel = 3;

  /// Unit tensor (1, 0, …, 0).
  TruncatedTensor(std::size_t dimension, std::size_t level);

  std::size_t dimension() const noexcept { return dimension_; }
  std::size_t level() const noexcept { return levels_.size() - 1; }

  std::span<const double> component(std::size_t k) const { return levels_.at(k); }
  std::span<double> component(std::size_t k) { return levels_.at(k); }

  /// Z^{i₁…i_k}; the empty word gives the level-0 scalar.
  double coefficient(const Word& word) const;
  double& coefficient(const Word& word);

  /// Largest absolute entry over all levels.
  double max_abs() const;

  friend TruncatedTensor operator*(const TruncatedTensor& a, const TruncatedTensor& b);
  friend TruncatedTensor operator-(const TruncatedTensor& a, const TruncatedTensor& b);

 private:
  std::size_t flat_index(const Word& word) const;

  std::size_t dimension_;
  std::vector<std::vector<double>> levels_;
};

TruncatedTensor tensor_multiply(const TruncatedTensor& a, const TruncatedTensor& b);

/// Tensor exponential of a straight segment: level k = Δ^{⊗k}/k!.
TruncatedTensor segment_signature(std::span<const double> increment, std::size_t level);

/// Continuous path, linear on every grid cell. Row k of `gradients` is the slope
/// on cell k+1, so node k sits at start + δ·Σ_{j≤k} c_j.
class PiecewiseLinearPath {
 public:
  PiecewiseLinearPath(SamplingGrid grid, Eigen::VectorXd start, Eigen::MatrixXd gradients);
  /// Interpolates (N+1)×d node values.
  static PiecewiseLinearPath through_nodes(SamplingGrid grid, const Eigen::MatrixXd& nodes);
  /// Scalar path through a trajectory's values.
  static PiecewiseLinearPath through_nodes(const Trajectory& x);

  const SamplingGrid& grid() const noexcept { return grid_; }
  std::size_t dimension() const noexcept { return static_cast<std::size_t>(start_.size()); }
  const Eigen::MatrixXd& gradients() const noexcept { return gradients_; }
  Eigen::VectorXd node(std::size_t k) const;
  /// (N+1)×d matrix of node values.
  Eigen::MatrixXd nodes() const;

 private:
  SamplingGrid grid_;
  Eigen::VectorXd start_;
  Eigen::MatrixXd gradients_;
};

/// Signature over nodes s < t: ordered product of the cell signatures.
TruncatedTensor pwl_signature(const PiecewiseLinearPath& path, std::size_t level, std::size_t s,
                              std::size_t t);

/// All interleavings of two words (with multiplicity).
std::vector<Word> shuffles(const Word& u, const Word& v);

/// |Z^u·Z^v − Σ_{w ∈ u ⧢ v} Z^w|.
double shuffle_residual(const TruncatedTensor& sig, const Word& u, const Word& v);

/// Exact sup over node partitions of (Σ|z_{t_i} − z_{t_{i−1}}|^p)^{1/p}.
double p_variation_norm(std::span<const double> samples, double p);
/// Euclidean norm of increments; rows are points in R^d.
double p_variation_norm(const Eigen::MatrixXd& samples, double p);

/// Scalar path lifted to level 2 or 3 by Z^m_{st} = (z_t − z_s)^m / m!.
class ScalarRoughLift {
 public:
  ScalarRoughLift(std::vector<double> base, std::size_t level, double p);
  std::span<const double> base() const noexcept { return base_; }
  std::size_t level() const noexcept { return level_; }
  double p() const noexcept { return p_; }
  double increment(std::size_t m, std::size_t s, std::size_t t) const;

 private:
  std::vector<double> base_;
  std::size_t level_;
  double p_;
};

/// Lift level for a driver of regularity H: 2 above ⅓, 3 on (¼, ⅓].
std::size_t lift_level_for_hurst(double hurst);

/// max_m (sup_partition Σ|a^m_{st} − b^m_{st}|^{p/m})^{m/p}.
double rough_pvar_distance(const ScalarRoughLift& a, const ScalarRoughLift& b);

/// sup_{s<t} |(a−b)_{st}| / |t−s|^α over nodes spaced δ apart.
double holder_distance(std::span<const double> a, std::span<const double> b, double alpha,
                       double delta);
/// max_m sup_{s<t} |a^m_{st} − b^m_{st}| / |t−s|^{mα}.
double rough_holder_distance(const ScalarRoughLift& a, const ScalarRoughLift& b, double alpha,
                             double delta);

}  // namespace fracdiff
