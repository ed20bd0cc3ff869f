#pragma once

// Shared data model: observation grids, trajectories, parameter bundles,
// error kinds and reproducible random streams.

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fracdiff {

enum class ErrorKind {
  invalid_argument,
  insufficient_data,
  ill_conditioned,
  numeric_failure,
  unsupported,
  estimation_failure,
  degenerate_data,
  config_error,
  io_error,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

/// Uniform observation grid {kδ : k = 0..N} with N·δ = horizon.
class SamplingGrid {
 public:
  /// N = round(T/δ); the horizon is recomputed as N·δ.
  static SamplingGrid make(double delta, double horizon);
  static SamplingGrid with_count(double delta, std::size_t count);

  double delta() const noexcept { return delta_; }
  double horizon() const noexcept { return horizon_; }
  std::size_t count() const noexcept { return count_; }
  double time(std::size_t k) const noexcept { return static_cast<double>(k) * delta_; }

  /// Grid with step δ/factor over the same horizon.
  SamplingGrid refined(std::size_t factor) const;

  friend bool operator==(const SamplingGrid&, const SamplingGrid&) = default;

 private:
  SamplingGrid(double delta, double horizon, std::size_t count)
      : delta_(delta), horizon_(horizon), count_(count) {}
  double delta_;
  double horizon_;
  std::size_t count_;
};

/// First differences on a grid; length N.
class IncrementVector {
 public:
  IncrementVector(SamplingGrid grid, std::vector<double> deltas);
  const SamplingGrid& grid() const noexcept { return grid_; }
  std::span<const double> deltas() const noexcept { return deltas_; }
  std::size_t size() const noexcept { return deltas_.size(); }
  double operator[](std::size_t k) const { return deltas_[k]; }

 private:
  SamplingGrid grid_;
  std::vector<double> deltas_;
};

/// Path samples at every grid node including t = 0; length N + 1.
class Trajectory {
 public:
  Trajectory(SamplingGrid grid, std::vector<double> values);

  /// x_0 followed by the running sum of the increments.
  static Trajectory from_increments(const IncrementVector& inc, double x0 = 0.0);

  const SamplingGrid& grid() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t k) const { return values_[k]; }

  /// Every `step`-th node; the grid count must be divisible by `step`.
  Trajectory decimate(std::size_t step) const;
  Trajectory scaled(double factor, double shift = 0.0) const;

 private:
  SamplingGrid grid_;
  std::vector<double> values_;
};

IncrementVector increments(const Trajectory& x);

/// out[k-2] = x_k - 2x_{k-1} + x_{k-2}, k = 2..N.
std::vector<double> second_order_increments(const Trajectory& x);

struct FouParams {
  double theta = 1.0;
  double sigma = 1.0;
  double hurst = 0.5;

  void validate() const;
};

struct MultiscaleParams {
  double epsilon = 0.1;
  double alpha = 0.5;
  double sigma = 1.0;
  double hurst = 0.5;

  void validate() const;
  /// δ = ε^α.
  double delta() const;
};

void check_hurst(double hurst);

/// Identifies a reproducible random stream: (master seed, replicate index).
struct SeedSpec {
  std::uint64_t master = 0;
  std::uint64_t replicate = 0;
};

/// Fixed sub-stream offsets so independent noise sources never share draws.
enum class Stream : std::uint64_t {
  fgn = 0,
  fast_brownian = 1,
  aux = 2,
};

using Rng = std::mt19937_64;

Rng make_rng(const SeedSpec& seed, Stream stream = Stream::fgn);

/// i.i.d. standard normal vector drawn from `rng`.
std::vector<double> standard_normals(Rng& rng, std::size_t n);

}  // namespace fracdiff
