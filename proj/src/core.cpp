#include "fracdiff/core.hpp"

#include <cmath>
#include <sstream>

namespace fracdiff {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::insufficient_data: return "insufficient-data";
    case ErrorKind::ill_conditioned: return "ill-conditioned";
    case ErrorKind::numeric_failure: return "numeric-failure";
    case ErrorKind::unsupported: return "unsupported";
    case ErrorKind::estimation_failure: return "estimation-failure";
    case ErrorKind::degenerate_data: return "degenerate-data";
    case ErrorKind::config_error: return "config-error";
    case ErrorKind::io_error: return "io-error";
  }
  return "unknown";
}

void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, std::string(to_string(kind)) + ": " + what);
}

SamplingGrid SamplingGrid::make(double delta, double horizon) {
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    fail(ErrorKind::invalid_argument, "grid step must be positive");
  }
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    fail(ErrorKind::invalid_argument, "grid horizon must be positive");
  }
  const double ratio = std::round(horizon / delta);
  if (ratio < 1.0) {
    fail(ErrorKind::invalid_argument, "grid horizon shorter than one step");
  }
  const auto count = static_cast<std::size_t>(ratio);
  return SamplingGrid(delta, static_cast<double>(count) * delta, count);
}

SamplingGrid SamplingGrid::with_count(double delta, std::size_t count) {
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    fail(ErrorKind::invalid_argument, "grid step must be positive");
  }
  if (count == 0) fail(ErrorKind::invalid_argument, "grid needs at least one cell");
  return SamplingGrid(delta, static_cast<double>(count) * delta, count);
}

SamplingGrid SamplingGrid::refined(std::size_t factor) const {
  if (factor == 0) fail(ErrorKind::invalid_argument, "refinement factor must be >= 1");
  return with_count(delta_ / static_cast<double>(factor), count_ * factor);
}

IncrementVector::IncrementVector(SamplingGrid grid, std::vector<double> deltas)
    : grid_(grid), deltas_(std::move(deltas)) {
  if (deltas_.size() != grid_.count()) {
    fail(ErrorKind::invalid_argument, "increment vector length must equal grid count");
  }
  for (double d : deltas_) {
    if (!std::isfinite(d)) fail(ErrorKind::invalid_argument, "non-finite increment");
  }
}

Trajectory::Trajectory(SamplingGrid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.count() + 1) {
    std::ostringstream os;
    os << "trajectory length " << values_.size() << " does not match grid count "
       << grid_.count() << " + 1";
    fail(ErrorKind::invalid_argument, os.str());
  }
  for (double v : values_) {
    if (!std::isfinite(v)) fail(ErrorKind::invalid_argument, "non-finite trajectory value");
  }
}

Trajectory Trajectory::from_increments(const IncrementVector& inc, double x0) {
  std::vector<double> values(inc.size() + 1);
  values[0] = x0;
  for (std::size_t k = 0; k < inc.size(); ++k) values[k + 1] = values[k] + inc[k];
  return Trajectory(inc.grid(), std::move(values));
}

Trajectory Trajectory::decimate(std::size_t step) const {
  if (step == 0 || grid_.count() % step != 0) {
    fail(ErrorKind::invalid_argument, "decimation step must divide the grid count");
  }
  const std::size_t n = grid_.count() / step;
  std::vector<double> out(n + 1);
  for (std::size_t k = 0; k <= n; ++k) out[k] = values_[k * step];
  return Trajectory(SamplingGrid::with_count(grid_.delta() * static_cast<double>(step), n),
                    std::move(out));
}

Trajectory Trajectory::scaled(double factor, double shift) const {
  std::vector<double> out(values_);
  for (double& v : out) v = shift + factor * v;
  return Trajectory(grid_, std::move(out));
}

IncrementVector increments(const Trajectory& x) {
  const auto v = x.values();
  std::vector<double> d(v.size() - 1);
  for (std::size_t k = 1; k < v.size(); ++k) d[k - 1] = v[k] - v[k - 1];
  return IncrementVector(x.grid(), std::move(d));
}

std::vector<double> second_order_increments(const Trajectory& x) {
  if (x.grid().count() < 2) {
    fail(ErrorKind::insufficient_data, "second-order increments need N >= 2");
  }
  const auto v = x.values();
  std::vector<double> out(v.size() - 2);
  for (std::size_t k = 2; k < v.size(); ++k) out[k - 2] = v[k] - 2.0 * v[k - 1] + v[k - 2];
  return out;
}

void check_hurst(double hurst) {
  if (!(hurst > 0.0 && hurst < 1.0)) {
    std::ostringstream os;
    os << "Hurst index must lie in (0,1), got " << hurst;
    fail(ErrorKind::invalid_argument, os.str());
  }
}

void FouParams::validate() const {
  check_hurst(hurst);
  if (!(sigma > 0.0)) fail(ErrorKind::invalid_argument, "sigma must be positive");
  if (!(theta >= 0.0) || !std::isfinite(theta)) {
    fail(ErrorKind::invalid_argument, "theta must be non-negative");
  }
}

void MultiscaleParams::validate() const {
  check_hurst(hurst);
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    fail(ErrorKind::invalid_argument, "epsilon must lie in (0,1)");
  }
  if (!(alpha > 0.0)) fail(ErrorKind::invalid_argument, "alpha must be positive");
  if (!(sigma > 0.0)) fail(ErrorKind::invalid_argument, "sigma must be positive");
}

double MultiscaleParams::delta() const { return std::pow(epsilon, alpha); }

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace

Rng make_rng(const SeedSpec& seed, Stream stream) {
  std::uint64_t state = seed.master;
  std::uint64_t words[4];
  words[0] = splitmix64(state);
  state ^= seed.replicate * 0xD1B54A32D192ED03ull;
  words[1] = splitmix64(state);
  state ^= static_cast<std::uint64_t>(stream) * 0x8CB92BA72F3D8DD7ull;
  words[2] = splitmix64(state);
  words[3] = splitmix64(state);
  std::seed_seq seq{static_cast<std::uint32_t>(words[0]), static_cast<std::uint32_t>(words[0] >> 32),
                    static_cast<std::uint32_t>(words[1]), static_cast<std::uint32_t>(words[1] >> 32),
                    static_cast<std::uint32_t>(words[2]), static_cast<std::uint32_t>(words[2] >> 32),
                    static_cast<std::uint32_t>(words[3]), static_cast<std::uint32_t>(words[3] >> 32)};
  return Rng(seq);
}

std::vector<double> standard_normals(Rng& rng, std::size_t n) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> z(n);
  for (double& v : z) v = normal(rng);
  return z;
}

}  // namespace fracdiff
