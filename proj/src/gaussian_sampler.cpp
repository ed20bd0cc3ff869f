#include "fracdiff/gaussian_sampler.hpp"

#include <fftw3.h>

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>

#include "fracdiff/fgn_covariance.hpp"

namespace fracdiff {

namespace {

// FFTW planning is not thread-safe; execution on distinct arrays is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftBuffer {
  explicit FftBuffer(std::size_t n) : data(fftw_alloc_complex(n)), size(n) {
    if (data == nullptr) fail(ErrorKind::numeric_failure, "FFT buffer allocation failed");
  }
  ~FftBuffer() { fftw_free(data); }
  FftBuffer(const FftBuffer&) = delete;
  FftBuffer& operator=(const FftBuffer&) = delete;
  fftw_complex* data;
  std::size_t size;
};

void forward_fft(FftBuffer& buf) {
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan = fftw_plan_dft_1d(static_cast<int>(buf.size), buf.data, buf.data, FFTW_FORWARD,
                            FFTW_ESTIMATE);
  }
  if (plan == nullptr) fail(ErrorKind::numeric_failure, "FFT plan creation failed");
  fftw_execute(plan);
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(plan);
}

std::size_t next_power_of_two(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace

StationaryGaussianSampler::StationaryGaussianSampler(const Autocovariance& autocov, std::size_t n,
                                                     Method method)
    : n_(n), method_(method) {
  if (n == 0) fail(ErrorKind::invalid_argument, "sample length must be >= 1");
  if (method_ == Method::automatic) {
    method_ = n <= kCholeskyLimit ? Method::cholesky : Method::circulant;
  }
  switch (method_) {
    case Method::white: {
      const double c0 = autocov(0);
      if (!(c0 >= 0.0)) fail(ErrorKind::invalid_argument, "negative variance");
      white_scale_ = std::sqrt(c0);
      break;
    }
    case Method::cholesky: {
      std::vector<double> row(n);
      for (std::size_t k = 0; k < n; ++k) row[k] = autocov(k);
      build_cholesky(row);
      break;
    }
    case Method::circulant:
      build_circulant(autocov);
      break;
    case Method::automatic:
      break;
  }
}

void StationaryGaussianSampler::build_cholesky(const std::vector<double>& row) {
  const auto n = static_cast<Eigen::Index>(row.size());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) m(i, j) = row[static_cast<std::size_t>(std::abs(i - j))];
  }
  if (row[0] == 0.0) {
    lower_ = Eigen::MatrixXd::Zero(n, n);
    return;
  }
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) {
    std::ostringstream os;
    os << "Cholesky factorization of a " << n << "x" << n << " autocovariance failed";
    fail(ErrorKind::ill_conditioned, os.str());
  }
  lower_ = llt.matrixL();
}

void StationaryGaussianSampler::build_circulant(const Autocovariance& autocov) {
  // Embedding length m = 2(n'−1) with n' ≥ n; doubled until the circulant
  // spectrum is nonnegative up to rounding.
  std::size_t m = next_power_of_two(2 * std::max<std::size_t>(n_ - 1, 1));
  std::vector<double> cache;
  for (int attempt = 0; attempt < 6; ++attempt, m *= 2) {
    const std::size_t half = m / 2;
    while (cache.size() <= half) cache.push_back(autocov(cache.size()));
    FftBuffer buf(m);
    for (std::size_t j = 0; j < m; ++j) {
      buf.data[j][0] = cache[j <= half ? j : m - j];
      buf.data[j][1] = 0.0;
    }
    forward_fft(buf);
    double largest = 0.0;
    double most_negative = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      largest = std::max(largest, buf.data[j][0]);
      most_negative = std::min(most_negative, buf.data[j][0]);
    }
    if (most_negative >= -1e-10 * std::max(largest, 1e-300)) {
      sqrt_eigen_.resize(m);
      const double md = static_cast<double>(m);
      for (std::size_t j = 0; j < m; ++j) {
        sqrt_eigen_[j] = std::sqrt(std::max(buf.data[j][0], 0.0) / md);
      }
      return;
    }
  }
  std::ostringstream os;
  os << "circulant embedding of length " << n_ << " is not nonnegative definite";
  fail(ErrorKind::numeric_failure, os.str());
}

std::vector<double> StationaryGaussianSampler::sample(Rng& rng) const {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> out(n_);
  switch (method_) {
    case Method::white:
      for (double& v : out) v = white_scale_ * normal(rng);
      break;
    case Method::cholesky: {
      const Eigen::VectorXd z = Eigen::Map<const Eigen::VectorXd>(
          standard_normals(rng, n_).data(), static_cast<Eigen::Index>(n_));
      Eigen::Map<Eigen::VectorXd>(out.data(), static_cast<Eigen::Index>(n_)) =
          lower_.triangularView<Eigen::Lower>() * z;
      break;
    }
    case Method::circulant: {
      const std::size_t m = sqrt_eigen_.size();
      FftBuffer buf(m);
      for (std::size_t j = 0; j < m; ++j) {
        const double re = normal(rng);
        const double im = normal(rng);
        buf.data[j][0] = sqrt_eigen_[j] * re;
        buf.data[j][1] = sqrt_eigen_[j] * im;
      }
      forward_fft(buf);
      for (std::size_t k = 0; k < n_; ++k) out[k] = buf.data[k][0];
      break;
    }
    case Method::automatic:
      break;
  }
  return out;
}

StationaryGaussianSampler make_fgn_sampler(double hurst, double delta, std::size_t n,
                                           StationaryGaussianSampler::Method method) {
  check_hurst(hurst);
  if (!(delta > 0.0)) fail(ErrorKind::invalid_argument, "delta must be positive");
  using Method = StationaryGaussianSampler::Method;
  if (hurst == 0.5 && method == Method::automatic) method = Method::white;
  return StationaryGaussianSampler(
      [hurst, delta](std::size_t k) { return fgn_autocovariance(hurst, delta, k); }, n, method);
}

}  // namespace fracdiff
