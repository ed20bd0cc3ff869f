#include "fracdiff/fgn_covariance.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>

namespace fracdiff {

namespace {

// ½((1+x)^a − 2 + (1−x)^a) = Σ_{j≥1} C(a,2j) x^{2j}; used for large lags
// where the direct second difference cancels.
double centered_second_difference_series(double a, double x) {
  const double x2 = x * x;
  double coeff = a * (a - 1.0) / 2.0;  // C(a,2)
  double power = x2;
  double sum = coeff * power;
  for (int j = 2; j < 60; ++j) {
    const double m = 2.0 * j;
    coeff *= (a - m + 2.0) * (a - m + 1.0) / ((m - 1.0) * m);
    power *= x2;
    const double term = coeff * power;
    sum += term;
    if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

}  // namespace

double fgn_autocovariance(double hurst, double delta, std::size_t lag) {
  check_hurst(hurst);
  if (!(delta > 0.0)) fail(ErrorKind::invalid_argument, "delta must be positive");
  const double two_h = 2.0 * hurst;
  const double scale = std::pow(delta, two_h);
  if (lag == 0) return scale;
  const double k = static_cast<double>(lag);
  if (lag < 8) {
    return 0.5 * scale *
           (std::pow(k + 1.0, two_h) - 2.0 * std::pow(k, two_h) + std::pow(k - 1.0, two_h));
  }
  return scale * std::pow(k, two_h) * centered_second_difference_series(two_h, 1.0 / k);
}

std::vector<double> fgn_autocovariances(double hurst, double delta, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = fgn_autocovariance(hurst, delta, k);
  return out;
}

FgnCovariance::FgnCovariance(double hurst, double delta, std::size_t size)
    : hurst_(hurst), delta_(delta) {
  check_hurst(hurst);
  if (!(delta > 0.0)) fail(ErrorKind::invalid_argument, "delta must be positive");
  if (size == 0) fail(ErrorKind::invalid_argument, "covariance size must be >= 1");
  first_row_ = fgn_autocovariances(hurst, delta, size);
  Eigen::LLT<Eigen::MatrixXd> llt(dense());
  if (llt.info() != Eigen::Success) {
    std::ostringstream os;
    os << "Cholesky factorization failed for N=" << size << ", H=" << hurst
       << ", delta=" << delta;
    fail(ErrorKind::ill_conditioned, os.str());
  }
  lower_ = llt.matrixL();
}

double FgnCovariance::entry(std::size_t i, std::size_t j) const {
  return first_row_[i > j ? i - j : j - i];
}

Eigen::MatrixXd FgnCovariance::dense() const {
  const auto n = static_cast<Eigen::Index>(first_row_.size());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) m(i, j) = first_row_[static_cast<std::size_t>(std::abs(i - j))];
  }
  return m;
}

void FgnCovariance::check_length(std::size_t n) const {
  if (n != size()) {
    std::ostringstream os;
    os << "vector length " << n << " does not match covariance size " << size();
    fail(ErrorKind::invalid_argument, os.str());
  }
}

Eigen::VectorXd FgnCovariance::whiten(std::span<const double> u) const {
  check_length(u.size());
  Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(u.data(), static_cast<Eigen::Index>(u.size()));
  lower_.triangularView<Eigen::Lower>().solveInPlace(w);
  return w;
}

Eigen::VectorXd FgnCovariance::solve(std::span<const double> v) const {
  Eigen::VectorXd w = whiten(v);
  lower_.triangularView<Eigen::Lower>().transpose().solveInPlace(w);
  return w;
}

Eigen::VectorXd FgnCovariance::color(std::span<const double> w) const {
  check_length(w.size());
  Eigen::Map<const Eigen::VectorXd> in(w.data(), static_cast<Eigen::Index>(w.size()));
  return lower_.triangularView<Eigen::Lower>() * in;
}

double FgnCovariance::quadratic_form(std::span<const double> u, std::span<const double> v) const {
  check_length(u.size());
  check_length(v.size());
  const Eigen::VectorXd wu = whiten(u);
  if (u.data() == v.data()) return wu.squaredNorm();
  return wu.dot(whiten(v));
}

double inverse_spectral_norm(const FgnCovariance& cov, std::size_t dense_limit, double rel_tol) {
  const std::size_t n = cov.size();
  if (n == 1) return 1.0 / cov.first_row()[0];
  if (n <= dense_limit) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov.dense(), Eigen::EigenvaluesOnly);
    if (eig.info() != Eigen::Success) {
      fail(ErrorKind::numeric_failure, "symmetric eigen-solve did not converge");
    }
    const double lambda_min = eig.eigenvalues()(0);
    if (!(lambda_min > 0.0)) fail(ErrorKind::numeric_failure, "non-positive smallest eigenvalue");
    return 1.0 / lambda_min;
  }
  // Restarted Lanczos on Σ⁻¹ with full reorthogonalization; the largest Ritz
  // value converges to 1/λ_min even when the low end of the spectrum is clustered.
  const auto rows = static_cast<Eigen::Index>(n);
  const Eigen::Index basis = std::min<Eigen::Index>(rows, 120);
  Eigen::VectorXd start(rows);
  for (Eigen::Index i = 0; i < rows; ++i) start(i) = 1.0 + (i % 2 == 0 ? 1.0 : -0.5);
  start.normalize();
  double previous = 0.0;
  for (int restart = 0; restart < 200; ++restart) {
    Eigen::MatrixXd q(rows, basis);
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(basis, basis);
    q.col(0) = start;
    Eigen::Index used = basis;
    for (Eigen::Index j = 0; j < basis; ++j) {
      Eigen::VectorXd w = cov.solve(std::vector<double>(q.col(j).data(), q.col(j).data() + rows));
      for (int pass = 0; pass < 2; ++pass) {
        const Eigen::VectorXd c = q.leftCols(j + 1).transpose() * w;
        w -= q.leftCols(j + 1) * c;
        t.col(j).head(j + 1) += c;
      }
      if (j + 1 == basis) break;
      const double beta = w.norm();
      if (beta <= 1e-14 * std::abs(t(j, j))) {
        used = j + 1;
        break;
      }
      t(j + 1, j) = beta;
      q.col(j + 1) = w / beta;
    }
    const Eigen::MatrixXd tri = 0.5 * (t.topLeftCorner(used, used) + t.topLeftCorner(used, used).transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(tri);
    const double ritz = eig.eigenvalues()(used - 1);
    if (used < basis || used == rows || std::abs(ritz - previous) <= rel_tol * ritz) return ritz;
    previous = ritz;
    start = (q.leftCols(used) * eig.eigenvectors().col(used - 1)).normalized();
  }
  fail(ErrorKind::numeric_failure, "Lanczos iteration did not converge");
}

}  // namespace fracdiff
