#include "fracdiff/spectral_conjecture.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fracdiff/fgn_covariance.hpp"
#include "fracdiff/gaussian_sampler.hpp"

namespace fracdiff {

namespace {

void check_shift(std::size_t n, std::size_t k) {
  if (n == 0) fail(ErrorKind::invalid_argument, "window size must be >= 1");
  if (k > n) {
    std::ostringstream os;
    os << "shift " << k << " exceeds the window size " << n;
    fail(ErrorKind::invalid_argument, os.str());
  }
}

Eigen::LLT<Eigen::MatrixXd> unit_factor(double hurst, std::size_t n) {
  const FgnCovariance cov(hurst, 1.0, n);
  Eigen::LLT<Eigen::MatrixXd> llt(cov.dense());
  if (llt.info() != Eigen::Success) {
    std::ostringstream os;
    os << "Cholesky factorization failed for N=" << n << ", H=" << hurst << ", delta=1";
    fail(ErrorKind::ill_conditioned, os.str());
  }
  return llt;
}

}  // namespace

Eigen::MatrixXd shift_cross_covariance(double hurst, std::size_t n, std::size_t k, std::size_t l) {
  check_shift(n, k);
  check_shift(n, l);
  const std::vector<double> gamma = fgn_autocovariances(hurst, 1.0, 2 * n);
  const auto size = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd c(size, size);
  for (Eigen::Index j = 0; j < size; ++j) {
    for (Eigen::Index i = 0; i < size; ++i) {
      const long long lag = static_cast<long long>(k) + i - static_cast<long long>(l) - j;
      c(i, j) = gamma[static_cast<std::size_t>(std::llabs(lag))];
    }
  }
  return c;
}

ShiftGram build_shift_gram(double hurst, std::size_t n, std::size_t k) {
  return ShiftGram{hurst, n, k, shift_gram_pair(hurst, n, k, 0)};
}

Eigen::MatrixXd shift_gram_pair(double hurst, std::size_t n, std::size_t k, std::size_t l) {
  check_hurst(hurst);
  return unit_factor(hurst, n).solve(shift_cross_covariance(hurst, n, k, l));
}

ShiftGramFamily::ShiftGramFamily(double hurst, std::size_t n) : hurst_(hurst), n_(n) {
  check_hurst(hurst);
  check_shift(n, 0);
  const Eigen::LLT<Eigen::MatrixXd> llt = unit_factor(hurst, n);
  grams_.reserve(n + 1);
  transposes_.reserve(n + 1);
  traces_.reserve(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    grams_.push_back(llt.solve(shift_cross_covariance(hurst, n, k, 0)));
    transposes_.push_back(grams_.back().transpose());
    traces_.push_back(grams_.back().trace());
  }
}

double ShiftGramFamily::trace_product(std::size_t k, std::size_t l) const {
  return grams_.at(k).cwiseProduct(transposes_.at(l)).sum();
}

ConjectureScan conjecture_scan(const std::vector<double>& hursts,
                               const std::vector<std::size_t>& sizes, double growth_limit,
                               bool full_table) {
  std::vector<std::size_t> ordered(sizes);
  std::sort(ordered.begin(), ordered.end());
  ConjectureScan scan;
  for (double hurst : hursts) {
    const ConjectureCell* previous = nullptr;
    std::size_t first_cell = scan.cells.size();
    for (std::size_t n : ordered) {
      const ShiftGramFamily family(hurst, n);
      ConjectureCell cell{hurst, n, family.trace(0), 0.0, 0, 0.0, 0, 0};
      for (std::size_t k = 0; k <= n; ++k) {
        scan.table.push_back(TraceEntry{hurst, n, k, k, false, family.trace(k)});
        if (k >= 1 && std::abs(family.trace(k)) > cell.max_trace) {
          cell.max_trace = std::abs(family.trace(k));
          cell.max_trace_shift = k;
        }
      }
      for (std::size_t k = 0; k <= n; ++k) {
        for (std::size_t l = k + 1; l <= n; ++l) {
          const double v = family.trace_product(k, l);
          if (full_table) scan.table.push_back(TraceEntry{hurst, n, k, l, true, v});
          if (std::abs(v) > cell.max_trace_product) {
            cell.max_trace_product = std::abs(v);
            cell.max_product_k = k;
            cell.max_product_l = l;
          }
        }
      }
      scan.cells.push_back(cell);
      previous = scan.cells.size() > first_cell + 1 ? &scan.cells[scan.cells.size() - 2] : nullptr;
      if (previous != nullptr) {
        const double ratio = static_cast<double>(n) / static_cast<double>(previous->size);
        if (ratio > 1.0) {
          const double f_trace = cell.max_trace / previous->max_trace;
          const double f_prod = cell.max_trace_product / previous->max_trace_product;
          scan.growth_factors.push_back(f_trace);
          scan.growth_factors.push_back(f_prod);
          if (!(f_trace < growth_limit)) {
            scan.flags.push_back({hurst, previous->size, n, "max_trace", f_trace});
          }
          if (!(f_prod < growth_limit)) {
            scan.flags.push_back({hurst, previous->size, n, "max_trace_product", f_prod});
          }
        }
      }
    }
  }
  return scan;
}

double q_moment(const ShiftGramFamily& family, std::size_t k, std::size_t l) {
  const std::size_t gap = k > l ? k - l : l - k;
  return family.trace(k) * family.trace(l) + family.trace(gap) + family.trace_product(k, l);
}

MonteCarloEstimate q_moment_monte_carlo(double hurst, std::size_t n, std::size_t k, std::size_t l,
                                        std::size_t samples, const SeedSpec& seed) {
  check_shift(n, k);
  check_shift(n, l);
  if (samples < 2) fail(ErrorKind::invalid_argument, "need at least two Monte Carlo samples");
  const FgnCovariance window(hurst, 1.0, n);
  const StationaryGaussianSampler sampler = make_fgn_sampler(hurst, 1.0, 2 * n);
  Rng rng = make_rng(seed, Stream::fgn);
  double mean = 0.0;
  double m2 = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    const std::vector<double> z = sampler.sample(rng);
    const std::span<const double> all(z);
    const Eigen::VectorXd base = window.solve(all.subspan(0, n));
    const Eigen::Map<const Eigen::VectorXd> wk(z.data() + k, static_cast<Eigen::Index>(n));
    const Eigen::Map<const Eigen::VectorXd> wl(z.data() + l, static_cast<Eigen::Index>(n));
    const double value = wk.dot(base) * wl.dot(base);
    const double d = value - mean;
    mean += d / static_cast<double>(s + 1);
    m2 += d * (value - mean);
  }
  const double var = m2 / static_cast<double>(samples - 1);
  return MonteCarloEstimate{mean, std::sqrt(var / static_cast<double>(samples)), samples};
}

}  // namespace fracdiff
