#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <vector>

#include "fracdiff/core.hpp"

namespace fracdiff {

/// A_k = Σ_{1,N}⁻¹ C^{k,0} with C^{k,0}(i,j) = γ(|k+i−j|): the covariance of the
/// window k+1..N+k of 2N unit-step fGn increments against the first N.
struct ShiftGram {
  double hurst;
  std::size_t size;
  std::size_t shift;
  Eigen::MatrixXd matrix;
  double trace() const { return matrix.trace(); }
};

/// Cross-covariance block C^{k,l} of the windows starting at k and l.
Eigen::MatrixXd shift_cross_covariance(double hurst, std::size_t n, std::size_t k, std::size_t l);

ShiftGram build_shift_gram(double hurst, std::size_t n, std::size_t k);
/// A^{k,l} = Σ⁻¹C^{k,l}.
Eigen::MatrixXd shift_gram_pair(double hurst, std::size_t n, std::size_t k, std::size_t l);

/// All A_0..A_N for one (H, N), sharing one factorization.
class ShiftGramFamily {
 public:
  ShiftGramFamily(double hurst, std::size_t n);
  double hurst() const noexcept { return hurst_; }
  std::size_t size() const noexcept { return n_; }
  const Eigen::MatrixXd& matrix(std::size_t k) const { return grams_.at(k); }
  double trace(std::size_t k) const { return traces_.at(k); }
  /// Tr(A_k A_l) = ⟨A_k, A_lᵀ⟩_F.
  double trace_product(std::size_t k, std::size_t l) const;

 private:
  double hurst_;
  std::size_t n_;
  std::vector<Eigen::MatrixXd> grams_;
  std::vector<Eigen::MatrixXd> transposes_;
  std::vector<double> traces_;
};

struct ConjectureCell {
  double hurst;
  std::size_t size;
  double trace_identity;        // Tr(A_0)
  double max_trace;             // max_{k≥1} |Tr A_k|
  std::size_t max_trace_shift;
  double max_trace_product;     // max_{k≠l} |Tr A_kA_l|
  std::size_t max_product_k;
  std::size_t max_product_l;
};

struct TraceEntry {
  double hurst;
  std::size_t size;
  std::size_t k;
  std::size_t l;  // equals k for plain traces
  bool product;
  double value;
};

struct GrowthFlag {
  double hurst;
  std::size_t from_size;
  std::size_t to_size;
  std::string statistic;  // "max_trace" or "max_trace_product"
  double factor;
};

struct ConjectureScan {
  std::vector<ConjectureCell> cells;
  std::vector<TraceEntry> table;
  /// Consecutive doublings whose maxima grew by at least the limit.
  std::vector<GrowthFlag> flags;
  std::vector<double> growth_factors;
};

/// Traces for every (H, N) cell with k, l ∈ 0..N. `full_table` also records
/// every Tr(A_kA_l); plain traces are always recorded.
ConjectureScan conjecture_scan(const std::vector<double>& hursts, const std::vector<std::size_t>& sizes,
                               double growth_limit = 1.5, bool full_table = false);

/// E(Q^{k,0}Q^{l,0}) = Tr A_k·Tr A_l + Tr A_{|k−l|} + Tr(A_kA_l).
double q_moment(const ShiftGramFamily& family, std::size_t k, std::size_t l);

struct MonteCarloEstimate {
  double mean;
  double standard_error;
  std::size_t samples;
};

/// Q^{k,0} = (P_kΔB)ᵀΣ⁻¹(P_0ΔB) over sampled 2N-windows of unit fGn.
MonteCarloEstimate q_moment_monte_carlo(double hurst, std::size_t n, std::size_t k, std::size_t l,
                                        std::size_t samples, const SeedSpec& seed);

}  // namespace fracdiff
