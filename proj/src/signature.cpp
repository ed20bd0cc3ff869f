#include "fracdiff/signature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace fracdiff {

namespace {

std::size_t power(std::size_t base, std::size_t exp) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < exp; ++i) r *= base;
  return r;
}

void require_same_shape(const TruncatedTensor& a, const TruncatedTensor& b) {
  if (a.dimension() != b.dimension() || a.level() != b.level()) {
    std::ostringstream os;
    os << "tensor shapes differ: (d=" << a.dimension() << ", n=" << a.level() << ") vs (d="
       << b.dimension() << ", n=" << b.level() << ")";
    fail(ErrorKind::invalid_argument, os.str());
  }
}

// V(j) = max_{i<j} V(i) + cost(i, j); returns V(last).
template <class Cost>
double partition_sup(std::size_t count, Cost cost) {
  if (count < 2) return 0.0;
  std::vector<double> best(count, 0.0);
  for (std::size_t j = 1; j < count; ++j) {
    double v = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < j; ++i) v = std::max(v, best[i] + cost(i, j));
    best[j] = v;
  }
  return best[count - 1];
}

}  // namespace

TruncatedTensor::TruncatedTensor(std::size_t dimension, std::size_t level)
    : dimension_(dimension) {
  if (dimension == 0) fail(ErrorKind::invalid_argument, "tensor dimension must be >= 1");
  if (level < 1 || level > kMaxLevel) {
    fail(ErrorKind::invalid_argument, "truncation level must be 1, 2 or 3");
  }
  levels_.resize(level + 1);
  for (std::size_t k = 0; k <= level; ++k) levels_[k].assign(power(dimension, k), 0.0);
  levels_[0][0] = 1.0;
}

std::size_t TruncatedTensor::flat_index(const Word& word) const {
  if (word.size() > level()) fail(ErrorKind::invalid_argument, "word longer than the truncation");
  std::size_t idx = 0;
  for (std::size_t letter : word) {
    if (letter >= dimension_) fail(ErrorKind::invalid_argument, "letter outside the alphabet");
    idx = idx * dimension_ + letter;
  }
  return idx;
}

double TruncatedTensor::coefficient(const Word& word) const {
  return levels_[word.size()][flat_index(word)];
}

double& TruncatedTensor::coefficient(const Word& word) {
  return levels_[word.size()][flat_index(word)];
}

double TruncatedTensor::max_abs() const {
  double m = 0.0;
  for (const auto& lvl : levels_) {
    for (double v : lvl) m = std::max(m, std::abs(v));
  }
  return m;
}

TruncatedTensor operator*(const TruncatedTensor& a, const TruncatedTensor& b) {
  require_same_shape(a, b);
  TruncatedTensor c(a.dimension(), a.level());
  c.levels_[0][0] = 0.0;
  for (std::size_t k = 0; k <= a.level(); ++k) {
    auto& out = c.levels_[k];
    for (std::size_t i = 0; i <= k; ++i) {
      const auto& left = a.levels_[i];
      const auto& right = b.levels_[k - i];
      const std::size_t width = right.size();
      for (std::size_t p = 0; p < left.size(); ++p) {
        if (left[p] == 0.0) continue;
        for (std::size_t q = 0; q < width; ++q) out[p * width + q] += left[p] * right[q];
      }
    }
  }
  return c;
}

TruncatedTensor operator-(const TruncatedTensor& a, const TruncatedTensor& b) {
  require_same_shape(a, b);
  TruncatedTensor c(a);
  for (std::size_t k = 0; k <= a.level(); ++k) {
    for (std::size_t i = 0; i < c.levels_[k].size(); ++i) c.levels_[k][i] -= b.levels_[k][i];
  }
  return c;
}

TruncatedTensor tensor_multiply(const TruncatedTensor& a, const TruncatedTensor& b) {
  return a * b;
}

TruncatedTensor segment_signature(std::span<const double> increment, std::size_t level) {
  TruncatedTensor sig(increment.size(), level);
  const std::size_t d = increment.size();
  for (std::size_t k = 1; k <= level; ++k) {
    const auto prev = sig.component(k - 1);
    auto cur = sig.component(k);
    const double inv_k = 1.0 / static_cast<double>(k);
    for (std::size_t p = 0; p < prev.size(); ++p) {
      for (std::size_t q = 0; q < d; ++q) cur[p * d + q] = prev[p] * increment[q] * inv_k;
    }
  }
  return sig;
}

PiecewiseLinearPath::PiecewiseLinearPath(SamplingGrid grid, Eigen::VectorXd start,
                                         Eigen::MatrixXd gradients)
    : grid_(grid), start_(std::move(start)), gradients_(std::move(gradients)) {
  if (start_.size() == 0) fail(ErrorKind::invalid_argument, "path dimension must be >= 1");
  if (static_cast<std::size_t>(gradients_.rows()) != grid_.count() ||
      gradients_.cols() != start_.size()) {
    fail(ErrorKind::invalid_argument, "gradient matrix must be N x d");
  }
  if (!gradients_.allFinite() || !start_.allFinite()) {
    fail(ErrorKind::invalid_argument, "non-finite path data");
  }
}

PiecewiseLinearPath PiecewiseLinearPath::through_nodes(SamplingGrid grid,
                                                       const Eigen::MatrixXd& nodes) {
  if (static_cast<std::size_t>(nodes.rows()) != grid.count() + 1) {
    fail(ErrorKind::invalid_argument, "node matrix must have N+1 rows");
  }
  const Eigen::Index n = nodes.rows() - 1;
  Eigen::MatrixXd grads = (nodes.bottomRows(n) - nodes.topRows(n)) / grid.delta();
  return PiecewiseLinearPath(grid, nodes.row(0).transpose(), std::move(grads));
}

PiecewiseLinearPath PiecewiseLinearPath::through_nodes(const Trajectory& x) {
  const auto v = x.values();
  Eigen::MatrixXd nodes = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
  return through_nodes(x.grid(), nodes);
}

Eigen::VectorXd PiecewiseLinearPath::node(std::size_t k) const {
  if (k > grid_.count()) fail(ErrorKind::invalid_argument, "node index beyond the grid");
  Eigen::VectorXd v = start_;
  for (std::size_t j = 0; j < k; ++j) v += grid_.delta() * gradients_.row(static_cast<Eigen::Index>(j)).transpose();
  return v;
}

Eigen::MatrixXd PiecewiseLinearPath::nodes() const {
  const auto n = static_cast<Eigen::Index>(grid_.count());
  Eigen::MatrixXd out(n + 1, start_.size());
  out.row(0) = start_.transpose();
  for (Eigen::Index k = 0; k < n; ++k) out.row(k + 1) = out.row(k) + grid_.delta() * gradients_.row(k);
  return out;
}

TruncatedTensor pwl_signature(const PiecewiseLinearPath& path, std::size_t level, std::size_t s,
                              std::size_t t) {
  if (!(s < t) || t > path.grid().count()) {
    std::ostringstream os;
    os << "span (" << s << ", " << t << ") is not an increasing pair of grid nodes";
    fail(ErrorKind::invalid_argument, os.str());
  }
  const std::size_t d = path.dimension();
  TruncatedTensor sig(d, level);
  std::vector<double> step(d);
  for (std::size_t k = s; k < t; ++k) {
    for (std::size_t i = 0; i < d; ++i) {
      step[i] = path.grid().delta() * path.gradients()(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i));
    }
    sig = sig * segment_signature(step, level);
  }
  return sig;
}

std::vector<Word> shuffles(const Word& u, const Word& v) {
  if (u.empty()) return {v};
  if (v.empty()) return {u};
  std::vector<Word> out;
  const Word u_tail(u.begin() + 1, u.end());
  const Word v_tail(v.begin() + 1, v.end());
  for (Word w : shuffles(u_tail, v)) {
    w.insert(w.begin(), u.front());
    out.push_back(std::move(w));
  }
  for (Word w : shuffles(u, v_tail)) {
    w.insert(w.begin(), v.front());
    out.push_back(std::move(w));
  }
  return out;
}

double shuffle_residual(const TruncatedTensor& sig, const Word& u, const Word& v) {
  if (u.size() + v.size() > sig.level()) {
    fail(ErrorKind::invalid_argument, "combined word length exceeds the truncation level");
  }
  double sum = 0.0;
  for (const Word& w : shuffles(u, v)) sum += sig.coefficient(w);
  return std::abs(sig.coefficient(u) * sig.coefficient(v) - sum);
}

double p_variation_norm(std::span<const double> samples, double p) {
  if (!(p >= 1.0)) fail(ErrorKind::invalid_argument, "p-variation needs p >= 1");
  const double total = partition_sup(samples.size(), [&](std::size_t i, std::size_t j) {
    return std::pow(std::abs(samples[j] - samples[i]), p);
  });
  return std::pow(total, 1.0 / p);
}

double p_variation_norm(const Eigen::MatrixXd& samples, double p) {
  if (!(p >= 1.0)) fail(ErrorKind::invalid_argument, "p-variation needs p >= 1");
  const double total = partition_sup(static_cast<std::size_t>(samples.rows()),
                                     [&](std::size_t i, std::size_t j) {
                                       const auto a = static_cast<Eigen::Index>(i);
                                       const auto b = static_cast<Eigen::Index>(j);
                                       return std::pow((samples.row(b) - samples.row(a)).norm(), p);
                                     });
  return std::pow(total, 1.0 / p);
}

ScalarRoughLift::ScalarRoughLift(std::vector<double> base, std::size_t level, double p)
    : base_(std::move(base)), level_(level), p_(p) {
  if (level < 1 || level > TruncatedTensor::kMaxLevel) {
    fail(ErrorKind::invalid_argument, "lift level must be 1, 2 or 3");
  }
  if (!(p >= 1.0)) fail(ErrorKind::invalid_argument, "p must be >= 1");
  if (base_.empty()) fail(ErrorKind::invalid_argument, "empty base path");
}

double ScalarRoughLift::increment(std::size_t m, std::size_t s, std::size_t t) const {
  const double dz = base_[t] - base_[s];
  return m == 1 ? dz : m == 2 ? 0.5 * dz * dz : dz * dz * dz / 6.0;
}

std::size_t lift_level_for_hurst(double hurst) {
  check_hurst(hurst);
  if (hurst > 1.0 / 3.0) return 2;
  if (hurst > 0.25) return 3;
  fail(ErrorKind::unsupported, "lifts are only provided for H > 1/4");
}

double rough_pvar_distance(const ScalarRoughLift& a, const ScalarRoughLift& b) {
  if (a.base().size() != b.base().size() || a.level() != b.level()) {
    fail(ErrorKind::invalid_argument, "rough lifts live on different grids or levels");
  }
  const double p = a.p();
  double result = 0.0;
  for (std::size_t m = 1; m <= a.level(); ++m) {
    const double q = p / static_cast<double>(m);
    const double total = partition_sup(a.base().size(), [&](std::size_t i, std::size_t j) {
      return std::pow(std::abs(a.increment(m, i, j) - b.increment(m, i, j)), q);
    });
    result = std::max(result, std::pow(total, 1.0 / q));
  }
  return result;
}

double holder_distance(std::span<const double> a, std::span<const double> b, double alpha,
                       double delta) {
  if (a.size() != b.size()) fail(ErrorKind::invalid_argument, "paths differ in length");
  double sup = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      const double diff = (a[j] - a[i]) - (b[j] - b[i]);
      sup = std::max(sup, std::abs(diff) / std::pow(static_cast<double>(j - i) * delta, alpha));
    }
  }
  return sup;
}

double rough_holder_distance(const ScalarRoughLift& a, const ScalarRoughLift& b, double alpha,
                             double delta) {
  if (a.base().size() != b.base().size() || a.level() != b.level()) {
    fail(ErrorKind::invalid_argument, "rough lifts live on different grids or levels");
  }
  double sup = 0.0;
  const std::size_t n = a.base().size();
  for (std::size_t m = 1; m <= a.level(); ++m) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double diff = a.increment(m, i, j) - b.increment(m, i, j);
        const double span = static_cast<double>(j - i) * delta;
        sup = std::max(sup, std::abs(diff) / std::pow(span, static_cast<double>(m) * alpha));
      }
    }
  }
  return sup;
}

}  // namespace fracdiff
