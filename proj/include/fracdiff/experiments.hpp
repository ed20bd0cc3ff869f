#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <vector>

#include "json.hpp"

#include "fracdiff/experiment_config.hpp"
#include "fracdiff/result_io.hpp"
#include "fracdiff/signature.hpp"

namespace fracdiff {

struct ExperimentResult {
  std::vector<ResultRow> rows;
  nlohmann::json summary;
};

/// Runs the named experiment. Replicate r draws from SeedSpec{seed, r}; the
/// rows come back in (cell, replicate, statistic) order whatever the thread
/// count. Writes the CSV and its `.json` sidecar when `output` is set.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// Sidecar path for a CSV output: same stem, `.json` extension.
std::filesystem::path summary_path(const std::filesystem::path& csv);

/// Calls task(i) for i in [0, count) on up to `threads` workers. The first
/// failure (lowest index) is rethrown with the index in its message.
void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& task);

/// Iterated integral over [0, T] of a piecewise-linear path by nested
/// Gauss–Legendre quadrature, independent of the tensor-algebra code.
double quadrature_iterated_integral(const Eigen::MatrixXd& nodes, double delta, const Word& word);

/// sup over all 2^{n−2} node partitions, by enumeration (n ≤ 24 nodes).
double brute_force_p_variation(const Eigen::MatrixXd& samples, double p);

}  // namespace fracdiff
