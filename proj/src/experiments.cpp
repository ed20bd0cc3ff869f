#include "fracdiff/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <thread>

#include "fracdiff/fgn_covariance.hpp"
#include "fracdiff/inverse_problem.hpp"
#include "fracdiff/likelihood.hpp"
#include "fracdiff/multiscale.hpp"
#include "fracdiff/simulation.hpp"
#include "fracdiff/spectral_conjecture.hpp"
#include "fracdiff/stats.hpp"
#include "fracdiff/tfe.hpp"

namespace fracdiff {

using nlohmann::json;

namespace {

using Slots = std::vector<std::vector<ResultRow>>;

struct RowTemplate {
  std::string experiment;
  double epsilon = kNotApplicable;
  double delta = kNotApplicable;
  double alpha = kNotApplicable;
  double hurst = kNotApplicable;
  double theta = kNotApplicable;
  double sigma = kNotApplicable;
  double eta = kNotApplicable;

  ResultRow operator()(std::size_t replicate, std::string statistic, double value) const {
    return ResultRow{experiment, replicate, epsilon, delta,  alpha,
                     hurst,      theta,     sigma,   eta,    std::move(statistic),
                     value};
  }
};

template <class Body>
Slots over_replicates(const ExperimentConfig& cfg, Body&& body) {
  Slots slots(cfg.replicates());
  parallel_for(slots.size(), cfg.threads(), [&](std::size_t r) { slots[r] = body(r); });
  return slots;
}

void append(std::vector<ResultRow>& rows, Slots&& slots) {
  for (auto& slot : slots) {
    for (auto& row : slot) rows.push_back(std::move(row));
  }
}

std::vector<double> column(const Slots& slots, const std::string& statistic) {
  std::vector<double> out;
  for (const auto& slot : slots) {
    for (const auto& row : slot) {
      if (row.statistic == statistic) out.push_back(row.value);
    }
  }
  return out;
}

std::vector<double> absolute(std::vector<double> v) {
  for (double& x : v) x = std::abs(x);
  return v;
}

json moments(const std::vector<double>& v) {
  json j{{"count", v.size()}, {"mean", mean(v)}};
  if (v.size() >= 2) {
    j["standard_error"] = standard_error(v);
    j["variance"] = variance(v);
  }
  return j;
}

double sample_sd(const std::vector<double>& v) { return v.size() >= 2 ? std::sqrt(variance(v)) : 0.0; }

SeedSpec seed_of(const ExperimentConfig& cfg, std::size_t r) { return SeedSpec{cfg.seed(), r}; }

[[noreturn]] void reject(const std::string& key, const std::string& why) {
  fail(ErrorKind::config_error, "key '" + key + "': " + why);
}

// Pairs two lists element-wise; a single-element list is repeated.
std::pair<std::vector<double>, std::vector<double>> broadcast(const ExperimentConfig& cfg,
                                                              const std::string& a_key,
                                                              const std::string& b_key) {
  auto a = cfg.numbers(a_key);
  auto b = cfg.numbers(b_key);
  if (a.size() != b.size()) {
    if (a.size() == 1) {
      a.assign(b.size(), a.front());
    } else if (b.size() == 1) {
      b.assign(a.size(), b.front());
    } else {
      reject(b_key, "length differs from '" + a_key + "' and neither has one entry");
    }
  }
  return {a, b};
}

// Cross-key checks that the per-key schema cannot express.
void validate(const ExperimentConfig& cfg) {
  const std::string& name = cfg.experiment();
  if (name == "bias-sweep") {
    broadcast(cfg, "grid.deltas", "grid.epsilons");
  } else if (name == "clt" || name == "consistency-rate") {
    const auto [lo, hi] = admissible_alpha(cfg.number("model.hurst"), name == "clt"
                                                                          ? AlphaRegime::clt
                                                                          : AlphaRegime::consistency);
    (void)lo;
    if (!(cfg.number("model.alpha") < hi)) {
      reject("model.alpha", "outside the admissible range (0, " + format_number(hi) + ")");
    }
  } else if (name == "calibration-convergence") {
    const double h = cfg.number("model.hurst");
    if (!(cfg.number("model.p") > 1.0 / h)) reject("model.p", "must exceed 1/H");
    if (h <= 0.25) reject("model.hurst", "rough lifts need H > 1/4");
  } else if (name == "signature-check") {
    if (cfg.count("sig.level") > TruncatedTensor::kMaxLevel) reject("sig.level", "at most 3");
    if (cfg.count("pvar.max_count") > 20) reject("pvar.max_count", "enumeration limited to 20 nodes");
    if (cfg.count("grid.count") < 2) reject("grid.count", "need at least two cells");
    for (double p : cfg.numbers("pvar.exponents")) {
      if (p < 1.0) reject("pvar.exponents", "exponents must be >= 1");
    }
  } else if (name == "tfe-sweep") {
    const double h = cfg.number("model.hurst");
    if (!(h > 0.5)) reject("model.hurst", "the slow perturbation needs H in (1/2, 1)");
    broadcast(cfg, "sweep.epsilons", "sweep.etas");
    if (!(cfg.number("search.lower") < cfg.number("search.upper"))) {
      reject("search.upper", "must exceed search.lower");
    }
  } else if (name == "hurst-sweep") {
    if (cfg.count("grid.count") < 2) reject("grid.count", "need at least two cells");
  } else if (name == "conjecture-scan") {
    if (cfg.count("wick.size") < 1) reject("wick.size", "must be positive");
  }
}

// ---------------------------------------------------------------------------

ExperimentResult bias_sweep(const ExperimentConfig& cfg) {
  const double hurst = cfg.number("model.hurst");
  const double sigma = cfg.number("model.sigma");
  const double horizon = cfg.number("grid.horizon");
  const bool exact = cfg.text("sim.method") == "exact";
  const std::size_t substeps = cfg.count("sim.substeps");
  const auto [deltas, epsilons] = broadcast(cfg, "grid.deltas", "grid.epsilons");

  ExperimentResult result;
  json cells = json::array();
  std::vector<double> means;
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    const SamplingGrid grid = SamplingGrid::make(deltas[i], horizon);
    const double eps = epsilons[i];
    const FgnCovariance cov(hurst, grid.delta(), grid.count());
    std::optional<PhysicalFbmSlowSampler> sampler;
    if (exact) sampler.emplace(hurst, sigma, eps, grid);
    // The grid is given directly, so α only has to pass validation.
    const MultiscaleParams params{eps, 1.0, sigma, hurst};
    const RowTemplate row{cfg.experiment(), eps, grid.delta(), kNotApplicable, hurst,
                          kNotApplicable,   sigma};

    Slots slots = over_replicates(cfg, [&](std::size_t r) {
      const Trajectory x = exact ? sampler->sample(seed_of(cfg, r))
                                 : sample_physical_fbm(params, grid, seed_of(cfg, r), substeps).slow;
      return std::vector<ResultRow>{row(r, "sigma2_hat", sigma2_hat(x, cov))};
    });
    const auto values = column(slots, "sigma2_hat");
    json cell = moments(values);
    cell["epsilon"] = eps;
    cell["delta"] = grid.delta();
    cell["ratio"] = eps / grid.delta();
    if (hurst == 0.5) {
      const double expected = expected_bias_h_half(sigma, eps, grid.delta());
      cell["expected"] = expected;
      cell["z_score"] = std::abs(mean(values) - expected) / standard_error(values);
    }
    means.push_back(mean(values));
    cells.push_back(cell);
    append(result.rows, std::move(slots));
  }
  result.summary["cells"] = cells;
  result.summary["means"] = means;
  result.summary["means_strictly_decreasing"] = strictly_decreasing(means);
  return result;
}

// δ = ε^α along a list of ε; L² error of σ̂² and its log-log slope in ε.
ExperimentResult consistency_rate(const ExperimentConfig& cfg) {
  const double hurst = cfg.number("model.hurst");
  const double sigma = cfg.number("model.sigma");
  const double alpha = cfg.number("model.alpha");
  const bool exact = cfg.text("sim.method") == "exact";
  const std::size_t substeps = cfg.count("sim.substeps");
  const SubsamplingSchedule schedule(cfg.numbers("schedule.epsilons"), alpha,
                                     cfg.number("grid.horizon"));

  ExperimentResult result;
  json cells = json::array();
  std::vector<double> eps_list;
  std::vector<double> errors;
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    const double eps = schedule.epsilon(i);
    const SamplingGrid grid = schedule.grid(i);
    const FgnCovariance cov(hurst, grid.delta(), grid.count());
    std::optional<PhysicalFbmSlowSampler> sampler;
    if (exact) sampler.emplace(hurst, sigma, eps, grid);
    const MultiscaleParams params{eps, alpha, sigma, hurst};
    const RowTemplate row{cfg.experiment(), eps, grid.delta(), alpha, hurst, kNotApplicable, sigma};

    Slots slots = over_replicates(cfg, [&](std::size_t r) {
      const Trajectory x = exact ? sampler->sample(seed_of(cfg, r))
                                 : sample_physical_fbm(params, grid, seed_of(cfg, r), substeps).slow;
      return std::vector<ResultRow>{row(r, "sigma2_hat", sigma2_hat(x, cov))};
    });
    auto values = column(slots, "sigma2_hat");
    json cell = moments(values);
    for (double& v : values) v -= sigma * sigma;
    const double l2 = root_mean_square(values);
    cell["epsilon"] = eps;
    cell["delta"] = grid.delta();
    cell["count"] = grid.count();
    cell["l2_error"] = l2;
    cells.push_back(cell);
    eps_list.push_back(eps);
    errors.push_back(l2);
    append(result.rows, std::move(slots));
  }
  result.summary["cells"] = cells;
  result.summary["l2_errors"] = errors;
  result.summary["monotone_decreasing"] = strictly_decreasing(errors);
  if (errors.size() >= 2) {
    const LinearFit fit = loglog_fit(eps_list, errors);
    result.summary["slope"] = fit.slope;
    result.summary["slope_standard_error"] = fit.slope_standard_error;
  }
  result.summary["predicted_exponent"] = predicted_rate_exponent(hurst, alpha);
  return result;
}

// (σ̂² − σ²)/√δ at δ = ε^α: normality and variance against 2σ⁴/T.
ExperimentResult clt(const ExperimentConfig& cfg) {
  const double hurst = cfg.number("model.hurst");
  const double sigma = cfg.number("model.sigma");
  const double alpha = cfg.number("model.alpha");
  const double horizon = cfg.number("grid.horizon");
  const SamplingGrid grid = SamplingGrid::make(cfg.number("grid.delta"), horizon);
  const double delta = grid.delta();
  const double eps = std::pow(delta, 1.0 / alpha);
  const bool exact = cfg.text("sim.method") == "exact";
  const std::size_t substeps = cfg.count("sim.substeps");
  const FgnCovariance cov(hurst, delta, grid.count());
  std::optional<PhysicalFbmSlowSampler> sampler;
  if (exact) sampler.emplace(hurst, sigma, eps, grid);
  const MultiscaleParams params{eps, alpha, sigma, hurst};
  const RowTemplate row{cfg.experiment(), eps, delta, alpha, hurst, kNotApplicable, sigma};

  Slots slots = over_replicates(cfg, [&](std::size_t r) {
    const Trajectory x = exact ? sampler->sample(seed_of(cfg, r))
                               : sample_physical_fbm(params, grid, seed_of(cfg, r), substeps).slow;
    const double s2 = sigma2_hat(x, cov);
    return std::vector<ResultRow>{row(r, "sigma2_hat", s2),
                                  row(r, "standardized", (s2 - sigma * sigma) / std::sqrt(delta))};
  });
  const auto z = column(slots, "standardized");
  const double var = variance(z);
  const double oracle = 2.0 * std::pow(sigma, 4) / grid.horizon();
  const double stated = 2.0 * sigma * sigma;
  const NormalityTest ad = anderson_darling_normality(z);

  ExperimentResult result;
  append(result.rows, std::move(slots));
  json& s = result.summary;
  s["epsilon"] = eps;
  s["delta"] = delta;
  s["count"] = grid.count();
  s["standardized"] = moments(z);
  s["variance"] = var;
  s["variance_oracle"] = oracle;
  s["variance_relative_error"] = std::abs(var - oracle) / oracle;
  s["stated_constant"] = stated;
  s["stated_constant_relative_error"] = std::abs(var - stated) / stated;
  s["anderson_darling"] = ad.statistic;
  s["normality_p_value"] = ad.p_value;
  return result;
}

// Approximate-model data on grid.count() cells, preceded by a discarded burn-in
// so the first kept node is (to e^{-19}) a draw from the invariant law.
struct ApproximateModelSource {
  SamplingGrid grid;
  SamplingGrid extended;
  std::size_t burn;
  StationaryGaussianSampler sampler;
  FouParams params;

  ApproximateModelSource(const SamplingGrid& g, const FouParams& p)
      : grid(g),
        extended(SamplingGrid::with_count(g.delta(), burn_cells(g, p) + g.count())),
        burn(burn_cells(g, p)),
        sampler(make_fgn_sampler(p.hurst, g.delta(), burn + g.count())),
        params(p) {}

  static std::size_t burn_cells(const SamplingGrid& g, const FouParams& p) {
    if (p.theta == 0.0) return 0;
    return static_cast<std::size_t>(std::ceil(kBurnInRelaxations / (p.theta * g.delta())));
  }

  Trajectory sample(const SeedSpec& seed) const {
    const IncrementVector noise = sample_fgn(sampler, extended, seed);
    std::vector<double> slopes(noise.deltas().begin(), noise.deltas().end());
    for (double& c : slopes) c /= grid.delta();
    const Trajectory path = forward_map(CalibrationResult{extended, slopes, params}, params, 0.0);
    const auto v = path.values();
    return Trajectory(grid, std::vector<double>(v.begin() + static_cast<std::ptrdiff_t>(burn), v.end()));
  }
};

ExperimentResult score_consistency(const ExperimentConfig& cfg) {
  const FouParams params{cfg.number("model.theta"), cfg.number("model.sigma"),
                         cfg.number("model.hurst")};
  params.validate();
  const double horizon = cfg.number("grid.horizon");

  ExperimentResult result;
  json cells = json::array();
  std::vector<double> theta_scores;
  std::vector<double> sigma_scores;
  for (double d : cfg.numbers("grid.deltas")) {
    const ApproximateModelSource source(SamplingGrid::make(d, horizon), params);
    const auto cov =
        std::make_shared<const FgnCovariance>(params.hurst, source.grid.delta(), source.grid.count());
    const RowTemplate row{cfg.experiment(), kNotApplicable, source.grid.delta(), kNotApplicable,
                          params.hurst,     params.theta,   params.sigma};
    Slots slots = over_replicates(cfg, [&](std::size_t r) {
      const LikelihoodContext ctx(source.sample(seed_of(cfg, r)), cov);
      const Score sc = score(ctx, params.theta, params.sigma);
      return std::vector<ResultRow>{row(r, "score_theta", sc.theta), row(r, "score_sigma", sc.sigma)};
    });
    const auto st = absolute(column(slots, "score_theta"));
    const auto ss = absolute(column(slots, "score_sigma"));
    cells.push_back(json{{"delta", source.grid.delta()},
                         {"abs_score_theta", moments(st)},
                         {"abs_score_sigma", moments(ss)}});
    theta_scores.push_back(mean(st));
    sigma_scores.push_back(mean(ss));
    append(result.rows, std::move(slots));
  }
  result.summary["cells"] = cells;
  result.summary["mean_abs_score_theta"] = theta_scores;
  result.summary["mean_abs_score_sigma"] = sigma_scores;
  result.summary["theta_decreasing"] = strictly_decreasing(theta_scores);
  result.summary["sigma_decreasing"] = strictly_decreasing(sigma_scores);
  return result;
}

// One path per replicate on the finest grid, decimated to each dyadic level.
ExperimentResult expansion_residual(const ExperimentConfig& cfg) {
  const FouParams params{cfg.number("model.theta"), cfg.number("model.sigma"),
                         cfg.number("model.hurst")};
  params.validate();
  const std::size_t levels = cfg.count("grid.levels");
  const double delta0 = cfg.number("grid.delta0");
  const std::size_t coarsest = static_cast<std::size_t>(std::llround(cfg.number("grid.horizon") / delta0));
  if (coarsest == 0) reject("grid.delta0", "exceeds the horizon");
  const std::size_t top = std::size_t{1} << (levels - 1);
  const SamplingGrid finest = SamplingGrid::with_count(delta0 / static_cast<double>(top), coarsest * top);
  const ApproximateModelSource source(finest, params);

  std::vector<std::shared_ptr<const FgnCovariance>> covs;
  std::vector<std::size_t> steps;
  for (std::size_t j = 0; j < levels; ++j) {
    const std::size_t step = top >> j;
    steps.push_back(step);
    covs.push_back(std::make_shared<const FgnCovariance>(
        params.hurst, finest.delta() * static_cast<double>(step), finest.count() / step));
  }

  const RowTemplate base{cfg.experiment(), kNotApplicable, kNotApplicable, kNotApplicable,
                         params.hurst,     params.theta,   params.sigma};
  Slots slots = over_replicates(cfg, [&](std::size_t r) {
    const Trajectory fine = source.sample(seed_of(cfg, r));
    std::vector<ResultRow> rows;
    for (std::size_t j = 0; j < levels; ++j) {
      const LikelihoodContext ctx(fine.decimate(steps[j]), covs[j]);
      const ExpansionTerms terms = expansion_terms(ctx, params.theta, params.sigma);
      RowTemplate row = base;
      row.delta = ctx.delta();
      rows.push_back(row(r, "ell0", terms.ell0));
      rows.push_back(row(r, "ell1", terms.ell1));
      rows.push_back(row(r, "residual", terms.residual));
    }
    return rows;
  });

  ExperimentResult result;
  std::vector<double> deltas;
  std::vector<double> residuals;
  json cells = json::array();
  for (std::size_t j = 0; j < levels; ++j) {
    std::vector<double> v;
    for (const auto& slot : slots) v.push_back(std::abs(slot[3 * j + 2].value));
    deltas.push_back(finest.delta() * static_cast<double>(steps[j]));
    residuals.push_back(mean(v));
    json cell = moments(v);
    cell["delta"] = deltas.back();
    cells.push_back(cell);
  }
  append(result.rows, std::move(slots));
  result.summary["cells"] = cells;
  result.summary["mean_abs_residual"] = residuals;
  if (levels >= 2) result.summary["slope"] = loglog_fit(deltas, residuals).slope;
  return result;
}

ExperimentResult hurst_sweep(const ExperimentConfig& cfg) {
  const double hurst = cfg.number("model.hurst");
  const double sigma = cfg.number("model.sigma");
  const std::size_t n = cfg.count("grid.count");
  const double delta = cfg.number("grid.horizon") / static_cast<double>(n);
  const double eps = cfg.number("model.ratio") * delta;
  const SamplingGrid fine = SamplingGrid::with_count(0.5 * delta, 2 * n);
  const bool exact = cfg.text("sim.method") == "exact";
  const std::size_t substeps = cfg.count("sim.substeps");
  std::optional<PhysicalFbmSlowSampler> sampler;
  if (exact) sampler.emplace(hurst, sigma, eps, fine);
  const MultiscaleParams params{eps, 1.0, sigma, hurst};
  const RowTemplate row{cfg.experiment(), eps, delta, kNotApplicable, hurst, kNotApplicable, sigma};

  Slots slots = over_replicates(cfg, [&](std::size_t r) {
    const Trajectory x = exact ? sampler->sample(seed_of(cfg, r))
                               : sample_physical_fbm(params, fine, seed_of(cfg, r), substeps).slow;
    return std::vector<ResultRow>{row(r, "hurst_hat", hurst_hat(x))};
  });
  auto estimates = column(slots, "hurst_hat");
  std::vector<double> errors(estimates);
  for (double& e : errors) e = std::abs(e - hurst);

  ExperimentResult result;
  append(result.rows, std::move(slots));
  result.summary["epsilon"] = eps;
  result.summary["delta"] = delta;
  result.summary["hurst_hat"] = moments(estimates);
  result.summary["bias"] = mean(estimates) - hurst;
  result.summary["mean_abs_error"] = mean(errors);
  return result;
}

std::string label(std::size_t n, std::size_t k) {
  return "[N=" + std::to_string(n) + ";k=" + std::to_string(k) + "]";
}

std::string label(std::size_t n, std::size_t k, std::size_t l) {
  return "[N=" + std::to_string(n) + ";k=" + std::to_string(k) + ";l=" + std::to_string(l) + "]";
}

ExperimentResult conjecture_scan_experiment(const ExperimentConfig& cfg) {
  const ConjectureScan scan = conjecture_scan(cfg.numbers("scan.hursts"), cfg.counts("scan.sizes"),
                                              cfg.number("scan.growth_limit"),
                                              cfg.flag("scan.full_table"));
  ExperimentResult result;
  RowTemplate row{cfg.experiment()};
  for (const TraceEntry& e : scan.table) {
    row.hurst = e.hurst;
    result.rows.push_back(e.product ? row(0, "trace_product" + label(e.size, e.k, e.l), e.value)
                                    : row(0, "trace" + label(e.size, e.k), e.value));
  }
  json cells = json::array();
  double identity_error = 0.0;
  for (const ConjectureCell& c : scan.cells) {
    row.hurst = c.hurst;
    result.rows.push_back(row(0, "max_trace" + label(c.size, c.max_trace_shift), c.max_trace));
    result.rows.push_back(row(0, "max_trace_product" + label(c.size, c.max_product_k, c.max_product_l),
                              c.max_trace_product));
    const double n = static_cast<double>(c.size);
    identity_error = std::max(identity_error, std::abs(c.trace_identity - n) / n);
    cells.push_back(json{{"hurst", c.hurst},
                         {"size", c.size},
                         {"trace_identity", c.trace_identity},
                         {"max_trace", c.max_trace},
                         {"max_trace_shift", c.max_trace_shift},
                         {"max_trace_product", c.max_trace_product},
                         {"max_product_k", c.max_product_k},
                         {"max_product_l", c.max_product_l}});
  }
  json flags = json::array();
  for (const GrowthFlag& f : scan.flags) {
    flags.push_back(json{{"hurst", f.hurst},
                         {"from_size", f.from_size},
                         {"to_size", f.to_size},
                         {"statistic", f.statistic},
                         {"factor", f.factor}});
  }
  result.summary["cells"] = cells;
  result.summary["counterexamples"] = flags;
  result.summary["max_growth_factor"] =
      scan.growth_factors.empty() ? 0.0
                                  : *std::max_element(scan.growth_factors.begin(), scan.growth_factors.end());
  result.summary["trace_identity_max_relative_error"] = identity_error;

  // Wick moments: analytic value against Monte Carlo on random (k, l).
  const std::size_t n = cfg.count("wick.size");
  const std::size_t pairs = cfg.count("wick.pairs");
  const std::size_t samples = cfg.count("wick.samples");
  Rng picker = make_rng(SeedSpec{cfg.seed(), 0}, Stream::aux);
  std::uniform_int_distribution<std::size_t> shift(0, n);
  std::vector<std::pair<std::size_t, std::size_t>> kl(pairs);
  for (auto& [k, l] : kl) {
    k = shift(picker);
    l = shift(picker);
  }
  json wick = json::array();
  json identity = json::array();
  double max_z = 0.0;
  for (double hurst : cfg.numbers("wick.hursts")) {
    const ShiftGramFamily family(hurst, n);
    const double n2 = static_cast<double>(n);
    const double at_zero = q_moment(family, 0, 0);
    identity.push_back(json{{"hurst", hurst},
                            {"value", at_zero},
                            {"expected", n2 * n2 + 2.0 * n2},
                            {"relative_error", std::abs(at_zero - n2 * n2 - 2.0 * n2) / (n2 * n2)}});
    row.hurst = hurst;
    result.rows.push_back(row(0, "wick_analytic" + label(n, 0, 0), at_zero));

    std::vector<MonteCarloEstimate> estimates(pairs);
    parallel_for(pairs, cfg.threads(), [&](std::size_t p) {
      estimates[p] =
          q_moment_monte_carlo(hurst, n, kl[p].first, kl[p].second, samples, SeedSpec{cfg.seed(), p});
    });
    for (std::size_t p = 0; p < pairs; ++p) {
      const auto [k, l] = kl[p];
      const double analytic = q_moment(family, k, l);
      const double z = std::abs(estimates[p].mean - analytic) / estimates[p].standard_error;
      max_z = std::max(max_z, z);
      result.rows.push_back(row(p, "wick_analytic" + label(n, k, l), analytic));
      result.rows.push_back(row(p, "wick_monte_carlo" + label(n, k, l), estimates[p].mean));
      result.rows.push_back(row(p, "wick_standard_error" + label(n, k, l), estimates[p].standard_error));
      wick.push_back(json{{"hurst", hurst},
                          {"k", k},
                          {"l", l},
                          {"analytic", analytic},
                          {"monte_carlo", estimates[p].mean},
                          {"standard_error", estimates[p].standard_error},
                          {"z", z}});
    }
  }
  result.summary["wick"] = wick;
  result.summary["wick_identity"] = identity;
  result.summary["wick_max_z"] = max_z;
  return result;
}

ExperimentResult calibration_convergence(const ExperimentConfig& cfg) {
  const FouParams params{cfg.number("model.theta"), cfg.number("model.sigma"),
                         cfg.number("model.hurst")};
  params.validate();
  const double p = cfg.number("model.p");
  const double delta0 = cfg.number("grid.delta0");
  const std::size_t levels = cfg.count("grid.levels");
  const double horizon = cfg.number("grid.horizon");
  const std::size_t oversampling = cfg.count("sim.oversampling");
  const RowTemplate base{cfg.experiment(), kNotApplicable, kNotApplicable, kNotApplicable,
                         params.hurst,     params.theta,   params.sigma};

  std::vector<ConvergenceDiagnostic> diagnostics(cfg.replicates());
  Slots slots = over_replicates(cfg, [&](std::size_t r) {
    diagnostics[r] =
        convergence_diagnostic(seed_of(cfg, r), params, delta0, levels, p, horizon, oversampling);
    std::vector<ResultRow> rows;
    const auto& d = diagnostics[r];
    for (std::size_t j = 0; j < d.deltas.size(); ++j) {
      RowTemplate row = base;
      row.delta = d.deltas[j];
      rows.push_back(row(r, "distance", d.distances[j]));
      rows.push_back(row(r, "gradient_gap", d.gradient_gaps[j]));
    }
    return rows;
  });

  ExperimentResult result;
  json seeds = json::array();
  bool all_monotone = true;
  double worst_ratio = 0.0;
  std::vector<double> slopes;
  std::vector<double> mean_gaps(levels + 1, 0.0);
  for (const auto& d : diagnostics) {
    const bool monotone = non_increasing(d.distances);
    const double ratio = d.distances.back() / d.distances.front();
    std::optional<double> slope;
    if (d.deltas.size() >= 2) slope = loglog_fit(d.deltas, d.gradient_gaps).slope;
    all_monotone = all_monotone && monotone;
    worst_ratio = std::max(worst_ratio, ratio);
    if (slope) slopes.push_back(*slope);
    for (std::size_t j = 0; j < d.gradient_gaps.size(); ++j) {
      mean_gaps[j] += d.gradient_gaps[j] / static_cast<double>(diagnostics.size());
    }
    seeds.push_back(json{{"distances", d.distances},
                         {"gradient_gaps", d.gradient_gaps},
                         {"non_increasing", monotone},
                         {"final_over_initial", ratio},
                         {"gap_slope", slope ? json(*slope) : json()}});
  }
  append(result.rows, std::move(slots));
  result.summary["deltas"] = diagnostics.front().deltas;
  result.summary["seeds"] = seeds;
  result.summary["all_non_increasing"] = all_monotone;
  result.summary["max_final_over_initial"] = worst_ratio;
  result.summary["mean_gradient_gaps"] = mean_gaps;
  if (!slopes.empty()) {
    result.summary["gap_slope"] = moments(slopes);
    result.summary["mean_gap_slope"] = loglog_fit(diagnostics.front().deltas, mean_gaps).slope;
  }
  result.summary["reference_order"] = 1.0 + 1.0 / p;
  return result;
}

std::vector<Word> words_up_to(std::size_t dimension, std::size_t level) {
  std::vector<Word> out;
  std::vector<Word> frontier{Word{}};
  for (std::size_t len = 1; len <= level; ++len) {
    std::vector<Word> next;
    for (const Word& w : frontier) {
      for (std::size_t i = 0; i < dimension; ++i) {
        Word v = w;
        v.push_back(i);
        next.push_back(v);
      }
    }
    out.insert(out.end(), next.begin(), next.end());
    frontier = std::move(next);
  }
  return out;
}

Eigen::MatrixXd random_walk(Rng& rng, std::size_t nodes, std::size_t dimension) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd m(static_cast<Eigen::Index>(nodes), static_cast<Eigen::Index>(dimension));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      m(i, j) = normal(rng) + (i > 0 ? m(i - 1, j) : 0.0);
    }
  }
  return m;
}

ExperimentResult signature_check(const ExperimentConfig& cfg) {
  const std::size_t d = cfg.count("sig.dimension");
  const std::size_t level = cfg.count("sig.level");
  const std::size_t cells = cfg.count("grid.count");
  const std::size_t max_nodes = cfg.count("pvar.max_count");
  const auto exponents = cfg.numbers("pvar.exponents");
  const SamplingGrid grid = SamplingGrid::with_count(1.0 / static_cast<double>(cells), cells);
  const auto words = words_up_to(d, level);
  const RowTemplate row{cfg.experiment()};

  Slots slots = over_replicates(cfg, [&](std::size_t r) {
    Rng rng = make_rng(seed_of(cfg, r), Stream::aux);
    const Eigen::MatrixXd nodes = random_walk(rng, cells + 1, d);
    const PiecewiseLinearPath path = PiecewiseLinearPath::through_nodes(grid, nodes);
    const TruncatedTensor full = pwl_signature(path, level, 0, cells);
    const double scale = full.max_abs();

    std::uniform_int_distribution<std::size_t> cut(1, cells - 1);
    const std::size_t m = cut(rng);
    const TruncatedTensor split = pwl_signature(path, level, 0, m) * pwl_signature(path, level, m, cells);
    const double chen = (full - split).max_abs() / scale;

    // Each identity is measured against the size of the levels it relates.
    std::vector<double> level_size(level + 1, 1.0);
    for (std::size_t k = 1; k <= level; ++k) {
      const auto c = full.component(k);
      level_size[k] = 0.0;
      for (double v : c) level_size[k] = std::max(level_size[k], std::abs(v));
    }
    double shuffle = 0.0;
    for (const Word& u : words) {
      for (const Word& v : words) {
        if (u.size() + v.size() > level) continue;
        const double size = level_size[u.size()] * level_size[v.size()] +
                            static_cast<double>(shuffles(u, v).size()) * level_size[u.size() + v.size()];
        shuffle = std::max(shuffle, shuffle_residual(full, u, v) / size);
      }
    }

    double path_quad = 0.0;
    for (const Word& w : words) {
      const double oracle = quadrature_iterated_integral(nodes, grid.delta(), w);
      path_quad = std::max(path_quad, std::abs(full.coefficient(w) - oracle) / scale);
    }

    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> step(d);
    for (double& s : step) s = normal(rng);
    const TruncatedTensor segment = segment_signature(step, level);
    Eigen::MatrixXd ends = Eigen::MatrixXd::Zero(2, static_cast<Eigen::Index>(d));
    for (std::size_t j = 0; j < d; ++j) ends(1, static_cast<Eigen::Index>(j)) = step[j];
    double segment_quad = 0.0;
    for (const Word& w : words) {
      const double oracle = quadrature_iterated_integral(ends, 1.0, w);
      segment_quad =
          std::max(segment_quad, std::abs(segment.coefficient(w) - oracle) / segment.max_abs());
    }

    double pvar = 0.0;
    for (std::size_t count = 1; count <= max_nodes; ++count) {
      const Eigen::MatrixXd vector_walk = random_walk(rng, count, d);
      const Eigen::MatrixXd scalar_walk = random_walk(rng, count, 1);
      const std::vector<double> scalar(scalar_walk.data(), scalar_walk.data() + scalar_walk.size());
      for (double p : exponents) {
        const double bv = brute_force_p_variation(vector_walk, p);
        const double bs = brute_force_p_variation(scalar_walk, p);
        pvar = std::max(pvar, std::abs(p_variation_norm(vector_walk, p) - bv) / std::max(bv, 1e-300));
        pvar = std::max(pvar, std::abs(p_variation_norm(scalar, p) - bs) / std::max(bs, 1e-300));
      }
    }
    return std::vector<ResultRow>{row(r, "chen_residual", chen),
                                  row(r, "shuffle_residual", shuffle),
                                  row(r, "path_quadrature_error", path_quad),
                                  row(r, "segment_quadrature_error", segment_quad),
                                  row(r, "pvar_mismatch", pvar)};
  });

  ExperimentResult result;
  for (const char* name : {"chen_residual", "shuffle_residual", "path_quadrature_error",
                           "segment_quadrature_error", "pvar_mismatch"}) {
    const auto v = column(slots, name);
    result.summary[std::string("max_") + name] = *std::max_element(v.begin(), v.end());
  }
  append(result.rows, std::move(slots));
  return result;
}

double sup_distance(const Trajectory& a, const Trajectory& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s = std::max(s, std::abs(a[k] - b[k]));
  return s;
}

ExperimentResult tfe_sweep(const ExperimentConfig& cfg) {
  const double theta = cfg.number("model.theta");
  const double hurst = cfg.number("model.hurst");
  const double x0 = cfg.number("model.x0");
  const SamplingGrid grid = SamplingGrid::make(cfg.number("grid.delta"), cfg.number("grid.horizon"));
  const TfeInstance instance{x0, cfg.number("search.lower"), cfg.number("search.upper")};
  instance.validate();
  const std::size_t substeps = cfg.count("sim.substeps");
  const auto [epsilons, etas] = broadcast(cfg, "sweep.epsilons", "sweep.etas");
  const Trajectory averaged = averaged_trajectory(theta, x0, grid);

  ExperimentResult result;
  json cells = json::array();
  std::vector<double> abs_errors;
  std::vector<double> sup_errors;
  std::vector<double> scaled_sds;
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    const TfeSystemParams params{theta, etas[i], epsilons[i], hurst};
    const RowTemplate row{cfg.experiment(), epsilons[i], grid.delta(), kNotApplicable,
                          hurst,            theta,       kNotApplicable, etas[i]};
    Slots slots = over_replicates(cfg, [&](std::size_t r) {
      const TfeSystemSample s = sample_tfe_system(params, grid, seed_of(cfg, r), x0, std::nullopt, substeps);
      return std::vector<ResultRow>{row(r, "theta_hat", tfe_estimate(s.slow, instance)),
                                    row(r, "sup_error", sup_distance(s.slow, averaged))};
    });
    auto estimates = column(slots, "theta_hat");
    std::vector<double> errors(estimates);
    for (double& e : errors) e -= theta;
    const auto sups = column(slots, "sup_error");
    json cell{{"epsilon", epsilons[i]},
              {"eta", etas[i]},
              {"theta_hat", moments(estimates)},
              {"mean_abs_error", mean(absolute(errors))},
              {"sup_error", moments(sups)}};
    if (etas[i] > 0.0) {
      const double sd = sample_sd(errors) / std::sqrt(etas[i]);
      cell["scaled_sd"] = sd;
      scaled_sds.push_back(sd);
    }
    abs_errors.push_back(mean(absolute(errors)));
    sup_errors.push_back(mean(sups));
    cells.push_back(cell);
    append(result.rows, std::move(slots));
  }
  json& s = result.summary;
  s["cells"] = cells;
  s["mean_abs_errors"] = abs_errors;
  s["mean_abs_error_decreasing"] = strictly_decreasing(abs_errors);
  s["mean_sup_errors"] = sup_errors;
  const bool eps_varies = std::adjacent_find(epsilons.begin(), epsilons.end(),
                                             std::not_equal_to<>()) != epsilons.end();
  const bool eta_varies =
      std::adjacent_find(etas.begin(), etas.end(), std::not_equal_to<>()) != etas.end();
  const bool eta_positive = std::all_of(etas.begin(), etas.end(), [](double e) { return e > 0.0; });
  if (eps_varies && !eta_varies) s["sup_error_slope_epsilon"] = loglog_fit(epsilons, sup_errors).slope;
  if (eta_varies && !eps_varies && eta_positive) {
    s["sup_error_slope_eta"] = loglog_fit(etas, sup_errors).slope;
  }
  if (scaled_sds.size() == epsilons.size() && !scaled_sds.empty()) {
    const auto [lo, hi] = std::minmax_element(scaled_sds.begin(), scaled_sds.end());
    s["scaled_sds"] = scaled_sds;
    s["scaled_sd_spread"] = *hi / *lo - 1.0;
  }
  return result;
}

// Gauss–Legendre, 5 nodes on [−1, 1]; exact for the cubic-or-lower integrands here.
constexpr double kGaussNodes[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                   0.5384693101056831, 0.9061798459386640};
constexpr double kGaussWeights[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                     0.4786286704993665, 0.2369268850561891};

struct IteratedIntegrals {
  const Eigen::MatrixXd& nodes;
  double delta;
  const Word& word;
  // at_node[len][q] = value of the length-len prefix integral at node q.
  std::vector<std::vector<double>> at_node;

  double slope(std::size_t cell, std::size_t letter) const {
    const auto c = static_cast<Eigen::Index>(cell);
    const auto j = static_cast<Eigen::Index>(letter);
    return (nodes(c + 1, j) - nodes(c, j)) / delta;
  }

  // Prefix integral of length len at time t inside cell q (t_q ≤ t ≤ t_{q+1}).
  double value(std::size_t len, std::size_t q, double t) const {
    if (len == 0) return 1.0;
    const double a = static_cast<double>(q) * delta;
    return at_node[len][q] + partial(len, q, a, t);
  }

  double partial(std::size_t len, std::size_t q, double a, double b) const {
    if (b <= a) return 0.0;
    const double half = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < 5; ++i) {
      s += kGaussWeights[i] * value(len - 1, q, a + half * (kGaussNodes[i] + 1.0));
    }
    return s * half * slope(q, word[len - 1]);
  }
};

}  // namespace

double quadrature_iterated_integral(const Eigen::MatrixXd& nodes, double delta, const Word& word) {
  if (nodes.rows() < 2) fail(ErrorKind::invalid_argument, "need at least two nodes");
  for (std::size_t letter : word) {
    if (letter >= static_cast<std::size_t>(nodes.cols())) {
      fail(ErrorKind::invalid_argument, "word letter exceeds the path dimension");
    }
  }
  const auto cells = static_cast<std::size_t>(nodes.rows() - 1);
  IteratedIntegrals f{nodes, delta, word, std::vector<std::vector<double>>(word.size() + 1)};
  for (std::size_t len = 1; len <= word.size(); ++len) {
    auto& v = f.at_node[len];
    v.assign(cells + 1, 0.0);
    for (std::size_t q = 0; q < cells; ++q) {
      const double a = static_cast<double>(q) * delta;
      v[q + 1] = v[q] + f.partial(len, q, a, a + delta);
    }
  }
  return word.empty() ? 1.0 : f.at_node[word.size()][cells];
}

double brute_force_p_variation(const Eigen::MatrixXd& samples, double p) {
  const auto n = static_cast<std::size_t>(samples.rows());
  if (n < 2) return 0.0;
  if (n > 24) fail(ErrorKind::invalid_argument, "enumeration limited to 24 nodes");
  const std::size_t interior = n - 2;
  double best = 0.0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << interior); ++mask) {
    double sum = 0.0;
    Eigen::Index prev = 0;
    for (std::size_t i = 1; i < n; ++i) {
      const bool kept = i == n - 1 || ((mask >> (i - 1)) & 1u) != 0;
      if (!kept) continue;
      const auto cur = static_cast<Eigen::Index>(i);
      sum += std::pow((samples.row(cur) - samples.row(prev)).norm(), p);
      prev = cur;
    }
    best = std::max(best, sum);
  }
  return std::pow(best, 1.0 / p);
}

void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& task) {
  std::mutex guard;
  std::optional<std::size_t> failed_at;
  ErrorKind failed_kind = ErrorKind::numeric_failure;
  std::string failed_what;
  auto record = [&](std::size_t i, ErrorKind kind, const std::string& what) {
    std::lock_guard lock(guard);
    if (!failed_at || i < *failed_at) {
      failed_at = i;
      failed_kind = kind;
      failed_what = what;
    }
  };
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        task(i);
      } catch (const Error& e) {
        record(i, e.kind(), e.what());
      } catch (const std::exception& e) {
        record(i, ErrorKind::numeric_failure, e.what());
      }
    }
  };
  const std::size_t workers = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(count, 1));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (failed_at) fail(failed_kind, "replicate " + std::to_string(*failed_at) + ": " + failed_what);
}

std::filesystem::path summary_path(const std::filesystem::path& csv) {
  std::filesystem::path p = csv;
  p.replace_extension(".json");
  return p;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  validate(config);
  const std::string& name = config.experiment();
  ExperimentResult result;
  if (name == "bias-sweep") {
    result = bias_sweep(config);
  } else if (name == "consistency-rate") {
    result = consistency_rate(config);
  } else if (name == "clt") {
    result = clt(config);
  } else if (name == "score-consistency") {
    result = score_consistency(config);
  } else if (name == "expansion-residual") {
    result = expansion_residual(config);
  } else if (name == "hurst-sweep") {
    result = hurst_sweep(config);
  } else if (name == "conjecture-scan") {
    result = conjecture_scan_experiment(config);
  } else if (name == "calibration-convergence") {
    result = calibration_convergence(config);
  } else if (name == "signature-check") {
    result = signature_check(config);
  } else if (name == "tfe-sweep") {
    result = tfe_sweep(config);
  } else {
    fail(ErrorKind::config_error, "key 'experiment': unknown experiment '" + name + "'");
  }
  result.summary["experiment"] = name;
  result.summary["config"] = config.values();

  if (const std::string out = config.output(); !out.empty()) {
    write_csv(result.rows, std::filesystem::path(out));
    const auto side = summary_path(out);
    std::ofstream js(side, std::ios::binary);
    if (!js) fail(ErrorKind::io_error, "cannot open '" + side.string() + "' for writing");
    js << result.summary.dump(2) << '\n';
    if (!js) fail(ErrorKind::io_error, "write to '" + side.string() + "' failed");
  }
  return result;
}

}  // namespace fracdiff
