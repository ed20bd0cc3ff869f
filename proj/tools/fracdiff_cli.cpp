#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "fracdiff/core.hpp"
#include "fracdiff/experiment_config.hpp"
#include "fracdiff/experiments.hpp"
#include "fracdiff/inverse_problem.hpp"
#include "fracdiff/likelihood.hpp"
#include "fracdiff/multiscale.hpp"
#include "fracdiff/simulation.hpp"
#include "fracdiff/tfe.hpp"

using namespace fracdiff;
using nlohmann::json;

namespace {

struct Globals {
  std::uint64_t seed = 20240917;
  std::string out;
  std::size_t replicates = 0;
  std::size_t threads = 1;
};

// Two-column "t,x" file on a uniform grid starting at t = 0.
Trajectory read_trajectory(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::io_error, "cannot open '" + path + "'");
  std::string line;
  std::getline(in, line);
  if (line != "t,x") fail(ErrorKind::io_error, "'" + path + "': expected header 't,x'");
  std::vector<double> t;
  std::vector<double> x;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    double a = 0.0;
    double b = 0.0;
    if (std::sscanf(line.c_str(), "%lf,%lf", &a, &b) != 2) {
      fail(ErrorKind::io_error, "'" + path + "': malformed row '" + line + "'");
    }
    t.push_back(a);
    x.push_back(b);
  }
  if (x.size() < 2) fail(ErrorKind::insufficient_data, "'" + path + "': need at least two rows");
  const double delta = t[1] - t[0];
  for (std::size_t k = 1; k < t.size(); ++k) {
    if (std::abs(t[k] - t[0] - static_cast<double>(k) * delta) > 1e-9 * (1.0 + std::abs(t[k]))) {
      fail(ErrorKind::io_error, "'" + path + "': times are not uniformly spaced");
    }
  }
  const SamplingGrid grid = SamplingGrid::with_count(delta, x.size() - 1);
  return Trajectory(grid, std::move(x));
}

void emit(const std::string& out, const std::string& text) {
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) fail(ErrorKind::io_error, "cannot open '" + out + "' for writing");
  f << text;
  if (!f) fail(ErrorKind::io_error, "write to '" + out + "' failed");
}

std::string trajectory_csv(const Trajectory& x) {
  std::ostringstream os;
  os << "t,x\n";
  for (std::size_t k = 0; k < x.size(); ++k) {
    os << format_number(x.grid().time(k)) << ',' << format_number(x[k]) << '\n';
  }
  return os.str();
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::config_error:
    case ErrorKind::invalid_argument:
      return 2;
    case ErrorKind::ill_conditioned:
    case ErrorKind::numeric_failure:
    case ErrorKind::estimation_failure:
    case ErrorKind::degenerate_data:
    case ErrorKind::insufficient_data:
      return 3;
    default:
      return 1;
  }
}

ExperimentConfig with_globals(ExperimentConfig cfg, const Globals& g, bool seed_given) {
  if (seed_given) cfg.set("seed", std::to_string(g.seed));
  if (g.replicates > 0) cfg.set("replicates", std::to_string(g.replicates));
  cfg.set("threads", std::to_string(g.threads));
  if (!g.out.empty()) cfg.set("output", g.out);
  return cfg;
}

void report(const ExperimentResult& result, const ExperimentConfig& cfg) {
  if (cfg.output().empty()) {
    write_csv(result.rows, std::cout);
    std::cerr << result.summary.dump(2) << '\n';
  } else {
    std::cout << result.summary.dump(2) << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parameter estimation for fractional and multiscale diffusions"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  auto* seed_opt = app.add_option("--seed", g.seed, "Master seed")->capture_default_str();
  app.add_option("--out", g.out, "Output file (CSV; summaries go to a .json sidecar)");
  app.add_option("--replicates", g.replicates, "Override the replicate count");
  app.add_option("--threads", g.threads, "Worker threads")->capture_default_str();

  // simulate
  auto* sim = app.add_subcommand("simulate", "Sample one path and write it as t,x CSV");
  std::string model = "fou";
  double hurst = 0.7, theta = 1.0, sigma = 1.0, epsilon = 0.01, eta = 0.0, delta = 0.01,
         horizon = 1.0, x0 = 1.0;
  sim->add_option("--model", model, "fbm | fou | physical | tfe")
      ->check(CLI::IsMember({"fbm", "fou", "physical", "tfe"}))
      ->capture_default_str();
  sim->add_option("--hurst", hurst)->capture_default_str();
  sim->add_option("--theta", theta)->capture_default_str();
  sim->add_option("--sigma", sigma)->capture_default_str();
  sim->add_option("--epsilon", epsilon)->capture_default_str();
  sim->add_option("--eta", eta)->capture_default_str();
  sim->add_option("--delta", delta)->capture_default_str();
  sim->add_option("--horizon", horizon)->capture_default_str();
  sim->add_option("--x0", x0, "Initial slow state (tfe)")->capture_default_str();

  // estimators reading a t,x file
  std::string input;
  double lower = 0.0, upper = 10.0;
  auto* mle = app.add_subcommand("mle", "Profile maximum likelihood for (theta, sigma)");
  mle->add_option("input", input, "t,x CSV")->required();
  mle->add_option("--hurst", hurst)->capture_default_str();
  mle->add_option("--lower", lower)->capture_default_str();
  mle->add_option("--upper", upper)->capture_default_str();

  auto* est_sigma = app.add_subcommand("estimate-sigma", "Whitened quadratic-variation estimate of sigma^2");
  est_sigma->add_option("input", input, "t,x CSV")->required();
  est_sigma->add_option("--hurst", hurst)->capture_default_str();

  auto* est_hurst = app.add_subcommand("estimate-hurst", "Second-order variation estimate of H");
  est_hurst->add_option("input", input, "t,x CSV observed at half the coarse step")->required();

  auto* cal = app.add_subcommand("calibrate", "Recover driver slopes from an fOU path");
  cal->add_option("input", input, "t,x CSV")->required();
  cal->add_option("--hurst", hurst)->capture_default_str();
  cal->add_option("--theta", theta)->capture_default_str();
  cal->add_option("--sigma", sigma)->capture_default_str();

  auto* tfe = app.add_subcommand("tfe", "Trajectory fitting estimate of theta");
  tfe->add_option("input", input, "t,x CSV")->required();
  tfe->add_option("--x0", x0)->capture_default_str();
  tfe->add_option("--lower", lower)->capture_default_str();
  tfe->add_option("--upper", upper)->capture_default_str();

  // experiment front-ends
  std::vector<std::string> overrides;
  auto* conj = app.add_subcommand("verify-conjecture", "Trace scan and Wick moment check");
  conj->add_option("--set", overrides, "key=value overrides");
  auto* sig = app.add_subcommand("signature-check", "Chen, shuffle, quadrature and p-variation checks");
  sig->add_option("--set", overrides, "key=value overrides");
  std::string config_path;
  auto* exp = app.add_subcommand("experiment", "Run an experiment from a config file");
  exp->add_option("config", config_path)->required()->check(CLI::ExistingFile);
  exp->add_option("--set", overrides, "key=value overrides");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    auto run_config = [&](ExperimentConfig cfg) {
      for (const std::string& kv : overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) fail(ErrorKind::config_error, "override '" + kv + "' lacks '='");
        cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
      }
      cfg = with_globals(std::move(cfg), g, seed_opt->count() > 0);
      report(run_experiment(cfg), cfg);
    };

    if (*sim) {
      const SeedSpec seed{g.seed, 0};
      const SamplingGrid grid = SamplingGrid::make(delta, horizon);
      Trajectory path = [&] {
        if (model == "fbm") return sample_fbm(hurst, grid, seed, sigma);
        if (model == "fou") {
          const FouParams p{theta, sigma, hurst};
          p.validate();
          return sample_stationary_fou(theta, sigma, hurst, grid, seed);
        }
        if (model == "physical") {
          return PhysicalFbmSlowSampler(hurst, sigma, epsilon, grid).sample(seed);
        }
        return sample_tfe_system(TfeSystemParams{theta, eta, epsilon, hurst}, grid, seed, x0).slow;
      }();
      emit(g.out, trajectory_csv(path));
    } else if (*mle) {
      const LikelihoodContext ctx(read_trajectory(input), hurst);
      const ProfileEstimate e = profile_mle(ctx, lower, upper);
      emit(g.out, json{{"theta", e.theta}, {"sigma", e.sigma}, {"log_likelihood", e.log_likelihood}}
                          .dump(2) + "\n");
    } else if (*est_sigma) {
      const double s2 = sigma2_hat(read_trajectory(input), hurst);
      emit(g.out, json{{"sigma2", s2}, {"sigma", std::sqrt(s2)}}.dump(2) + "\n");
    } else if (*est_hurst) {
      emit(g.out, json{{"hurst", hurst_hat(read_trajectory(input))}}.dump(2) + "\n");
    } else if (*cal) {
      const FouParams p{theta, sigma, hurst};
      const CalibrationResult c = inverse_calibration(read_trajectory(input), p);
      std::ostringstream os;
      os << "cell,gradient\n";
      for (std::size_t k = 0; k < c.gradients.size(); ++k) {
        os << k + 1 << ',' << format_number(c.gradients[k]) << '\n';
      }
      emit(g.out, os.str());
    } else if (*tfe) {
      const TfeInstance instance{x0, lower, upper};
      instance.validate();
      emit(g.out, json{{"theta", tfe_estimate(read_trajectory(input), instance)}}.dump(2) + "\n");
    } else if (*conj) {
      run_config(ExperimentConfig::defaults("conjecture-scan"));
    } else if (*sig) {
      run_config(ExperimentConfig::defaults("signature-check"));
    } else if (*exp) {
      run_config(ExperimentConfig::load(config_path));
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
