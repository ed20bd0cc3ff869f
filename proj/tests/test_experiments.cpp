#include "doctest.h"

#include <cmath>
#include <sstream>

#include "fracdiff/experiments.hpp"

using namespace fracdiff;

namespace {

std::string csv_of(const ExperimentResult& r) {
  std::ostringstream out;
  write_csv(r.rows, out);
  return out.str();
}

ErrorKind kind_of(const std::string& text) {
  try {
    ExperimentConfig::parse_text(text);
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::io_error;
}

}  // namespace

TEST_CASE("CSV round trip") {
  ResultRow a;
  a.experiment = "clt";
  a.replicate = 3;
  a.delta = 0.1;
  a.hurst = 0.7;
  a.statistic = "sigma2_hat";
  a.value = 1.0 / 3.0;
  ResultRow b = a;
  b.replicate = 4;
  b.value = -2.5e-17;
  std::stringstream io;
  write_csv({a, b}, io);
  const auto back = read_csv(io);
  REQUIRE(back.size() == 2);
  CHECK(same_row(back[0], a));
  CHECK(same_row(back[1], b));
  CHECK(std::isnan(back[0].epsilon));
  CHECK(back[0].delta == 0.1);

  std::stringstream empty;
  write_csv({}, empty);
  CHECK(empty.str() == std::string(kCsvHeader) + "\n");
  CHECK(read_csv(empty).empty());
}

TEST_CASE("config errors name the offending key") {
  CHECK(kind_of("model.hurst = 0.7\n") == ErrorKind::config_error);
  CHECK(kind_of("experiment = clt\nmodel.colour = blue\n") == ErrorKind::config_error);
  CHECK(kind_of("experiment = clt\nseed = 1\nseed = 2\n") == ErrorKind::config_error);
  CHECK(kind_of("experiment = clt\njunk\n") == ErrorKind::config_error);
  CHECK(kind_of("experiment = nope\n") == ErrorKind::config_error);
  try {
    ExperimentConfig::parse_text("experiment = bias-sweep\nmodel.sigma = -1\n");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("model.sigma") != std::string::npos);
  }
  auto cfg = ExperimentConfig::defaults("clt");
  CHECK_THROWS_AS(cfg.set("model.hurst", "1.2"), Error);
  CHECK_THROWS_AS(cfg.set("replicates", "ten"), Error);
  const auto parsed = ExperimentConfig::parse_text("# comment\nexperiment = clt\n  replicates = 7 \n");
  CHECK(parsed.replicates() == 7);
  CHECK(parsed.number("model.hurst") == 0.7);
}

TEST_CASE("runs are reproducible and independent of the thread count") {
  auto cfg = ExperimentConfig::defaults("hurst-sweep");
  cfg.set("replicates", "6");
  cfg.set("grid.count", "256");
  const std::string first = csv_of(run_experiment(cfg));
  CHECK(first == csv_of(run_experiment(cfg)));
  cfg.set("threads", "3");
  CHECK(first == csv_of(run_experiment(cfg)));
  cfg.set("seed", "99");
  CHECK(first != csv_of(run_experiment(cfg)));
}

TEST_CASE("every experiment runs at small size") {
  for (const std::string& name : experiment_names()) {
    CAPTURE(name);
    auto cfg = ExperimentConfig::defaults(name);
    cfg.set("replicates", name == "conjecture-scan" ? "1" : "12");
    if (name == "conjecture-scan") {
      cfg.set("scan.sizes", "8,16");
      cfg.set("wick.size", "8");
      cfg.set("wick.samples", "200");
    }
    if (name == "consistency-rate") cfg.set("schedule.epsilons", "0.0625,0.015625");
    if (name == "clt") cfg.set("grid.delta", "0.015625");
    if (name == "hurst-sweep") cfg.set("grid.count", "128");
    if (name == "calibration-convergence") cfg.set("grid.levels", "2");
    const ExperimentResult r = run_experiment(cfg);
    CHECK_FALSE(r.rows.empty());
    CHECK(r.summary["experiment"] == name);
  }
}

TEST_CASE("parallel_for reports the first failing index") {
  try {
    parallel_for(10, 3, [](std::size_t i) {
      if (i == 4 || i == 7) throw std::runtime_error("boom");
    });
    FAIL("expected an error");
  } catch (const std::exception& e) {
    CHECK(std::string(e.what()).find("replicate 4") != std::string::npos);
  }
  CHECK(summary_path("out/run.csv") == std::filesystem::path("out/run.json"));
}
