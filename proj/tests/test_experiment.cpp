#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "dprtf/experiment.hpp"

using namespace dprtf;

namespace {

std::string slurp(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<ResultRow> sample_rows() {
  std::vector<ResultRow> rows;
  ResultRow r;
  r.t60_s = 0.5;
  r.distance_m = 2.0;
  r.snr_db = 10.0;
  r.noise_kind = "mixed";
  r.method = "dprtf";
  r.trial = 0;
  r.utterance = "synth-42";
  r.truth_deg = -40.0;
  r.estimate_deg = -35.0;
  r.abs_error_deg = 5.0;
  rows.push_back(r);
  r.method = "srp-phat";
  r.error = "solver failed";
  rows.push_back(r);
  return rows;
}

}  // namespace

TEST_CASE("synthetic speech is deterministic per seed") {
  const auto a = synth_speech(1.0, 16000.0, 7);
  const auto b = synth_speech(1.0, 16000.0, 7);
  const auto c = synth_speech(1.0, 16000.0, 8);
  REQUIRE(a.size() == 16000);
  CHECK(a == b);
  CHECK(a != c);
  double energy = 0.0, peak = 0.0;
  std::size_t zeros = 0;
  for (double v : a) {
    energy += v * v;
    peak = std::max(peak, std::abs(v));
    if (v == 0.0) ++zeros;
  }
  CHECK(energy > 0.0);
  CHECK(peak < 10.0);
  CHECK(zeros > 500);  // pauses between bursts
}

TEST_CASE("localization error is the mean absolute difference") {
  CHECK(localization_error({10.0, -20.0}, {0.0, 0.0}) == doctest::Approx(15.0));
  CHECK(localization_error({5.0}, {5.0}) == 0.0);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> az(-90.0, 90.0);
  std::vector<double> est, truth;
  double acc = 0.0;
  for (int i = 0; i < 200; ++i) {
    est.push_back(az(rng));
    truth.push_back(az(rng));
    acc += std::abs(est.back() - truth.back());
  }
  CHECK(localization_error(est, truth) == doctest::Approx(acc / 200.0));
  CHECK_THROWS(localization_error({}, {}));
  CHECK_THROWS(localization_error({1.0}, {1.0, 2.0}));
}

TEST_CASE("noise kind names round-trip") {
  for (NoiseKind kind :
       {NoiseKind::Uncorrelated, NoiseKind::Directional, NoiseKind::Mixed})
    CHECK(noise_kind_from_name(noise_kind_name(kind)) == kind);
  CHECK_THROWS(noise_kind_from_name("pink"));
}

TEST_CASE("a 2x2x10 grid yields one row per cell, trial and method") {
  ExperimentConfig config;
  config.t60_list = {0.3, 0.5};
  config.snr_list = {0.0, 10.0};
  config.trials = 10;
  config.utterance_s = 1.0;
  config.seed = 4;
  const auto rows = run_grid(config);
  REQUIRE(rows.size() == 2 * 2 * 10 * 3);
  const std::vector<std::string> methods{"dprtf", "rtf-mtf", "srp-phat"};
  std::size_t failures = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto &row = rows[i];
    CHECK(row.method == methods[i % 3]);
    CHECK(row.trial == (i / 3) % 10);
    CHECK(row.noise_kind == "mixed");
    CHECK(std::abs(row.truth_deg) <= 90.0);
    if (!row.error.empty()) {
      ++failures;
      continue;
    }
    CHECK(std::abs(row.estimate_deg) <= 90.0);
    CHECK(row.abs_error_deg ==
          doctest::Approx(std::abs(row.estimate_deg - row.truth_deg)));
  }
  CHECK(failures < rows.size() / 2);  // the pipeline mostly succeeds

  const std::string path = "test_grid.csv";
  write_results_csv(path, rows);
  const auto text = slurp(path);
  std::remove(path.c_str());
  std::size_t lines = 0;
  for (char ch : text) {
    if (ch == '\n') ++lines;
    CHECK(ch != '\r');
  }
  CHECK(lines == rows.size() + 1);
}

TEST_CASE("empty grids and zero trials are rejected") {
  ExperimentConfig config;
  config.t60_list.clear();
  CHECK_THROWS(run_grid(config));
  config = ExperimentConfig{};
  config.trials = 0;
  CHECK_THROWS(run_grid(config));
}

TEST_CASE("csv output has the fixed schema and is byte deterministic") {
  const auto rows = sample_rows();
  const std::string path = "test_rows.csv";
  write_results_csv(path, rows);
  const auto first = slurp(path);
  write_results_csv(path, rows);
  const auto second = slurp(path);
  std::remove(path.c_str());
  CHECK(first == second);

  std::istringstream in(first);
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line ==
        "t60_s,distance_m,snr_db,noise_kind,method,trial,utterance,"
        "truth_deg,estimate_deg,abs_error_deg");
  REQUIRE(std::getline(in, line));
  CHECK(line == "0.500,2.000,10.0,mixed,dprtf,0,synth-42,-40.0,-35.0,5.000000");
  REQUIRE(std::getline(in, line));
  CHECK(line == "0.500,2.000,10.0,mixed,srp-phat,0,synth-42,-40.0,nan,nan");
  CHECK(!std::getline(in, line));
}
