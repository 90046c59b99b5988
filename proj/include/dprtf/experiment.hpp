#ifndef DPRTF_EXPERIMENT_HPP
#define DPRTF_EXPERIMENT_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "dprtf/baselines.hpp"
#include "dprtf/localize.hpp"
#include "dprtf/sim.hpp"

namespace dprtf {

// Speech-like test signal: bursts of resonator-filtered noise separated by
// pauses. Deterministic per seed.
std::vector<double> synth_speech(double duration_s, double sample_rate,
                                 std::uint64_t seed);

// Mean absolute azimuth error in degrees.
double localization_error(const std::vector<double> &estimates_deg,
                          const std::vector<double> &truths_deg);

struct ExperimentConfig {
  std::vector<double> t60_list{0.5};
  std::vector<double> distance_list{2.0};
  std::vector<double> snr_list{10.0};
  std::vector<NoiseKind> noise_kinds{NoiseKind::Mixed};
  std::size_t trials = 10;
  double utterance_s = 3.0;
  std::vector<std::string> utterances;  // wav paths; empty = synthetic speech
  SceneConfig scene;                    // room/array geometry template
  std::size_t window_length = 256;
  std::size_t frame_step = 128;
  std::size_t d_frames = 12;
  double q_t60_fraction = 0.25;
  double band_high_hz = 4000.0;
  std::uint64_t seed = 1;
  std::string output_path = "bench.csv";
};

struct ResultRow {
  double t60_s = 0.0;
  double distance_m = 0.0;
  double snr_db = 0.0;
  std::string noise_kind;
  std::string method;
  std::size_t trial = 0;
  std::string utterance;
  double truth_deg = 0.0;
  double estimate_deg = 0.0;
  double abs_error_deg = 0.0;
  std::string error;  // non-empty when the trial failed
};

std::string noise_kind_name(NoiseKind kind);
NoiseKind noise_kind_from_name(const std::string &name);

// One row per (cell, trial, method), canonical order. Per-trial failures
// are recorded, the run continues.
std::vector<ResultRow> run_grid(const ExperimentConfig &config);

// CSV with mandatory header, UTF-8, LF line endings.
void write_results_csv(const std::string &path,
                       const std::vector<ResultRow> &rows);

}  // namespace dprtf

#endif
