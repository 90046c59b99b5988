#include "dprtf/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <stdexcept>
#include <tuple>

#include "dprtf/wav.hpp"

namespace dprtf {

std::vector<double> synth_speech(double duration_s, double sample_rate,
                                 std::uint64_t seed) {
  const std::size_t len = static_cast<std::size_t>(duration_s * sample_rate);
  std::vector<double> out(len, 0.0);
  std::mt19937_64 rng(seed ^ 0x5eec5eec5eec5eecULL);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> burst_dur(0.15, 0.4);
  std::uniform_real_distribution<double> gap_dur(0.05, 0.25);
  std::uniform_real_distribution<double> freq(300.0, 3500.0);
  std::uniform_real_distribution<double> level(0.3, 1.0);

  std::size_t n = 0;
  while (n < len) {
    const std::size_t burst = static_cast<std::size_t>(burst_dur(rng) * sample_rate);
    const std::size_t gap = static_cast<std::size_t>(gap_dur(rng) * sample_rate);
    const double theta = 2.0 * std::numbers::pi * freq(rng) / sample_rate;
    const double r = 0.97;
    const double a1 = 2.0 * r * std::cos(theta);
    const double a2 = -r * r;
    const double amp = level(rng);
    const std::size_t ramp = static_cast<std::size_t>(0.02 * sample_rate);
    double y1 = 0.0, y2 = 0.0;
    for (std::size_t i = 0; i < burst && n + i < len; ++i) {
      const double x = gauss(rng);
      const double y = x + a1 * y1 + a2 * y2;
      y2 = y1;
      y1 = y;
      double env = 1.0;
      if (i < ramp) env = 0.5 * (1.0 - std::cos(std::numbers::pi * i / ramp));
      if (burst - i <= ramp)
        env = 0.5 * (1.0 - std::cos(std::numbers::pi * (burst - i) / ramp));
      // resonator plus a broadband floor so all bins get excited
      out[n + i] = amp * env * (0.1 * y + 0.5 * x);
    }
    n += burst + gap;
  }
  double rms = 0.0;
  for (double v : out) rms += v * v;
  rms = std::sqrt(rms / static_cast<double>(len));
  if (rms > 0.0) {
    for (double &v : out) v *= 0.1 / rms;
  }
  return out;
}

double localization_error(const std::vector<double> &estimates_deg,
                          const std::vector<double> &truths_deg) {
  if (estimates_deg.empty() || estimates_deg.size() != truths_deg.size())
    throw std::invalid_argument("localization_error: bad input lengths");
  double acc = 0.0;
  for (std::size_t i = 0; i < estimates_deg.size(); ++i)
    acc += std::abs(estimates_deg[i] - truths_deg[i]);
  return acc / static_cast<double>(estimates_deg.size());
}

std::string noise_kind_name(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::Uncorrelated: return "uncorrelated";
    case NoiseKind::Directional: return "directional";
    case NoiseKind::Mixed: return "mixed";
  }
  return "unknown";
}

NoiseKind noise_kind_from_name(const std::string &name) {
  if (name == "uncorrelated") return NoiseKind::Uncorrelated;
  if (name == "directional") return NoiseKind::Directional;
  if (name == "mixed") return NoiseKind::Mixed;
  throw std::invalid_argument("unknown noise kind: " + name);
}

std::vector<ResultRow> run_grid(const ExperimentConfig &config) {
  if (config.t60_list.empty() || config.distance_list.empty() ||
      config.snr_list.empty() || config.noise_kinds.empty())
    throw std::invalid_argument("empty experiment grid");
  if (config.trials == 0) throw std::invalid_argument("trials must be >= 1");

  EstimatorConfig est;
  est.stft = make_sine_window_config(config.window_length, config.frame_step,
                                     config.scene.sample_rate);
  est.d_frames = config.d_frames;
  est.band_high_hz = config.band_high_hz;

  const auto directions = default_training_directions();
  const TrainingSet training = train_from_scene(config.scene, est, directions);

  // BRIRs reused across trials that share geometry.
  std::map<std::tuple<double, double, double>, Brir> brir_cache;

  std::vector<ResultRow> rows;
  for (double t60 : config.t60_list) {
    for (double dist : config.distance_list) {
      for (double snr : config.snr_list) {
        for (NoiseKind kind : config.noise_kinds) {
          for (std::size_t trial = 0; trial < config.trials; ++trial) {
            // Per-trial deterministic seed independent of cell order.
            std::uint64_t trial_seed = config.seed;
            trial_seed = trial_seed * 1000003 + static_cast<std::uint64_t>(t60 * 1000);
            trial_seed = trial_seed * 1000003 + static_cast<std::uint64_t>(dist * 1000);
            trial_seed = trial_seed * 1000003 + trial;
            std::mt19937_64 rng(trial_seed);

            const std::size_t dir_index = rng() % directions.size();
            const Direction truth = directions[dir_index];

            ResultRow base;
            base.t60_s = t60;
            base.distance_m = dist;
            base.snr_db = snr;
            base.noise_kind = noise_kind_name(kind);
            base.trial = trial;
            base.truth_deg = truth.azimuth_deg;

            std::vector<double> speech;
            try {
              if (!config.utterances.empty()) {
                const auto &path = config.utterances[trial % config.utterances.size()];
                base.utterance = path;
                const WavData wav = read_wav(path);
                if (wav.sample_rate != config.scene.sample_rate)
                  throw std::runtime_error("sample rate mismatch: " + path);
                speech = wav.channels[0];
              } else {
                const std::uint64_t speech_seed = rng();
                base.utterance = "synth-" + std::to_string(speech_seed);
                speech = synth_speech(config.utterance_s,
                                      config.scene.sample_rate, speech_seed);
              }

              SceneConfig scene = config.scene;
              scene.t60 = t60;
              scene.snr_db = snr;
              scene.noise_kind = kind;
              scene.seed = rng();
              scene.source_position =
                  direction_to_position(truth, scene.array_center, dist);
              scene.validate();

              const auto key = std::make_tuple(t60, dist, truth.azimuth_deg);
              auto it = brir_cache.find(key);
              if (it == brir_cache.end())
                it = brir_cache.emplace(key, simulate_brir(scene)).first;
              const auto signals = mix_scene(speech, scene, it->second);
              const auto tf = stft_analyze_multi(signals, est.stft);

              EstimatorConfig cell_est = est;
              cell_est.q = ctf_length_for_t60(t60, est.stft, config.q_t60_fraction);

              for (std::string method : {"dprtf", "rtf-mtf", "srp-phat"}) {
                ResultRow row = base;
                row.method = method;
                try {
                  Direction estimate;
                  if (method == "dprtf")
                    estimate = nearest_neighbor(estimate_feature(tf, cell_est),
                                                training);
                  else if (method == "rtf-mtf")
                    estimate = rtf_mtf_localize(tf, cell_est, training);
                  else
                    estimate = srp_phat_localize(tf, cell_est, training);
                  row.estimate_deg = estimate.azimuth_deg;
                  row.abs_error_deg = std::abs(estimate.azimuth_deg - truth.azimuth_deg);
                } catch (const std::exception &e) {
                  row.error = e.what();
                }
                rows.push_back(row);
              }
            } catch (const std::exception &e) {
              for (std::string method : {"dprtf", "rtf-mtf", "srp-phat"}) {
                ResultRow row = base;
                row.method = method;
                row.error = e.what();
                rows.push_back(row);
              }
            }
          }
        }
      }
    }
  }
  return rows;
}

void write_results_csv(const std::string &path,
                       const std::vector<ResultRow> &rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "t60_s,distance_m,snr_db,noise_kind,method,trial,utterance,"
         "truth_deg,estimate_deg,abs_error_deg\n";
  char buf[256];
  for (const auto &row : rows) {
    std::snprintf(buf, sizeof(buf), "%.3f,%.3f,%.1f,", row.t60_s,
                  row.distance_m, row.snr_db);
    out << buf << row.noise_kind << ',' << row.method << ',' << row.trial << ','
        << row.utterance << ',';
    if (row.error.empty()) {
      std::snprintf(buf, sizeof(buf), "%.1f,%.1f,%.6f\n", row.truth_deg,
                    row.estimate_deg, row.abs_error_deg);
      out << buf;
    } else {
      std::snprintf(buf, sizeof(buf), "%.1f,nan,nan\n", row.truth_deg);
      out << buf;
    }
  }
}

}  // namespace dprtf
