// Command-line harness: scene simulation, training-table construction,
// single-file localization, benchmark grids and classification statistics.

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "dprtf/experiment.hpp"
#include "dprtf/wav.hpp"

using nlohmann::json;
using namespace dprtf;

namespace {

// Relative output paths land under DPRTF_OUTPUT_DIR when it is set.
std::string resolve_output(const std::string &path) {
  const char *base = std::getenv("DPRTF_OUTPUT_DIR");
  if (base == nullptr || path.empty() || std::filesystem::path(path).is_absolute())
    return path;
  return (std::filesystem::path(base) / path).string();
}

json load_config(const std::string &path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  json cfg;
  in >> cfg;
  return cfg;
}

template <typename T>
void from_config(const json &cfg, const char *key, T &value) {
  if (cfg.contains(key)) value = cfg.at(key).get<T>();
}

void apply_scene_config(const json &cfg, SceneConfig &scene) {
  from_config(cfg, "room_dims", scene.room_dims);
  from_config(cfg, "array_center", scene.array_center);
  from_config(cfg, "t60", scene.t60);
  from_config(cfg, "sample_rate", scene.sample_rate);
  if (cfg.contains("microphone_offsets"))
    scene.microphone_offsets =
        cfg.at("microphone_offsets").get<std::vector<std::array<double, 3>>>();
  if (cfg.contains("directional_noise_position"))
    scene.directional_noise_position =
        cfg.at("directional_noise_position").get<std::array<double, 3>>();
}

int cmd_simulate(const std::string &config_path, double azimuth, double distance,
                 double t60, double snr, const std::string &noise,
                 std::uint64_t seed, const std::string &speech_path,
                 double duration, const std::string &out_prefix) {
  const json cfg = load_config(config_path);
  SceneConfig scene;
  apply_scene_config(cfg, scene);
  scene.t60 = t60;
  scene.snr_db = snr;
  scene.noise_kind = noise_kind_from_name(noise);
  scene.seed = seed;
  scene.source_position = direction_to_position({azimuth, 0.0},
                                                scene.array_center, distance);
  scene.validate();

  std::vector<double> speech;
  std::string utterance;
  if (!speech_path.empty()) {
    const WavData wav = read_wav(speech_path);
    if (wav.sample_rate != scene.sample_rate)
      throw std::runtime_error("speech sample rate mismatch");
    speech = wav.channels[0];
    utterance = speech_path;
  } else {
    speech = synth_speech(duration, scene.sample_rate, seed);
    utterance = "synth-" + std::to_string(seed);
  }

  const Brir brir = simulate_brir(scene);
  const auto signals = mix_scene(speech, scene, brir);

  const std::string prefix = resolve_output(out_prefix);
  WavData brir_wav{brir.responses, scene.sample_rate};
  write_wav(prefix + "_brir.wav", brir_wav);
  WavData mix_wav{signals, scene.sample_rate};
  write_wav(prefix + "_mix.wav", mix_wav);

  json meta;
  meta["azimuth_deg"] = azimuth;
  meta["distance_m"] = distance;
  meta["t60_s"] = t60;
  meta["snr_db"] = std::isinf(snr) ? json(nullptr) : json(snr);
  meta["noise_kind"] = noise;
  meta["seed"] = seed;
  meta["utterance"] = utterance;
  meta["sample_rate"] = scene.sample_rate;
  meta["room_dims"] = scene.room_dims;
  meta["array_center"] = scene.array_center;
  meta["microphone_offsets"] = scene.microphone_offsets;
  meta["direct_path_onset"] = brir.direct_path_onset;
  meta["first_reflection_onset"] = brir.first_reflection_onset;
  std::ofstream meta_out(prefix + "_scene.json");
  meta_out << meta.dump(2) << "\n";
  std::cout << "wrote " << prefix << "_brir.wav, " << prefix << "_mix.wav, "
            << prefix << "_scene.json\n";
  return 0;
}

int cmd_train(const std::string &config_path, double radius,
              const std::string &out_path) {
  const json cfg = load_config(config_path);
  SceneConfig scene;
  apply_scene_config(cfg, scene);
  EstimatorConfig est;
  std::size_t n = 256, l = 128;
  from_config(cfg, "window_length", n);
  from_config(cfg, "frame_step", l);
  est.stft = make_sine_window_config(n, l, scene.sample_rate);
  from_config(cfg, "d_frames", est.d_frames);
  from_config(cfg, "band_high_hz", est.band_high_hz);

  const TrainingSet training =
      train_from_scene(scene, est, default_training_directions(), radius);
  const std::string path = resolve_output(out_path);
  save_training_set(path, training, est);
  std::cout << "wrote " << path << " (" << training.directions.size()
            << " directions, " << training.bins.size() << " bins)\n";
  return 0;
}

int cmd_localize(const std::string &table_path, const std::string &input_path,
                 double t60, const std::string &method) {
  EstimatorConfig est;
  const TrainingSet training = load_training_set(table_path, est);
  est.q = ctf_length_for_t60(t60, est.stft);

  const WavData wav = read_wav(input_path);
  if (wav.sample_rate != est.stft.sample_rate)
    throw std::runtime_error("input sample rate mismatch");
  if (wav.channels.size() != training.num_mics)
    throw std::runtime_error("channel count does not match training table");
  const auto tf = stft_analyze_multi(wav.channels, est.stft);

  Direction dir;
  if (method == "dprtf")
    dir = nearest_neighbor(estimate_feature(tf, est), training);
  else if (method == "rtf-mtf")
    dir = rtf_mtf_localize(tf, est, training);
  else if (method == "srp-phat")
    dir = srp_phat_localize(tf, est, training);
  else
    throw std::runtime_error("unknown method: " + method);
  std::cout << dir.azimuth_deg << "\n";
  return 0;
}

int cmd_bench(const std::string &config_path, const CLI::App &sub,
              ExperimentConfig overrides) {
  const json cfg = load_config(config_path);
  ExperimentConfig exp;
  apply_scene_config(cfg, exp.scene);
  from_config(cfg, "t60", exp.t60_list);
  from_config(cfg, "distance", exp.distance_list);
  from_config(cfg, "snr", exp.snr_list);
  if (cfg.contains("noise")) {
    exp.noise_kinds.clear();
    for (const auto &name : cfg.at("noise"))
      exp.noise_kinds.push_back(noise_kind_from_name(name.get<std::string>()));
  }
  from_config(cfg, "trials", exp.trials);
  from_config(cfg, "utterance_s", exp.utterance_s);
  from_config(cfg, "utterances", exp.utterances);
  from_config(cfg, "window_length", exp.window_length);
  from_config(cfg, "frame_step", exp.frame_step);
  from_config(cfg, "d_frames", exp.d_frames);
  from_config(cfg, "q_t60_fraction", exp.q_t60_fraction);
  from_config(cfg, "band_high_hz", exp.band_high_hz);
  from_config(cfg, "seed", exp.seed);
  from_config(cfg, "output", exp.output_path);

  // Command-line flags override config keys.
  if (sub.count("--t60")) exp.t60_list = overrides.t60_list;
  if (sub.count("--distance")) exp.distance_list = overrides.distance_list;
  if (sub.count("--snr")) exp.snr_list = overrides.snr_list;
  if (sub.count("--trials")) exp.trials = overrides.trials;
  if (sub.count("--utterance-s")) exp.utterance_s = overrides.utterance_s;
  if (sub.count("--seed")) exp.seed = overrides.seed;
  if (sub.count("--output")) exp.output_path = overrides.output_path;

  const auto rows = run_grid(exp);
  const std::string path = resolve_output(exp.output_path);
  write_results_csv(path, rows);
  std::cout << "wrote " << rows.size() << " rows to " << path << "\n";
  return 0;
}

int cmd_stats(std::size_t d, std::size_t p_tilde, std::size_t r,
              const std::string &out_path) {
  const double p_eff = equivalent_sequence_length(p_tilde, r, d);
  const MinMaxModel model = min_max_statistics(d, p_eff);
  const std::string path = resolve_output(out_path);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "xi,f_min,f_max,cdf_min,cdf_max\n";
  double acc_min = 0.0, total_min = 0.0;
  for (double v : model.f_min) total_min += v;
  char buf[160];
  for (std::size_t i = 0; i < model.grid.size(); ++i) {
    acc_min += model.f_min[i];
    std::snprintf(buf, sizeof(buf), "%.4f,%.8f,%.8f,%.8f,%.8f\n",
                  model.grid[i], model.f_min[i], model.f_max[i],
                  total_min > 0 ? acc_min / total_min : 0.0, model.cdf_max[i]);
    out << buf;
  }
  std::cout << "P_eff=" << p_eff << " xi_min_mean=" << model.xi_min_mean
            << " r1=" << model.r1 << " r2=" << model.r2 << "\n"
            << "wrote " << path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Direct-path relative transfer function sound source localizer"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "JSON configuration file")
      ->envname("DPRTF_CONFIG");

  // simulate
  auto *sim = app.add_subcommand("simulate", "Emit BRIR and mixed scene WAVs");
  double azimuth = 30.0, distance = 2.0, t60 = 0.5, snr = 10.0, duration = 3.0;
  double radius = 1.0;
  std::string noise = "mixed", speech_path, out_prefix = "scene";
  std::uint64_t seed = 1;
  sim->add_option("--azimuth", azimuth, "source azimuth in degrees");
  sim->add_option("--distance", distance, "source distance in meters");
  sim->add_option("--t60", t60, "reverberation time in seconds");
  sim->add_option("--snr", snr, "signal-to-noise ratio in dB");
  sim->add_option("--noise", noise, "uncorrelated|directional|mixed");
  sim->add_option("--seed", seed, "random seed");
  sim->add_option("--speech", speech_path, "mono speech WAV (else synthetic)");
  sim->add_option("--duration", duration, "synthetic speech duration (s)");
  sim->add_option("--out", out_prefix, "output file prefix");

  // train
  auto *train = app.add_subcommand("train", "Build the lookup table");
  std::string table_path = "table.bin";
  train->add_option("--radius", radius, "training source radius in meters");
  train->add_option("--out", table_path, "output table path");

  // localize
  auto *loc = app.add_subcommand("localize", "Localize a multichannel WAV");
  std::string input_path, method = "dprtf";
  loc->add_option("--table", table_path, "training table")->required();
  loc->add_option("--input", input_path, "multichannel WAV")->required();
  loc->add_option("--t60", t60, "assumed reverberation time (s)");
  loc->add_option("--method", method, "dprtf|rtf-mtf|srp-phat");

  // bench
  auto *bench = app.add_subcommand("bench", "Run an experiment grid to CSV");
  ExperimentConfig overrides;
  bench->add_option("--t60", overrides.t60_list, "T60 grid (s)");
  bench->add_option("--distance", overrides.distance_list, "distance grid (m)");
  bench->add_option("--snr", overrides.snr_list, "SNR grid (dB)");
  bench->add_option("--trials", overrides.trials, "trials per cell");
  bench->add_option("--utterance-s", overrides.utterance_s, "utterance length (s)");
  bench->add_option("--seed", overrides.seed, "base seed");
  bench->add_option("--output", overrides.output_path, "output CSV path");

  // stats
  auto *stats = app.add_subcommand("stats", "Emit min/max statistic curves");
  std::size_t stat_d = 12, stat_p = 69, stat_r = 1;
  std::string stats_out = "stats.csv";
  stats->add_option("--d", stat_d, "averaging frames D");
  stats->add_option("--p-tilde", stat_p, "raw sequence length");
  stats->add_option("--r", stat_r, "frame increment R");
  stats->add_option("--out", stats_out, "output CSV path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed())
      return cmd_simulate(config_path, azimuth, distance, t60, snr, noise, seed,
                          speech_path, duration, out_prefix);
    if (train->parsed()) return cmd_train(config_path, radius, table_path);
    if (loc->parsed()) return cmd_localize(table_path, input_path, t60, method);
    if (bench->parsed()) return cmd_bench(config_path, *bench, overrides);
    if (stats->parsed()) return cmd_stats(stat_d, stat_p, stat_r, stats_out);
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
