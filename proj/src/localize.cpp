#include "dprtf/localize.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace dprtf {

namespace {

constexpr char kMagic[4] = {'D', 'P', 'T', 'B'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ostream &out, const T &v) {
  out.write(reinterpret_cast<const char *>(&v), sizeof(T));
}

template <typename T>
T get(std::istream &in) {
  T v;
  in.read(reinterpret_cast<char *>(&v), sizeof(T));
  if (!in) throw std::runtime_error("training table: truncated file");
  return v;
}

}  // namespace

std::vector<Direction> default_training_directions() {
  std::vector<Direction> dirs;
  for (int az = -90; az <= 90; az += 5) {
    dirs.push_back({static_cast<double>(az), 0.0});
  }
  return dirs;
}

std::array<double, 3> direction_to_position(const Direction &dir,
                                            const std::array<double, 3> &center,
                                            double radius) {
  const double az = dir.azimuth_deg * std::numbers::pi / 180.0;
  const double el = dir.elevation_deg * std::numbers::pi / 180.0;
  // Azimuth 0 faces +y (front of the array), positive azimuth toward +x.
  return {center[0] + radius * std::cos(el) * std::sin(az),
          center[1] + radius * std::cos(el) * std::cos(az),
          center[2] + radius * std::sin(el)};
}

TrainingSet build_training_set(const std::vector<Brir> &hrirs,
                               const std::vector<Direction> &directions,
                               const EstimatorConfig &config) {
  if (hrirs.size() != directions.size() || hrirs.empty())
    throw std::invalid_argument("training: directions/HRIRs mismatch");
  const std::size_t num_mics = hrirs[0].responses.size();
  const auto band = band_bins(config);

  // Ground-truth DP-RTF per direction and pair; drop bins that are invalid
  // anywhere so all features share the same dimension.
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < num_mics; ++i)
    for (std::size_t j = i + 1; j < num_mics; ++j) pairs.emplace_back(i, j);

  std::vector<std::vector<DpRtfGroundTruth>> gt(hrirs.size());
  std::vector<std::uint8_t> bin_ok(config.stft.num_bins(), 1);
  for (std::size_t i = 0; i < hrirs.size(); ++i) {
    for (const auto &[a, b] : pairs) {
      gt[i].push_back(ground_truth_dprtf(hrirs[i], config.stft, a, b));
      for (std::size_t k : band)
        if (!gt[i].back().valid[k]) bin_ok[k] = 0;
    }
  }

  TrainingSet training;
  training.num_mics = num_mics;
  for (std::size_t k : band)
    if (bin_ok[k]) training.bins.push_back(k);
  training.directions = directions;

  for (std::size_t i = 0; i < hrirs.size(); ++i) {
    DpRtfFeature feature;
    feature.bins = training.bins;
    feature.pairs = pairs;
    for (std::size_t pi = 0; pi < pairs.size(); ++pi) {
      for (std::size_t k : training.bins) {
        feature.c.push_back(normalize_dprtf(gt[i][pi].d[k]));
        feature.h.push_back(1);
      }
    }
    training.features.push_back(std::move(feature));

    std::vector<std::vector<cplx>> steer(num_mics);
    for (std::size_t m = 0; m < num_mics; ++m) {
      const auto taps =
          ctf_from_impulse_response(hrirs[i].responses[m], config.stft, 1);
      steer[m].resize(config.stft.num_bins());
      for (std::size_t k = 0; k < config.stft.num_bins(); ++k)
        steer[m][k] = taps.at(k, 0);
    }
    training.steering.push_back(std::move(steer));
  }
  return training;
}

TrainingSet train_from_scene(const SceneConfig &scene,
                             const EstimatorConfig &config,
                             const std::vector<Direction> &directions,
                             double radius) {
  std::vector<Brir> hrirs;
  hrirs.reserve(directions.size());
  for (const auto &dir : directions) {
    SceneConfig anechoic = scene;
    anechoic.anechoic = true;
    anechoic.source_position =
        direction_to_position(dir, scene.array_center, radius);
    hrirs.push_back(truncate_to_direct_path(simulate_brir(anechoic)));
  }
  return build_training_set(hrirs, directions, config);
}

Direction nearest_neighbor(const DpRtfFeature &feature,
                           const TrainingSet &training) {
  if (training.features.empty()) throw std::invalid_argument("empty training set");
  bool any_valid = false;
  for (auto v : feature.h) any_valid |= (v != 0);
  if (!any_valid) throw std::invalid_argument("no valid frequencies in feature");
  if (feature.pairs != training.features[0].pairs)
    throw std::invalid_argument("microphone pair layout mismatch");

  // Map each training bin to its index inside the test feature's bin list.
  std::vector<std::size_t> test_index;
  for (std::size_t k : training.bins) {
    const auto it = std::find(feature.bins.begin(), feature.bins.end(), k);
    if (it == feature.bins.end())
      throw std::invalid_argument("test feature missing training bin");
    test_index.push_back(static_cast<std::size_t>(it - feature.bins.begin()));
  }

  const std::size_t num_pairs = feature.pairs.size();
  const std::size_t test_stride = feature.bins.size();
  const std::size_t train_stride = training.bins.size();
  std::size_t best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < training.features.size(); ++i) {
    double dist = 0.0;
    for (std::size_t pi = 0; pi < num_pairs; ++pi) {
      for (std::size_t bi = 0; bi < train_stride; ++bi) {
        const std::size_t ti = pi * test_stride + test_index[bi];
        if (!feature.h[ti]) continue;
        dist += std::norm(feature.c[ti] -
                          training.features[i].c[pi * train_stride + bi]);
      }
    }
    if (dist < best_dist) {
      best_dist = dist;
      best = i;
    }
  }
  return training.directions[best];
}

void save_training_set(const std::string &path, const TrainingSet &training,
                       const EstimatorConfig &config) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.write(kMagic, 4);
  put(out, kVersion);
  put(out, config.stft.sample_rate);
  put(out, static_cast<std::uint64_t>(config.stft.window_length));
  put(out, static_cast<std::uint64_t>(config.stft.frame_step));
  put(out, static_cast<std::uint64_t>(config.d_frames));
  put(out, config.band_low_hz);
  put(out, config.band_high_hz);
  put(out, static_cast<std::uint64_t>(training.num_mics));
  put(out, static_cast<std::uint64_t>(training.bins.size()));
  for (std::size_t k : training.bins) put(out, static_cast<std::uint64_t>(k));
  put(out, static_cast<std::uint64_t>(training.directions.size()));
  const std::size_t spectrum_bins = config.stft.num_bins();
  put(out, static_cast<std::uint64_t>(spectrum_bins));
  for (std::size_t i = 0; i < training.directions.size(); ++i) {
    put(out, training.directions[i].azimuth_deg);
    put(out, training.directions[i].elevation_deg);
    for (const cplx &v : training.features[i].c) {
      put(out, v.real());
      put(out, v.imag());
    }
    for (std::size_t m = 0; m < training.num_mics; ++m) {
      for (std::size_t k = 0; k < spectrum_bins; ++k) {
        put(out, training.steering[i][m][k].real());
        put(out, training.steering[i][m][k].imag());
      }
    }
  }
}

TrainingSet load_training_set(const std::string &path, EstimatorConfig &config) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error("not a training table: " + path);
  if (get<std::uint32_t>(in) != kVersion)
    throw std::runtime_error("unsupported training table version");
  const double sample_rate = get<double>(in);
  const auto n = static_cast<std::size_t>(get<std::uint64_t>(in));
  const auto l = static_cast<std::size_t>(get<std::uint64_t>(in));
  config.stft = make_sine_window_config(n, l, sample_rate);
  config.d_frames = static_cast<std::size_t>(get<std::uint64_t>(in));
  config.band_low_hz = get<double>(in);
  config.band_high_hz = get<double>(in);

  TrainingSet training;
  training.num_mics = static_cast<std::size_t>(get<std::uint64_t>(in));
  const auto num_bins = static_cast<std::size_t>(get<std::uint64_t>(in));
  for (std::size_t i = 0; i < num_bins; ++i)
    training.bins.push_back(static_cast<std::size_t>(get<std::uint64_t>(in)));
  const auto num_dirs = static_cast<std::size_t>(get<std::uint64_t>(in));
  const auto spectrum_bins = static_cast<std::size_t>(get<std::uint64_t>(in));

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < training.num_mics; ++i)
    for (std::size_t j = i + 1; j < training.num_mics; ++j)
      pairs.emplace_back(i, j);

  for (std::size_t i = 0; i < num_dirs; ++i) {
    Direction dir;
    dir.azimuth_deg = get<double>(in);
    dir.elevation_deg = get<double>(in);
    training.directions.push_back(dir);
    DpRtfFeature feature;
    feature.bins = training.bins;
    feature.pairs = pairs;
    const std::size_t entries = pairs.size() * num_bins;
    for (std::size_t e = 0; e < entries; ++e) {
      const double re = get<double>(in);
      const double im = get<double>(in);
      feature.c.push_back(cplx(re, im));
      feature.h.push_back(1);
    }
    training.features.push_back(std::move(feature));
    std::vector<std::vector<cplx>> steer(training.num_mics,
                                         std::vector<cplx>(spectrum_bins));
    for (std::size_t m = 0; m < training.num_mics; ++m) {
      for (std::size_t k = 0; k < spectrum_bins; ++k) {
        const double re = get<double>(in);
        const double im = get<double>(in);
        steer[m][k] = cplx(re, im);
      }
    }
    training.steering.push_back(std::move(steer));
  }
  return training;
}

}  // namespace dprtf
