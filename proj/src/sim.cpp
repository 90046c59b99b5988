#include "dprtf/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace dprtf {

namespace {

constexpr int kSincHalf = 40;  // 81-tap windowed sinc for fractional delays

double distance(const std::array<double, 3> &a, const std::array<double, 3> &b) {
  const double dx = a[0] - b[0];
  const double dy = a[1] - b[1];
  const double dz = a[2] - b[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

void add_pulse(std::vector<double> &h, double delay_samples, double amplitude) {
  const int lo = std::max(0, static_cast<int>(std::ceil(delay_samples)) - kSincHalf);
  const int hi = std::min(static_cast<int>(h.size()) - 1,
                          static_cast<int>(std::floor(delay_samples)) + kSincHalf);
  for (int n = lo; n <= hi; ++n) {
    const double x = static_cast<double>(n) - delay_samples;
    const double win = 0.5 * (1.0 + std::cos(std::numbers::pi * x / (kSincHalf + 1)));
    double sinc = 1.0;
    if (x != 0.0) sinc = std::sin(std::numbers::pi * x) / (std::numbers::pi * x);
    h[n] += amplitude * win * sinc;
  }
}

// Deterministic per-image jitter in [-1, 1): decorrelates the coherent
// summation of equidistant image pairs that symmetric source/microphone
// placements would otherwise produce (the usual randomized image-source
// trick against sweeping-echo and degeneracy artifacts).
double image_jitter(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return static_cast<double>(x >> 11) * 0x1p-52 * 2.0 - 1.0;
}

bool inside_room(const std::array<double, 3> &p, const std::array<double, 3> &dims) {
  return p[0] > 0.0 && p[0] < dims[0] && p[1] > 0.0 && p[1] < dims[1] &&
         p[2] > 0.0 && p[2] < dims[2];
}

std::vector<double> white_noise(std::size_t len, std::mt19937_64 &rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> out(len);
  for (auto &v : out) v = gauss(rng);
  return out;
}

double signal_power(const std::vector<std::vector<double>> &channels) {
  double p = 0.0;
  for (const auto &ch : channels)
    for (double v : ch) p += v * v;
  return p;
}

// Schroeder T60 of a per-sample energy sequence (-5 dB to -25 dB segment).
double t60_of_energy(const std::vector<double> &energy, double fs) {
  std::vector<double> edc(energy.size());
  double acc = 0.0;
  for (std::size_t i = energy.size(); i-- > 0;) {
    acc += energy[i];
    edc[i] = acc;
  }
  auto time_at_db = [&](double db) {
    const double target = acc * std::pow(10.0, db / 10.0);
    for (std::size_t i = 0; i < edc.size(); ++i)
      if (edc[i] <= target) return static_cast<double>(i) / fs;
    return static_cast<double>(edc.size()) / fs;
  };
  return 3.0 * (time_at_db(-25.0) - time_at_db(-5.0));
}

// Per-reflection energy decay exponent gamma (energy factor e^{-gamma} per
// wall hit) such that the Schroeder T60 of the image lattice matches the
// request. Sabine's absorption only seeds the bracket: with equal absorption
// on all six walls the lattice energy decay is dominated by low-order axial
// image directions and comes out substantially slower than the Sabine
// estimate, so the exponent is calibrated against the lattice itself.
double calibrated_gamma(const std::array<double, 3> &dims,
                        const std::array<double, 3> &source,
                        const std::array<double, 3> &receiver, double t60,
                        double fs, std::size_t len, double gamma_sabine) {
  const double max_dist = (static_cast<double>(len) / fs) * kSpeedOfSound;
  const int nx_max = static_cast<int>(std::ceil(max_dist / (2.0 * dims[0])));
  const int ny_max = static_cast<int>(std::ceil(max_dist / (2.0 * dims[1])));
  const int nz_max = static_cast<int>(std::ceil(max_dist / (2.0 * dims[2])));
  const std::size_t rmax = 2 * (nx_max + ny_max + nz_max) + 4;

  // energy histogram over (delay bin, reflection count), source at receiver
  std::vector<double> hist(len * rmax, 0.0);
  for (int nx = -nx_max; nx <= nx_max; ++nx) {
    for (int ny = -ny_max; ny <= ny_max; ++ny) {
      for (int nz = -nz_max; nz <= nz_max; ++nz) {
        for (int q = 0; q < 8; ++q) {
          const int qx = q & 1, qy = (q >> 1) & 1, qz = (q >> 2) & 1;
          const std::array<double, 3> img{
              (1 - 2 * qx) * source[0] + 2.0 * nx * dims[0],
              (1 - 2 * qy) * source[1] + 2.0 * ny * dims[1],
              (1 - 2 * qz) * source[2] + 2.0 * nz * dims[2]};
          const std::size_t r = std::abs(nx - qx) + std::abs(nx) +
                                std::abs(ny - qy) + std::abs(ny) +
                                std::abs(nz - qz) + std::abs(nz);
          const double d = std::max(distance(img, receiver), 1e-3);
          const std::size_t bin =
              static_cast<std::size_t>(std::lround(d / kSpeedOfSound * fs));
          if (bin >= len) continue;
          hist[bin * rmax + r] += 1.0 / (d * d);
        }
      }
    }
  }

  std::vector<double> energy(len);
  auto lattice_t60 = [&](double gamma) {
    std::vector<double> decay(rmax);
    for (std::size_t r = 0; r < rmax; ++r)
      decay[r] = std::exp(-gamma * static_cast<double>(r));
    for (std::size_t bin = 0; bin < len; ++bin) {
      double e = 0.0;
      for (std::size_t r = 0; r < rmax; ++r) e += hist[bin * rmax + r] * decay[r];
      energy[bin] = e;
    }
    return t60_of_energy(energy, fs);
  };

  double lo = gamma_sabine / 8.0, hi = gamma_sabine * 8.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (lattice_t60(mid) > t60)
      lo = mid;  // decays too slowly, need more absorption
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

std::array<double, 3> SceneConfig::microphone_position(std::size_t mic) const {
  return {array_center[0] + microphone_offsets[mic][0],
          array_center[1] + microphone_offsets[mic][1],
          array_center[2] + microphone_offsets[mic][2]};
}

void SceneConfig::validate() const {
  if (t60 <= 0.0) throw std::invalid_argument("T60 must be positive");
  if (microphone_offsets.size() < 2)
    throw std::invalid_argument("at least two microphones required");
  if (!inside_room(source_position, room_dims))
    throw std::invalid_argument("source outside room");
  for (std::size_t j = 0; j < microphone_offsets.size(); ++j) {
    if (!inside_room(microphone_position(j), room_dims))
      throw std::invalid_argument("microphone outside room");
  }
  if (noise_kind != NoiseKind::Uncorrelated &&
      !inside_room(directional_noise_position, room_dims))
    throw std::invalid_argument("noise source outside room");
}

Brir simulate_brir_from(const SceneConfig &scene,
                        const std::array<double, 3> &source) {
  if (!inside_room(source, scene.room_dims))
    throw std::invalid_argument("source outside room");
  const double fs = scene.sample_rate;
  const auto &dims = scene.room_dims;
  const std::size_t num_mics = scene.microphone_offsets.size();

  // Sabine: T60 = 0.161 V / (alpha S), equal absorption on all six walls.
  const double volume = dims[0] * dims[1] * dims[2];
  const double surface =
      2.0 * (dims[0] * dims[1] + dims[0] * dims[2] + dims[1] * dims[2]);
  const double alpha =
      std::min(0.161 * volume / (surface * scene.t60), 1.0 - 1e-9);

  Brir brir;
  brir.sample_rate = fs;
  brir.responses.resize(num_mics);
  brir.direct_path_onset.resize(num_mics);
  brir.first_reflection_onset.resize(num_mics);

  double max_direct = 0.0;
  for (std::size_t j = 0; j < num_mics; ++j)
    max_direct = std::max(max_direct, distance(source, scene.microphone_position(j)));
  const double tail_s = scene.anechoic ? 0.01 : 1.5 * scene.t60;
  const std::size_t len = static_cast<std::size_t>(
      std::ceil((max_direct / kSpeedOfSound + tail_s) * fs)) + 2 * kSincHalf + 2;
  const double max_dist = (static_cast<double>(len) / fs) * kSpeedOfSound;

  double beta = 0.0;
  if (!scene.anechoic) {
    const double gamma =
        calibrated_gamma(dims, source, scene.array_center, scene.t60, fs, len,
                         -std::log1p(-alpha));
    beta = std::exp(-0.5 * gamma);  // amplitude factor per wall hit
  }

  const int nx_max = scene.anechoic ? 0 : static_cast<int>(std::ceil(max_dist / (2.0 * dims[0])));
  const int ny_max = scene.anechoic ? 0 : static_cast<int>(std::ceil(max_dist / (2.0 * dims[1])));
  const int nz_max = scene.anechoic ? 0 : static_cast<int>(std::ceil(max_dist / (2.0 * dims[2])));

  for (std::size_t j = 0; j < num_mics; ++j) {
    auto &h = brir.responses[j];
    h.assign(len, 0.0);
    const auto mic = scene.microphone_position(j);
    double first_reflection = std::numeric_limits<double>::infinity();

    for (int nx = -nx_max; nx <= nx_max; ++nx) {
      for (int ny = -ny_max; ny <= ny_max; ++ny) {
        for (int nz = -nz_max; nz <= nz_max; ++nz) {
          for (int q = 0; q < 8; ++q) {
            const int qx = q & 1, qy = (q >> 1) & 1, qz = (q >> 2) & 1;
            std::array<double, 3> img{
                (1 - 2 * qx) * source[0] + 2.0 * nx * dims[0],
                (1 - 2 * qy) * source[1] + 2.0 * ny * dims[1],
                (1 - 2 * qz) * source[2] + 2.0 * nz * dims[2]};
            const int reflections = std::abs(nx - qx) + std::abs(nx) +
                                    std::abs(ny - qy) + std::abs(ny) +
                                    std::abs(nz - qz) + std::abs(nz);
            if (scene.anechoic && reflections > 0) continue;
            if (reflections > 0) {
              const std::uint64_t key =
                  (static_cast<std::uint64_t>(static_cast<std::uint32_t>(nx)) << 35) ^
                  (static_cast<std::uint64_t>(static_cast<std::uint32_t>(ny)) << 19) ^
                  (static_cast<std::uint64_t>(static_cast<std::uint32_t>(nz)) << 3) ^
                  static_cast<std::uint64_t>(q);
              for (int axis = 0; axis < 3; ++axis)
                img[axis] += 0.02 * image_jitter(key * 3 + axis);
            }
            const double d = distance(img, mic);
            const double delay = d / kSpeedOfSound * fs;
            if (delay + kSincHalf >= static_cast<double>(len)) continue;
            const double amp =
                std::pow(-beta, reflections) /  // negative pressure reflection
                (4.0 * std::numbers::pi * std::max(d, 1e-3));
            add_pulse(h, delay, amp);
            if (reflections == 1)
              first_reflection = std::min(first_reflection, delay);
          }
        }
      }
    }

    const double direct = distance(source, mic) / kSpeedOfSound * fs;
    brir.direct_path_onset[j] = static_cast<std::size_t>(std::lround(direct));
    brir.first_reflection_onset[j] =
        std::isfinite(first_reflection)
            ? static_cast<std::size_t>(std::lround(first_reflection))
            : len;
  }
  return brir;
}

Brir simulate_brir(const SceneConfig &scene) {
  scene.validate();
  return simulate_brir_from(scene, scene.source_position);
}

Brir truncate_to_direct_path(const Brir &brir) {
  Brir out = brir;
  for (std::size_t j = 0; j < out.responses.size(); ++j) {
    auto &h = out.responses[j];
    for (std::size_t n = out.first_reflection_onset[j]; n < h.size(); ++n)
      h[n] = 0.0;
  }
  return out;
}

DpRtfGroundTruth ground_truth_dprtf(const Brir &brir, const StftConfig &config,
                                    std::size_t mic_i, std::size_t mic_j) {
  const CtfFilter a = ctf_from_impulse_response(brir.responses[mic_i], config, 1);
  const CtfFilter b = ctf_from_impulse_response(brir.responses[mic_j], config, 1);
  const std::size_t bins = config.num_bins();
  double max_mag = 0.0;
  for (std::size_t k = 0; k < bins; ++k)
    max_mag = std::max(max_mag, std::abs(a.at(k, 0)));
  DpRtfGroundTruth gt;
  gt.d.assign(bins, cplx(0.0, 0.0));
  gt.valid.assign(bins, 0);
  for (std::size_t k = 0; k < bins; ++k) {
    if (std::abs(a.at(k, 0)) > 1e-12 * max_mag) {
      gt.d[k] = b.at(k, 0) / a.at(k, 0);
      gt.valid[k] = 1;
    }
  }
  return gt;
}

std::vector<std::vector<double>> mix_scene(const std::vector<double> &speech,
                                           const SceneConfig &scene) {
  scene.validate();
  return mix_scene(speech, scene, simulate_brir(scene));
}

std::vector<std::vector<double>> mix_scene(const std::vector<double> &speech,
                                           const SceneConfig &scene,
                                           const Brir &speech_brir) {
  if (speech.empty()) throw std::invalid_argument("empty speech signal");
  const std::size_t num_mics = scene.microphone_offsets.size();
  std::vector<std::vector<double>> out(num_mics);
  for (std::size_t j = 0; j < num_mics; ++j)
    out[j] = fft_convolve(speech, speech_brir.responses[j]);
  const std::size_t len = out[0].size();

  if (std::isinf(scene.snr_db)) return out;

  std::mt19937_64 rng(scene.seed);
  std::vector<std::vector<double>> noise(num_mics, std::vector<double>(len, 0.0));

  const bool want_dir = scene.noise_kind != NoiseKind::Uncorrelated;
  const bool want_unc = scene.noise_kind != NoiseKind::Directional;

  std::vector<std::vector<double>> dir_noise, unc_noise;
  if (want_dir) {
    const Brir noise_brir =
        simulate_brir_from(scene, scene.directional_noise_position);
    const auto wgn = white_noise(len, rng);
    dir_noise.resize(num_mics);
    for (std::size_t j = 0; j < num_mics; ++j) {
      dir_noise[j] = fft_convolve(wgn, noise_brir.responses[j]);
      dir_noise[j].resize(len);
    }
  }
  if (want_unc) {
    unc_noise.resize(num_mics);
    for (std::size_t j = 0; j < num_mics; ++j) unc_noise[j] = white_noise(len, rng);
  }

  const double speech_power = signal_power(out);
  const double target_noise_power = speech_power / std::pow(10.0, scene.snr_db / 10.0);

  // Mixed noise: directional and uncorrelated components with identical powers.
  const double per_component =
      (want_dir && want_unc) ? target_noise_power / 2.0 : target_noise_power;
  if (want_dir) {
    const double p = signal_power(dir_noise);
    const double s = p > 0.0 ? std::sqrt(per_component / p) : 0.0;
    for (std::size_t j = 0; j < num_mics; ++j)
      for (std::size_t n = 0; n < len; ++n) noise[j][n] += s * dir_noise[j][n];
  }
  if (want_unc) {
    const double p = signal_power(unc_noise);
    const double s = p > 0.0 ? std::sqrt(per_component / p) : 0.0;
    for (std::size_t j = 0; j < num_mics; ++j)
      for (std::size_t n = 0; n < len; ++n) noise[j][n] += s * unc_noise[j][n];
  }
  for (std::size_t j = 0; j < num_mics; ++j)
    for (std::size_t n = 0; n < len; ++n) out[j][n] += noise[j][n];
  return out;
}

double schroeder_t60(const std::vector<double> &response, double sample_rate) {
  std::vector<double> edc(response.size());
  double acc = 0.0;
  for (std::size_t i = response.size(); i-- > 0;) {
    acc += response[i] * response[i];
    edc[i] = acc;
  }
  if (acc <= 0.0) throw std::invalid_argument("silent impulse response");
  const double total = acc;
  auto time_at_db = [&](double db) {
    const double target = total * std::pow(10.0, db / 10.0);
    for (std::size_t i = 0; i < edc.size(); ++i) {
      if (edc[i] <= target) return static_cast<double>(i) / sample_rate;
    }
    return static_cast<double>(edc.size()) / sample_rate;
  };
  const double t5 = time_at_db(-5.0);
  const double t25 = time_at_db(-25.0);
  return 3.0 * (t25 - t5);
}

}  // namespace dprtf
