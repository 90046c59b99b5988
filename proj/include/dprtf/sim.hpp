#ifndef DPRTF_SIM_HPP
#define DPRTF_SIM_HPP

#include <array>
#include <cstdint>
#include <limits>
#include <vector>

#include "dprtf/stft.hpp"

namespace dprtf {

inline constexpr double kSpeedOfSound = 343.0;  // m/s

enum class NoiseKind { Uncorrelated, Directional, Mixed };

struct SceneConfig {
  std::array<double, 3> room_dims{8.0, 5.0, 3.0};
  double t60 = 0.5;  // seconds
  std::array<double, 3> source_position{4.0, 2.0, 1.5};
  std::array<double, 3> array_center{4.0, 1.0, 1.5};
  // Microphone positions relative to array_center; default: 2 mics 0.2 m
  // apart along x.
  std::vector<std::array<double, 3>> microphone_offsets{{-0.1, 0.0, 0.0},
                                                        {0.1, 0.0, 0.0}};
  NoiseKind noise_kind = NoiseKind::Uncorrelated;
  std::array<double, 3> directional_noise_position{5.65, 0.05, 2.6};
  double snr_db = std::numeric_limits<double>::infinity();
  std::uint64_t seed = 0;
  bool anechoic = false;  // absorption 1: only the direct path survives
  double sample_rate = 16000.0;

  std::array<double, 3> microphone_position(std::size_t mic) const;
  void validate() const;  // geometry/parameter checks, throws on violation
};

struct Brir {
  std::vector<std::vector<double>> responses;  // one per microphone
  double sample_rate = 16000.0;
  std::vector<std::size_t> direct_path_onset;      // per microphone, samples
  std::vector<std::size_t> first_reflection_onset;  // per microphone, samples
};

// Image-source room impulse responses for all microphones of the scene.
// Wall absorption is frequency independent, derived from T60 via Sabine's
// formula; fractional delays use an 81-tap windowed sinc. Deterministic.
Brir simulate_brir(const SceneConfig &scene);

// Same, for an arbitrary source position (used for the directional noise).
Brir simulate_brir_from(const SceneConfig &scene,
                        const std::array<double, 3> &source);

// Zero everything from the first reflection onward; keeps only the
// direct-path response.
Brir truncate_to_direct_path(const Brir &brir);

struct DpRtfGroundTruth {
  std::vector<cplx> d;             // b0k / a0k per bin
  std::vector<std::uint8_t> valid; // 0 where the reference tap vanishes
};

// DP-RTF of a direct-path-only response pair via CTF tap 0 of each channel.
DpRtfGroundTruth ground_truth_dprtf(const Brir &brir, const StftConfig &config,
                                    std::size_t mic_i, std::size_t mic_j);

// Reverberant multichannel mixture: speech convolved with the scene BRIR
// plus noise scaled to the configured SNR over the full utterance.
std::vector<std::vector<double>> mix_scene(const std::vector<double> &speech,
                                           const SceneConfig &scene);
std::vector<std::vector<double>> mix_scene(const std::vector<double> &speech,
                                           const SceneConfig &scene,
                                           const Brir &speech_brir);

// Schroeder-integral reverberation time of an impulse response (seconds),
// from the -5 dB to -25 dB decay segment.
double schroeder_t60(const std::vector<double> &response, double sample_rate);

}  // namespace dprtf

#endif
