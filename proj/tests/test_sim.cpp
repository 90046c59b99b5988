#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "dprtf/experiment.hpp"
#include "dprtf/sim.hpp"

using namespace dprtf;

namespace {

SceneConfig test_scene() {
  SceneConfig scene;
  scene.source_position = {4.0, 3.0, 1.5};
  return scene;
}

double energy(const std::vector<double> &x, std::size_t lo, std::size_t hi) {
  double acc = 0.0;
  for (std::size_t i = lo; i < std::min(hi, x.size()); ++i) acc += x[i] * x[i];
  return acc;
}

}  // namespace

TEST_CASE("anechoic response is a single pulse at the propagation delay") {
  SceneConfig scene = test_scene();
  scene.anechoic = true;
  const Brir brir = simulate_brir(scene);
  for (std::size_t j = 0; j < 2; ++j) {
    const auto &h = brir.responses[j];
    const std::size_t onset = brir.direct_path_onset[j];
    const double pulse = energy(h, onset > 45 ? onset - 45 : 0, onset + 45);
    const double total = energy(h, 0, h.size());
    CHECK(pulse / total > 0.999);
    // delay consistent with geometry
    double d = 0.0;
    const auto mic = scene.microphone_position(j);
    for (int a = 0; a < 3; ++a)
      d += (mic[a] - scene.source_position[a]) * (mic[a] - scene.source_position[a]);
    d = std::sqrt(d);
    const double expected = d / kSpeedOfSound * scene.sample_rate;
    CHECK(std::abs(static_cast<double>(onset) - expected) <= 1.0);
  }
}

TEST_CASE("broadside source arrives at both microphones together") {
  SceneConfig scene = test_scene();  // source on the array's symmetry axis
  const Brir brir = simulate_brir(scene);
  const auto o = brir.direct_path_onset;
  CHECK(std::abs(static_cast<int>(o[0]) - static_cast<int>(o[1])) <= 1);
}

TEST_CASE("schroeder decay of the simulated response matches the requested T60") {
  SceneConfig scene = test_scene();
  scene.t60 = 0.5;
  const Brir brir = simulate_brir(scene);
  const double t60 = schroeder_t60(brir.responses[0], scene.sample_rate);
  CHECK(t60 > 0.4);
  CHECK(t60 < 0.6);
}

TEST_CASE("schroeder integral is non-increasing") {
  SceneConfig scene = test_scene();
  scene.t60 = 0.3;
  const Brir brir = simulate_brir(scene);
  const auto &h = brir.responses[0];
  double acc = 0.0;
  std::vector<double> edc(h.size());
  for (std::size_t i = h.size(); i-- > 0;) {
    acc += h[i] * h[i];
    edc[i] = acc;
  }
  for (std::size_t i = 1; i < edc.size(); ++i) CHECK(edc[i] <= edc[i - 1] + 1e-12);
}

TEST_CASE("geometry errors are rejected") {
  SceneConfig scene = test_scene();
  scene.source_position = {9.0, 1.0, 1.5};
  CHECK_THROWS(simulate_brir(scene));
  scene = test_scene();
  scene.array_center = {0.05, 1.0, 1.5};  // one mic lands outside
  CHECK_THROWS(simulate_brir(scene));
}

TEST_CASE("doubling the distance decreases the direct-to-reverberant ratio") {
  auto drr = [](double distance) {
    SceneConfig scene = test_scene();
    scene.t60 = 0.5;
    scene.source_position = {4.0, 1.0 + distance, 1.5};
    const Brir brir = simulate_brir(scene);
    const auto &h = brir.responses[0];
    const std::size_t split = brir.first_reflection_onset[0];
    const double direct = energy(h, 0, split);
    const double reverb = energy(h, split, h.size());
    return 10.0 * std::log10(direct / reverb);
  };
  CHECK(drr(2.0) < drr(1.0));
}

TEST_CASE("truncation leaves an anechoic response unchanged") {
  SceneConfig scene = test_scene();
  scene.anechoic = true;
  const Brir brir = simulate_brir(scene);
  const Brir trunc = truncate_to_direct_path(brir);
  CHECK(trunc.responses == brir.responses);
}

TEST_CASE("truncation zeroes everything from the first reflection") {
  SceneConfig scene = test_scene();
  const Brir brir = simulate_brir(scene);
  const Brir trunc = truncate_to_direct_path(brir);
  for (std::size_t j = 0; j < 2; ++j) {
    CHECK(brir.first_reflection_onset[j] < brir.responses[j].size());
    for (std::size_t n = brir.first_reflection_onset[j];
         n < trunc.responses[j].size(); ++n)
      CHECK(trunc.responses[j][n] == 0.0);
    // the direct path itself survives
    CHECK(energy(trunc.responses[j], 0, trunc.responses[j].size()) > 0.0);
  }
}

TEST_CASE("ground truth dprtf of identical responses is one") {
  Brir brir;
  brir.responses.assign(2, std::vector<double>(400, 0.0));
  brir.responses[0][50] = 1.0;
  brir.responses[0][60] = 0.4;
  brir.responses[1] = brir.responses[0];
  brir.direct_path_onset = {50, 50};
  brir.first_reflection_onset = {400, 400};
  const auto cfg = default_stft_config();
  const auto gt = ground_truth_dprtf(brir, cfg, 0, 1);
  for (std::size_t k = 1; k < gt.d.size(); ++k) {
    if (!gt.valid[k]) continue;
    CHECK(std::abs(gt.d[k] - cplx(1.0, 0.0)) < 1e-10);
  }
}

TEST_CASE("ground truth dprtf of a pure delay is a phase ramp") {
  Brir brir;
  brir.responses.assign(2, std::vector<double>(400, 0.0));
  const std::size_t tau = 7;
  brir.responses[0][20] = 1.0;
  brir.responses[1][20 + tau] = 1.0;
  brir.direct_path_onset = {20, 20 + tau};
  brir.first_reflection_onset = {400, 400};
  const auto cfg = default_stft_config();
  const auto gt = ground_truth_dprtf(brir, cfg, 0, 1);
  for (std::size_t k = 1; k < gt.d.size(); ++k) {
    if (!gt.valid[k]) continue;
    const double expect = -2.0 * std::numbers::pi * k * tau / 256.0;
    CHECK(std::remainder(std::arg(gt.d[k]) - expect, 2.0 * std::numbers::pi) ==
          doctest::Approx(0.0).epsilon(1e-8));
  }
}

TEST_CASE("ground truth dprtf matches an independent windowed-DFT oracle") {
  SceneConfig scene = test_scene();
  scene.anechoic = true;
  const Brir brir = truncate_to_direct_path(simulate_brir(scene));
  const auto cfg = default_stft_config();
  const auto gt = ground_truth_dprtf(brir, cfg, 0, 1);

  // oracle: ratio of nu-windowed DFTs evaluated directly
  std::vector<double> nu(cfg.window_length);
  for (std::size_t n = 0; n < cfg.window_length; ++n) {
    double acc = 0.0;
    for (std::size_t m = n; m < cfg.window_length; ++m)
      acc += cfg.analysis_window[m] * cfg.synthesis_window[m - n];
    nu[n] = acc;
  }
  for (std::size_t k = 1; k < gt.d.size(); ++k) {
    if (!gt.valid[k]) continue;
    cplx a(0.0, 0.0), b(0.0, 0.0);
    for (std::size_t t = 0; t < cfg.window_length; ++t) {
      const double ang = -2.0 * std::numbers::pi * k * t / 256.0;
      const cplx w = nu[t] * cplx(std::cos(ang), std::sin(ang));
      a += brir.responses[0][t] * w;
      b += brir.responses[1][t] * w;
    }
    if (std::abs(a) < 1e-9) continue;
    CHECK(std::abs(gt.d[k] - b / a) < 1e-10 * (1.0 + std::abs(b / a)));
  }
}

TEST_CASE("infinite snr leaves the convolved speech untouched") {
  SceneConfig scene = test_scene();
  scene.anechoic = true;
  const auto speech = synth_speech(1.0, scene.sample_rate, 3);
  const Brir brir = simulate_brir(scene);
  const auto mixed = mix_scene(speech, scene, brir);
  const auto clean = fft_convolve(speech, brir.responses[0]);
  REQUIRE(mixed[0].size() == clean.size());
  for (std::size_t i = 0; i < clean.size(); ++i)
    CHECK(mixed[0][i] == clean[i]);
}

TEST_CASE("snr scaling is accurate to 0.1 dB") {
  SceneConfig scene = test_scene();
  scene.snr_db = 0.0;
  scene.noise_kind = NoiseKind::Mixed;
  scene.seed = 11;
  const auto speech = synth_speech(2.0, scene.sample_rate, 4);
  const Brir brir = simulate_brir(scene);
  const auto mixed = mix_scene(speech, scene, brir);
  double ps = 0.0, pn = 0.0;
  for (std::size_t j = 0; j < 2; ++j) {
    const auto clean = fft_convolve(speech, brir.responses[j]);
    for (std::size_t i = 0; i < clean.size(); ++i) {
      ps += clean[i] * clean[i];
      const double n = mixed[j][i] - clean[i];
      pn += n * n;
    }
  }
  const double snr = 10.0 * std::log10(ps / pn);
  CHECK(std::abs(snr - 0.0) <= 0.1);
}

TEST_CASE("uncorrelated noise channels are uncorrelated") {
  SceneConfig scene = test_scene();
  scene.anechoic = true;
  scene.snr_db = -20.0;  // noise dominates, measure its correlation
  scene.noise_kind = NoiseKind::Uncorrelated;
  scene.seed = 5;
  const auto speech = synth_speech(10.0, scene.sample_rate, 5);
  const Brir brir = simulate_brir(scene);
  const auto mixed = mix_scene(speech, scene, brir);
  std::vector<double> n0(mixed[0].size()), n1(mixed[1].size());
  const auto c0 = fft_convolve(speech, brir.responses[0]);
  const auto c1 = fft_convolve(speech, brir.responses[1]);
  for (std::size_t i = 0; i < n0.size(); ++i) {
    n0[i] = mixed[0][i] - c0[i];
    n1[i] = mixed[1][i] - c1[i];
  }
  double num = 0.0, d0 = 0.0, d1 = 0.0;
  for (std::size_t i = 0; i < n0.size(); ++i) {
    num += n0[i] * n1[i];
    d0 += n0[i] * n0[i];
    d1 += n1[i] * n1[i];
  }
  CHECK(std::abs(num / std::sqrt(d0 * d1)) < 0.05);
}

TEST_CASE("mix_scene is reproducible for a fixed seed") {
  SceneConfig scene = test_scene();
  scene.anechoic = true;
  scene.snr_db = 5.0;
  scene.noise_kind = NoiseKind::Mixed;
  scene.seed = 99;
  const auto speech = synth_speech(1.0, scene.sample_rate, 7);
  const Brir brir = simulate_brir(scene);
  const auto a = mix_scene(speech, scene, brir);
  const auto b = mix_scene(speech, scene, brir);
  CHECK(a == b);
}

TEST_CASE("empty speech is rejected") {
  SceneConfig scene = test_scene();
  scene.anechoic = true;
  const Brir brir = simulate_brir(scene);
  CHECK_THROWS(mix_scene({}, scene, brir));
}
