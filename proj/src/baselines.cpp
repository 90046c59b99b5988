#include "dprtf/baselines.hpp"

#include <cmath>
#include <stdexcept>

namespace dprtf {

PairEstimate rtf_mtf_estimate(const TimeFrequencyTensor &tf, std::size_t mic_i,
                              std::size_t mic_j, const EstimatorConfig &config) {
  EstimatorConfig mtf = config;
  mtf.q = 1;
  return estimate_dprtf_pair(tf, mic_i, mic_j, mtf);
}

DpRtfFeature rtf_mtf_feature(const TimeFrequencyTensor &tf,
                             const EstimatorConfig &config) {
  EstimatorConfig mtf = config;
  mtf.q = 1;
  return estimate_feature(tf, mtf);
}

Direction rtf_mtf_localize(const TimeFrequencyTensor &tf,
                           const EstimatorConfig &config,
                           const TrainingSet &training) {
  return nearest_neighbor(rtf_mtf_feature(tf, config), training);
}

std::vector<double> srp_phat_spectrum(const TimeFrequencyTensor &tf,
                                      const EstimatorConfig &config,
                                      const TrainingSet &training) {
  if (tf.channels() < 2) throw std::invalid_argument("srp-phat: need >= 2 channels");
  if (training.steering.empty()) throw std::invalid_argument("empty training set");
  const auto band = band_bins(config);

  // PHAT-weighted cross-spectra accumulated over frames, per pair and bin.
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < tf.channels(); ++i)
    for (std::size_t j = i + 1; j < tf.channels(); ++j) pairs.emplace_back(i, j);

  double total_energy = 0.0;
  std::vector<std::vector<cplx>> gcc(pairs.size(),
                                     std::vector<cplx>(tf.bins(), cplx(0.0, 0.0)));
  for (std::size_t pi = 0; pi < pairs.size(); ++pi) {
    const auto [i, j] = pairs[pi];
    for (std::size_t k : band) {
      cplx acc(0.0, 0.0);
      for (std::size_t p = 0; p < tf.frames(); ++p) {
        acc += tf.at(i, p, k) * std::conj(tf.at(j, p, k));
        total_energy += std::norm(tf.at(i, p, k));
      }
      const double mag = std::abs(acc);
      if (mag > 0.0) gcc[pi][k] = acc / mag;  // unit magnitude per bin
    }
  }
  if (total_energy <= 0.0) throw std::invalid_argument("srp-phat: silent input");

  std::vector<double> srp(training.directions.size(), 0.0);
  for (std::size_t d = 0; d < training.directions.size(); ++d) {
    double power = 0.0;
    for (std::size_t pi = 0; pi < pairs.size(); ++pi) {
      const auto [i, j] = pairs[pi];
      for (std::size_t k : band) {
        if (gcc[pi][k] == cplx(0.0, 0.0)) continue;
        const cplx steer =
            training.steering[d][i][k] * std::conj(training.steering[d][j][k]);
        const double mag = std::abs(steer);
        if (mag == 0.0) continue;
        power += (gcc[pi][k] * std::conj(steer / mag)).real();
      }
    }
    srp[d] = power;
  }
  return srp;
}

Direction srp_phat_localize(const TimeFrequencyTensor &tf,
                            const EstimatorConfig &config,
                            const TrainingSet &training) {
  const auto srp = srp_phat_spectrum(tf, config, training);
  std::size_t best = 0;
  for (std::size_t d = 1; d < srp.size(); ++d)
    if (srp[d] > srp[best]) best = d;
  return training.directions[best];
}

}  // namespace dprtf
