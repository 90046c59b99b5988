#ifndef DPRTF_BASELINES_HPP
#define DPRTF_BASELINES_HPP

#include "dprtf/estimator.hpp"
#include "dprtf/localize.hpp"

namespace dprtf {

// RTF under the multiplicative approximation: the Q=1 specialization of
// the DP-RTF pipeline (same classification and spectral subtraction code
// path, scalar system per bin).
PairEstimate rtf_mtf_estimate(const TimeFrequencyTensor &tf, std::size_t mic_i,
                              std::size_t mic_j, const EstimatorConfig &config);

DpRtfFeature rtf_mtf_feature(const TimeFrequencyTensor &tf,
                             const EstimatorConfig &config);

Direction rtf_mtf_localize(const TimeFrequencyTensor &tf,
                           const EstimatorConfig &config,
                           const TrainingSet &training);

// Steered-response power with PHAT weighting over the training directions;
// the table's direct-path transfers are the steering responses.
Direction srp_phat_localize(const TimeFrequencyTensor &tf,
                            const EstimatorConfig &config,
                            const TrainingSet &training);

// Per-direction SRP values, for inspection and tests.
std::vector<double> srp_phat_spectrum(const TimeFrequencyTensor &tf,
                                      const EstimatorConfig &config,
                                      const TrainingSet &training);

}  // namespace dprtf

#endif
