#ifndef DPRTF_ESTIMATOR_HPP
#define DPRTF_ESTIMATOR_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "dprtf/classify.hpp"
#include "dprtf/psd.hpp"
#include "dprtf/stft.hpp"

namespace dprtf {

struct EstimatorConfig {
  StftConfig stft;
  std::size_t d_frames = 12;
  std::size_t q = 1;        // CTF length, from ctf_length_for_t60
  double band_low_hz = 0.0;   // exclusive
  double band_high_hz = 4000.0;  // inclusive
};

// Frequency bins retained for estimation: center frequency in
// (band_low, band_high], bin 0 always excluded.
std::vector<std::size_t> band_bins(const EstimatorConfig &config);

// Spectrally subtracted linear system at one frequency: rows are
// phi(p1) - phi(p2(p1)) for p1 in P1.
struct SubtractedSystem {
  std::size_t frequency = 0;
  std::vector<double> rhs_s;
  std::vector<cplx> matrix_s;  // row-major, width 2Q-1
  std::size_t width = 0;
  std::vector<std::pair<std::size_t, std::size_t>> pairings;  // p1 -> p2

  std::size_t rows() const { return rhs_s.size(); }
  bool underdetermined() const { return rows() < width; }
};

// Nearest P2 frame for every P1 frame; ties resolved toward the earlier
// frame. Throws if either class is empty.
std::vector<std::pair<std::size_t, std::size_t>> pair_frames(
    const FrameClasses &classes);

SubtractedSystem spectral_subtract(
    const PsdSeries &psd, std::size_t k,
    const std::vector<std::pair<std::size_t, std::size_t>> &pairings);

struct SolveResult {
  std::vector<cplx> g;
  bool ok = false;
  bool regularized = false;  // rank-deficient, ridge fallback used
};

// Least squares via column-pivoted QR; ridge fallback when rank deficient.
SolveResult solve_g(const SubtractedSystem &system);
SolveResult solve_g(const PsdSystem &system);

struct BidirectionalResult {
  cplx c;
  bool fallback = false;  // swapped estimate unusable, forward used alone
};

// c = (g0 + 1/g0_swapped) / 2.
BidirectionalResult bidirectional_dprtf(cplx g0_forward, cplx g0_swapped);

// Normalized DP-RTF vector over (mic pair, frequency) with validity
// indicator; pair-major then frequency, bins restricted to the band.
struct DpRtfFeature {
  std::vector<cplx> c;
  std::vector<std::uint8_t> h;
  std::vector<std::size_t> bins;                     // band bin indices
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (i, j), i < j

  std::size_t size() const { return c.size(); }
};

cplx normalize_dprtf(cplx c_hat);

struct PairEstimate {
  std::vector<cplx> c_hat;           // per bin (full spectrum indexing)
  std::vector<std::uint8_t> valid;   // per bin
  std::vector<std::uint8_t> regularized;
};

// Full noisy pipeline for one ordered mic pair: classification from the
// phi_yy sequence, inter-frame spectral subtraction, bidirectional least
// squares.
PairEstimate estimate_dprtf_pair(const TimeFrequencyTensor &tf,
                                 std::size_t mic_i, std::size_t mic_j,
                                 const EstimatorConfig &config);

// Noise-free variant: all frames p_f..P-1, no classification/subtraction.
PairEstimate estimate_dprtf_pair_noise_free(const TimeFrequencyTensor &tf,
                                            std::size_t mic_i,
                                            std::size_t mic_j,
                                            const EstimatorConfig &config);

// Feature over all J(J-1)/2 unordered pairs, reference = lower index.
DpRtfFeature estimate_feature(const TimeFrequencyTensor &tf,
                              const EstimatorConfig &config,
                              bool noise_free = false);

}  // namespace dprtf

#endif
