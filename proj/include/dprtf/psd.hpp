#ifndef DPRTF_PSD_HPP
#define DPRTF_PSD_HPP

#include <cstddef>
#include <vector>

#include "dprtf/stft.hpp"

namespace dprtf {

// D-frame averaged auto- and cross-PSD statistics for one microphone pair
// (channel x is the reference). Entries are defined for frames
// p >= valid_from = (Q-1) + (D-1), zero-based.
struct PsdSeries {
  std::size_t q = 0;           // CTF length
  std::size_t d = 0;           // averaging frames
  std::size_t frames = 0;      // total frame count P
  std::size_t bins = 0;
  std::size_t valid_from = 0;  // p_f, zero-based

  // phi_yy[p * bins + k], p in [valid_from, frames)
  std::vector<double> phi_yy;
  // phi_zy[(p * bins + k) * (2Q-1) + entry]
  std::vector<cplx> phi_zy;

  std::size_t width() const { return 2 * q - 1; }
  double auto_psd(std::size_t p, std::size_t k) const {
    return phi_yy[p * bins + k];
  }
  const cplx *zy_row(std::size_t p, std::size_t k) const {
    return &phi_zy[(p * bins + k) * width()];
  }
};

// Per-frequency stacked linear system: rhs(p) = matrix(p,:) * g_k.
struct PsdSystem {
  std::size_t frequency = 0;
  std::vector<double> rhs;   // one entry per retained frame
  std::vector<cplx> matrix;  // row-major, width 2Q-1
  std::size_t width = 0;
  bool degenerate = false;   // no excitation / underdetermined

  std::size_t rows() const { return width == 0 ? 0 : rhs.size(); }
};

// phi(p,k) = (1/D) sum_d |y(p-d,k)|^2, valid for p >= D-1. Entries below
// D-1 are zero.
std::vector<double> estimate_auto_psd(const TimeFrequencyTensor &y,
                                      std::size_t channel, std::size_t d_frames);

// Cross-PSD vector at (p,k): D-frame averaged E{x_{p-q} y*_p} for q=0..Q-1
// followed by E{y_{p-q} y*_p} for q=1..Q-1.
std::vector<cplx> build_zy_vector(const TimeFrequencyTensor &x,
                                  const TimeFrequencyTensor &y,
                                  std::size_t ch_x, std::size_t ch_y,
                                  std::size_t p, std::size_t k, std::size_t q,
                                  std::size_t d_frames);

// All PSD statistics for one (reference, other) channel pair.
PsdSeries compute_psd_series(const TimeFrequencyTensor &tf, std::size_t ch_x,
                             std::size_t ch_y, std::size_t q,
                             std::size_t d_frames);

// Noise-free linear system of frames p_f..P-1 at frequency k.
PsdSystem assemble_noise_free_system(const TimeFrequencyTensor &tf,
                                     std::size_t ch_x, std::size_t ch_y,
                                     std::size_t k, std::size_t q,
                                     std::size_t d_frames);

// CTF length rule Q = ceil(0.25 * T60 * fs / L).
std::size_t ctf_length_for_t60(double t60, const StftConfig &config,
                               double fraction = 0.25);

}  // namespace dprtf

#endif
