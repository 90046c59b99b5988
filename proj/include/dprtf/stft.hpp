#ifndef DPRTF_STFT_HPP
#define DPRTF_STFT_HPP

#include <complex>
#include <cstddef>
#include <vector>

#include "dprtf/fft.hpp"

namespace dprtf {

// STFT framing parameters plus analysis/synthesis windows. The windows must
// satisfy the constant overlap-add condition so that analyze/synthesize is a
// perfect reconstruction on the fully overlapped interior.
struct StftConfig {
  std::size_t window_length = 256;  // N
  std::size_t frame_step = 128;     // L
  std::vector<double> analysis_window;
  std::vector<double> synthesis_window;
  double sample_rate = 16000.0;

  std::size_t num_bins() const { return window_length / 2 + 1; }
  double bin_hz(std::size_t k) const {
    return sample_rate * static_cast<double>(k) /
           static_cast<double>(window_length);
  }
  // Checks sizes and the overlap-add condition; throws on violation.
  void validate() const;
};

// Sine (square-root Hann) analysis and synthesis windows, N=256, L=128,
// 16 kHz.
StftConfig default_stft_config();
StftConfig make_sine_window_config(std::size_t n, std::size_t l,
                                   double sample_rate);
StftConfig make_rect_window_config(std::size_t n, std::size_t l,
                                   double sample_rate);

// Complex STFT coefficients, indexed (channel, frame p, frequency bin k),
// k = 0..N/2 only (real signals).
class TimeFrequencyTensor {
 public:
  TimeFrequencyTensor() = default;
  TimeFrequencyTensor(std::size_t channels, std::size_t frames,
                      StftConfig config);

  cplx &at(std::size_t ch, std::size_t p, std::size_t k) {
    return data_[(ch * frames_ + p) * bins_ + k];
  }
  const cplx &at(std::size_t ch, std::size_t p, std::size_t k) const {
    return data_[(ch * frames_ + p) * bins_ + k];
  }
  std::size_t channels() const { return channels_; }
  std::size_t frames() const { return frames_; }
  std::size_t bins() const { return bins_; }
  const StftConfig &config() const { return config_; }

 private:
  std::size_t channels_ = 0;
  std::size_t frames_ = 0;
  std::size_t bins_ = 0;
  StftConfig config_;
  std::vector<cplx> data_;
};

// Per-frequency convolutive transfer function taps a_{p',k}, p' = 0..Q-1.
class CtfFilter {
 public:
  CtfFilter() = default;
  CtfFilter(std::size_t bins, std::size_t taps);

  cplx &at(std::size_t k, std::size_t p) { return taps_[k * q_ + p]; }
  const cplx &at(std::size_t k, std::size_t p) const { return taps_[k * q_ + p]; }
  std::size_t bins() const { return bins_; }
  std::size_t num_taps() const { return q_; }

 private:
  std::size_t bins_ = 0;
  std::size_t q_ = 0;
  std::vector<cplx> taps_;
};

// Analysis STFT of a mono signal. Frame count P = floor((len-N)/L)+1.
TimeFrequencyTensor stft_analyze(const std::vector<double> &signal,
                                 const StftConfig &config);
TimeFrequencyTensor stft_analyze_multi(
    const std::vector<std::vector<double>> &signals, const StftConfig &config);

// Overlap-add synthesis of channel ch; exact on the interior where the
// overlap-add window sum has converged.
std::vector<double> stft_synthesize(const TimeFrequencyTensor &tf,
                                    std::size_t ch = 0);

// nu(n) = sum_m analysis(m) * synthesis(m - n), n = 0..N-1.
std::vector<double> cross_window_kernel(const StftConfig &config);

// Band-to-band CTF taps of a time-domain impulse response:
//   taps(k, p') = exp(j*2*pi*k*p'*L/N) * sum_t h(t) nu(t - p'L) e^{-j2pi k t/N}.
// Tap 0 is the nu-windowed DFT of h over n = 0..N-1.
CtfFilter ctf_from_impulse_response(const std::vector<double> &h,
                                    const StftConfig &config, std::size_t q);

// Per-frequency convolution across frames; frames before 0 are zero.
TimeFrequencyTensor ctf_convolve(const TimeFrequencyTensor &source,
                                 const CtfFilter &filter);

}  // namespace dprtf

#endif
