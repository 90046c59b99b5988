#include "dprtf/stft.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dprtf {

namespace {

// Full kernel nu(n) for n in [1-N, N-1], indexed as nu_full[n + N - 1].
std::vector<double> cross_window_kernel_full(const StftConfig &config) {
  const std::size_t n = config.window_length;
  std::vector<double> nu(2 * n - 1, 0.0);
  for (std::ptrdiff_t shift = 1 - static_cast<std::ptrdiff_t>(n);
       shift <= static_cast<std::ptrdiff_t>(n) - 1; ++shift) {
    double acc = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
      const std::ptrdiff_t idx = static_cast<std::ptrdiff_t>(m) - shift;
      if (idx >= 0 && idx < static_cast<std::ptrdiff_t>(n))
        acc += config.analysis_window[m] * config.synthesis_window[idx];
    }
    nu[shift + static_cast<std::ptrdiff_t>(n) - 1] = acc;
  }
  return nu;
}

}  // namespace

void StftConfig::validate() const {
  if (window_length == 0) throw std::invalid_argument("window_length must be > 0");
  if (frame_step == 0 || frame_step > window_length)
    throw std::invalid_argument("frame_step must satisfy 0 < L <= N");
  if (analysis_window.size() != window_length ||
      synthesis_window.size() != window_length)
    throw std::invalid_argument("window length mismatch");
  // Constant overlap-add over one hop period.
  std::vector<double> ola(frame_step, 0.0);
  for (std::size_t m = 0; m < frame_step; ++m) {
    for (std::size_t j = m; j < window_length; j += frame_step)
      ola[m] += analysis_window[j] * synthesis_window[j];
  }
  const double ref = ola[0];
  if (ref <= 0.0) throw std::invalid_argument("degenerate windows");
  for (double v : ola) {
    if (std::abs(v - ref) > 1e-10 * std::abs(ref))
      throw std::invalid_argument("windows violate overlap-add condition");
  }
}

StftConfig make_sine_window_config(std::size_t n, std::size_t l,
                                   double sample_rate) {
  StftConfig cfg;
  cfg.window_length = n;
  cfg.frame_step = l;
  cfg.sample_rate = sample_rate;
  cfg.analysis_window.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    cfg.analysis_window[i] = std::sin(
        std::numbers::pi * (static_cast<double>(i) + 0.5) / static_cast<double>(n));
  }
  cfg.synthesis_window = cfg.analysis_window;
  cfg.validate();
  return cfg;
}

StftConfig make_rect_window_config(std::size_t n, std::size_t l,
                                   double sample_rate) {
  StftConfig cfg;
  cfg.window_length = n;
  cfg.frame_step = l;
  cfg.sample_rate = sample_rate;
  cfg.analysis_window.assign(n, 1.0);
  cfg.synthesis_window.assign(n, 1.0);
  return cfg;
}

StftConfig default_stft_config() { return make_sine_window_config(256, 128, 16000.0); }

TimeFrequencyTensor::TimeFrequencyTensor(std::size_t channels,
                                         std::size_t frames, StftConfig config)
    : channels_(channels),
      frames_(frames),
      bins_(config.num_bins()),
      config_(std::move(config)),
      data_(channels * frames * bins_, cplx(0.0, 0.0)) {}

CtfFilter::CtfFilter(std::size_t bins, std::size_t taps)
    : bins_(bins), q_(taps), taps_(bins * taps, cplx(0.0, 0.0)) {
  if (taps == 0) throw std::invalid_argument("CtfFilter: Q must be >= 1");
}

TimeFrequencyTensor stft_analyze(const std::vector<double> &signal,
                                 const StftConfig &config) {
  return stft_analyze_multi({signal}, config);
}

TimeFrequencyTensor stft_analyze_multi(
    const std::vector<std::vector<double>> &signals, const StftConfig &config) {
  if (signals.empty()) throw std::invalid_argument("no channels");
  const std::size_t n = config.window_length;
  const std::size_t l = config.frame_step;
  for (const auto &s : signals) {
    if (s.size() < n) throw std::invalid_argument("insufficient samples");
    if (s.size() != signals[0].size())
      throw std::invalid_argument("channel length mismatch");
  }
  const std::size_t frames = (signals[0].size() - n) / l + 1;
  TimeFrequencyTensor tf(signals.size(), frames, config);
  std::vector<double> block(n);
  for (std::size_t ch = 0; ch < signals.size(); ++ch) {
    for (std::size_t p = 0; p < frames; ++p) {
      for (std::size_t m = 0; m < n; ++m)
        block[m] = config.analysis_window[m] * signals[ch][p * l + m];
      auto spec = real_dft_half(block);
      for (std::size_t k = 0; k < tf.bins(); ++k) tf.at(ch, p, k) = spec[k];
    }
  }
  return tf;
}

std::vector<double> stft_synthesize(const TimeFrequencyTensor &tf,
                                    std::size_t ch) {
  const StftConfig &cfg = tf.config();
  const std::size_t n = cfg.window_length;
  const std::size_t l = cfg.frame_step;
  const std::size_t len = (tf.frames() - 1) * l + n;
  std::vector<double> out(len, 0.0);
  // Overlap-add gain over one hop period (constant by validate()).
  double ola = 0.0;
  for (std::size_t j = 0; j < n; j += l)
    ola += cfg.analysis_window[j] * cfg.synthesis_window[j];
  std::vector<cplx> full(n);
  for (std::size_t p = 0; p < tf.frames(); ++p) {
    for (std::size_t k = 0; k < tf.bins(); ++k) full[k] = tf.at(ch, p, k);
    for (std::size_t k = tf.bins(); k < n; ++k)
      full[k] = std::conj(tf.at(ch, p, n - k));
    dft(full, true);
    for (std::size_t m = 0; m < n; ++m)
      out[p * l + m] += cfg.synthesis_window[m] * full[m].real() / ola;
  }
  return out;
}

std::vector<double> cross_window_kernel(const StftConfig &config) {
  const std::size_t n = config.window_length;
  auto full = cross_window_kernel_full(config);
  std::vector<double> nu(n);
  for (std::size_t i = 0; i < n; ++i) nu[i] = full[i + n - 1];
  return nu;
}

CtfFilter ctf_from_impulse_response(const std::vector<double> &h,
                                    const StftConfig &config, std::size_t q) {
  if (q == 0) throw std::invalid_argument("Q must be >= 1");
  const std::size_t n = config.window_length;
  const std::size_t l = config.frame_step;
  const auto nu_full = cross_window_kernel_full(config);
  const std::size_t bins = config.num_bins();
  CtfFilter filter(bins, q);
  for (std::size_t pp = 0; pp < q; ++pp) {
    const std::ptrdiff_t offset = static_cast<std::ptrdiff_t>(pp * l);
    // t runs over the support of nu(t - p'L).
    const std::ptrdiff_t t_lo =
        std::max<std::ptrdiff_t>(0, offset - static_cast<std::ptrdiff_t>(n) + 1);
    const std::ptrdiff_t t_hi =
        std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(h.size()) - 1,
                                 offset + static_cast<std::ptrdiff_t>(n) - 1);
    for (std::size_t k = 0; k < bins; ++k) {
      cplx acc(0.0, 0.0);
      for (std::ptrdiff_t t = t_lo; t <= t_hi; ++t) {
        const double nu = nu_full[t - offset + static_cast<std::ptrdiff_t>(n) - 1];
        if (nu == 0.0) continue;
        const double ang = -2.0 * std::numbers::pi * static_cast<double>(k) *
                           static_cast<double>(t) / static_cast<double>(n);
        acc += h[t] * nu * cplx(std::cos(ang), std::sin(ang));
      }
      const double phase = 2.0 * std::numbers::pi * static_cast<double>(k) *
                           static_cast<double>(offset) / static_cast<double>(n);
      filter.at(k, pp) = acc * cplx(std::cos(phase), std::sin(phase));
    }
  }
  return filter;
}

TimeFrequencyTensor ctf_convolve(const TimeFrequencyTensor &source,
                                 const CtfFilter &filter) {
  if (filter.bins() != source.bins())
    throw std::invalid_argument("bin count mismatch between tensor and filter");
  TimeFrequencyTensor out(source.channels(), source.frames(), source.config());
  for (std::size_t ch = 0; ch < source.channels(); ++ch) {
    for (std::size_t p = 0; p < source.frames(); ++p) {
      for (std::size_t k = 0; k < source.bins(); ++k) {
        cplx acc(0.0, 0.0);
        const std::size_t qmax = std::min(filter.num_taps(), p + 1);
        for (std::size_t pp = 0; pp < qmax; ++pp)
          acc += source.at(ch, p - pp, k) * filter.at(k, pp);
        out.at(ch, p, k) = acc;
      }
    }
  }
  return out;
}

}  // namespace dprtf
