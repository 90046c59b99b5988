#include "dprtf/psd.hpp"

#include <cmath>
#include <stdexcept>

namespace dprtf {

std::vector<double> estimate_auto_psd(const TimeFrequencyTensor &y,
                                      std::size_t channel,
                                      std::size_t d_frames) {
  if (d_frames == 0) throw std::invalid_argument("D must be >= 1");
  if (d_frames > y.frames()) throw std::invalid_argument("too few frames");
  std::vector<double> out(y.frames() * y.bins(), 0.0);
  for (std::size_t p = d_frames - 1; p < y.frames(); ++p) {
    for (std::size_t k = 0; k < y.bins(); ++k) {
      double acc = 0.0;
      for (std::size_t d = 0; d < d_frames; ++d)
        acc += std::norm(y.at(channel, p - d, k));
      out[p * y.bins() + k] = acc / static_cast<double>(d_frames);
    }
  }
  return out;
}

std::vector<cplx> build_zy_vector(const TimeFrequencyTensor &x,
                                  const TimeFrequencyTensor &y,
                                  std::size_t ch_x, std::size_t ch_y,
                                  std::size_t p, std::size_t k, std::size_t q,
                                  std::size_t d_frames) {
  if (q == 0 || d_frames == 0) throw std::invalid_argument("Q and D must be >= 1");
  if (p + 2 < q + d_frames)
    throw std::invalid_argument("insufficient history for zy vector");
  std::vector<cplx> out(2 * q - 1, cplx(0.0, 0.0));
  const double inv_d = 1.0 / static_cast<double>(d_frames);
  for (std::size_t lag = 0; lag < q; ++lag) {
    cplx acc(0.0, 0.0);
    for (std::size_t d = 0; d < d_frames; ++d)
      acc += x.at(ch_x, p - d - lag, k) * std::conj(y.at(ch_y, p - d, k));
    out[lag] = acc * inv_d;
  }
  for (std::size_t lag = 1; lag < q; ++lag) {
    cplx acc(0.0, 0.0);
    for (std::size_t d = 0; d < d_frames; ++d)
      acc += y.at(ch_y, p - d - lag, k) * std::conj(y.at(ch_y, p - d, k));
    out[q - 1 + lag] = acc * inv_d;
  }
  return out;
}

PsdSeries compute_psd_series(const TimeFrequencyTensor &tf, std::size_t ch_x,
                             std::size_t ch_y, std::size_t q,
                             std::size_t d_frames) {
  if (q == 0 || d_frames == 0) throw std::invalid_argument("Q and D must be >= 1");
  PsdSeries series;
  series.q = q;
  series.d = d_frames;
  series.frames = tf.frames();
  series.bins = tf.bins();
  series.valid_from = (q - 1) + (d_frames - 1);
  if (series.valid_from >= tf.frames())
    throw std::invalid_argument("too few frames for Q and D");
  series.phi_yy = estimate_auto_psd(tf, ch_y, d_frames);
  series.phi_zy.assign(tf.frames() * tf.bins() * series.width(), cplx(0.0, 0.0));
  for (std::size_t p = series.valid_from; p < tf.frames(); ++p) {
    for (std::size_t k = 0; k < tf.bins(); ++k) {
      auto row = build_zy_vector(tf, tf, ch_x, ch_y, p, k, q, d_frames);
      std::copy(row.begin(), row.end(),
                series.phi_zy.begin() + (p * tf.bins() + k) * series.width());
    }
  }
  return series;
}

PsdSystem assemble_noise_free_system(const TimeFrequencyTensor &tf,
                                     std::size_t ch_x, std::size_t ch_y,
                                     std::size_t k, std::size_t q,
                                     std::size_t d_frames) {
  const std::size_t p_f = (q - 1) + (d_frames - 1);
  if (p_f >= tf.frames()) throw std::invalid_argument("too few frames");
  PsdSystem system;
  system.frequency = k;
  system.width = 2 * q - 1;
  double energy = 0.0;
  for (std::size_t p = p_f; p < tf.frames(); ++p) {
    double phi = 0.0;
    for (std::size_t d = 0; d < d_frames; ++d)
      phi += std::norm(tf.at(ch_y, p - d, k));
    phi /= static_cast<double>(d_frames);
    system.rhs.push_back(phi);
    auto row = build_zy_vector(tf, tf, ch_x, ch_y, p, k, q, d_frames);
    system.matrix.insert(system.matrix.end(), row.begin(), row.end());
    for (const auto &v : row) energy += std::norm(v);
    energy += phi * phi;
  }
  if (system.rhs.size() < system.width || energy == 0.0)
    system.degenerate = true;
  return system;
}

std::size_t ctf_length_for_t60(double t60, const StftConfig &config,
                               double fraction) {
  if (t60 <= 0.0) throw std::invalid_argument("T60 must be positive");
  const double taps =
      fraction * t60 * config.sample_rate / static_cast<double>(config.frame_step);
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(taps)));
}

}  // namespace dprtf
