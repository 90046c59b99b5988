#include "dprtf/estimator.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace dprtf {

std::vector<std::size_t> band_bins(const EstimatorConfig &config) {
  std::vector<std::size_t> bins;
  for (std::size_t k = 1; k < config.stft.num_bins(); ++k) {
    const double f = config.stft.bin_hz(k);
    if (f > config.band_low_hz && f <= config.band_high_hz) bins.push_back(k);
  }
  return bins;
}

std::vector<std::pair<std::size_t, std::size_t>> pair_frames(
    const FrameClasses &classes) {
  if (classes.p1.empty()) throw std::invalid_argument("P1 empty: no speech frames");
  if (classes.p2.empty()) throw std::invalid_argument("P2 empty: no noise reference");
  std::vector<std::pair<std::size_t, std::size_t>> out;
  out.reserve(classes.p1.size());
  for (std::size_t p1 : classes.p1) {
    std::size_t best = classes.p2.front();
    std::size_t best_dist = p1 > best ? p1 - best : best - p1;
    for (std::size_t p2 : classes.p2) {
      const std::size_t dist = p1 > p2 ? p1 - p2 : p2 - p1;
      if (dist < best_dist) {  // ties keep the earlier frame
        best = p2;
        best_dist = dist;
      }
    }
    out.emplace_back(p1, best);
  }
  return out;
}

SubtractedSystem spectral_subtract(
    const PsdSeries &psd, std::size_t k,
    const std::vector<std::pair<std::size_t, std::size_t>> &pairings) {
  SubtractedSystem system;
  system.frequency = k;
  system.width = psd.width();
  system.pairings = pairings;
  for (const auto &[p1, p2] : pairings) {
    system.rhs_s.push_back(psd.auto_psd(p1, k) - psd.auto_psd(p2, k));
    const cplx *row1 = psd.zy_row(p1, k);
    const cplx *row2 = psd.zy_row(p2, k);
    for (std::size_t i = 0; i < system.width; ++i)
      system.matrix_s.push_back(row1[i] - row2[i]);
  }
  return system;
}

namespace {

SolveResult solve_ls(const std::vector<cplx> &matrix,
                     const std::vector<double> &rhs, std::size_t width) {
  SolveResult result;
  const std::size_t rows = rhs.size();
  if (rows < width) return result;  // underdetermined
  Eigen::MatrixXcd a(rows, width);
  Eigen::VectorXcd b(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    b(r) = cplx(rhs[r], 0.0);
    for (std::size_t c = 0; c < width; ++c) a(r, c) = matrix[r * width + c];
  }
  if (a.norm() == 0.0) return result;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(a);
  if (qr.rank() < static_cast<Eigen::Index>(width)) {
    const Eigen::MatrixXcd ata = a.adjoint() * a;
    const double eps = 1e-8 * ata.trace().real() / static_cast<double>(width);
    Eigen::MatrixXcd reg = ata;
    for (std::size_t i = 0; i < width; ++i) reg(i, i) += eps;
    const Eigen::VectorXcd g = reg.ldlt().solve(a.adjoint() * b);
    result.g.assign(g.data(), g.data() + width);
    result.ok = true;
    result.regularized = true;
    return result;
  }
  const Eigen::VectorXcd g = qr.solve(b);
  result.g.assign(g.data(), g.data() + width);
  result.ok = true;
  return result;
}

}  // namespace

SolveResult solve_g(const SubtractedSystem &system) {
  return solve_ls(system.matrix_s, system.rhs_s, system.width);
}

SolveResult solve_g(const PsdSystem &system) {
  if (system.degenerate && system.rows() < system.width) return {};
  return solve_ls(system.matrix, system.rhs, system.width);
}

BidirectionalResult bidirectional_dprtf(cplx g0_forward, cplx g0_swapped) {
  BidirectionalResult out;
  if (g0_swapped == cplx(0.0, 0.0)) {
    out.c = g0_forward;
    out.fallback = true;
    return out;
  }
  out.c = 0.5 * (g0_forward + cplx(1.0, 0.0) / g0_swapped);
  return out;
}

cplx normalize_dprtf(cplx c_hat) {
  return c_hat / std::sqrt(1.0 + std::norm(c_hat));
}

namespace {

// g0 per bin for one channel ordering (x = reference channel).
struct DirectionalEstimate {
  std::vector<cplx> g0;
  std::vector<std::uint8_t> valid;
  std::vector<std::uint8_t> regularized;
};

DirectionalEstimate estimate_direction(const TimeFrequencyTensor &tf,
                                       std::size_t ch_x, std::size_t ch_y,
                                       const EstimatorConfig &config,
                                       bool noise_free) {
  const std::size_t bins = tf.bins();
  DirectionalEstimate est;
  est.g0.assign(bins, cplx(0.0, 0.0));
  est.valid.assign(bins, 0);
  est.regularized.assign(bins, 0);
  const auto band = band_bins(config);

  if (noise_free) {
    for (std::size_t k : band) {
      const auto system = assemble_noise_free_system(tf, ch_x, ch_y, k,
                                                     config.q, config.d_frames);
      const auto sol = solve_g(system);
      if (sol.ok) {
        est.g0[k] = sol.g[0];
        est.valid[k] = 1;
        est.regularized[k] = sol.regularized;
      }
    }
    return est;
  }

  const auto psd = compute_psd_series(tf, ch_x, ch_y, config.q, config.d_frames);
  const std::size_t p_tilde = psd.frames - psd.valid_from;
  const double p_eff = equivalent_sequence_length(p_tilde, 1, config.d_frames);
  const auto model = min_max_statistics(config.d_frames, p_eff);

  std::vector<std::size_t> frame_indices(p_tilde);
  for (std::size_t i = 0; i < p_tilde; ++i) frame_indices[i] = psd.valid_from + i;
  std::vector<double> xi(p_tilde);

  for (std::size_t k : band) {
    for (std::size_t i = 0; i < p_tilde; ++i)
      xi[i] = psd.auto_psd(frame_indices[i], k);
    const auto classes = classify_frames(xi, frame_indices, model.r1, model.r2);
    if (!classes.valid || classes.p1.empty() || classes.p2.empty()) continue;
    const auto pairings = pair_frames(classes);
    const auto system = spectral_subtract(psd, k, pairings);
    if (system.underdetermined()) continue;
    const auto sol = solve_g(system);
    if (!sol.ok) continue;
    est.g0[k] = sol.g[0];
    est.valid[k] = 1;
    est.regularized[k] = sol.regularized;
  }
  return est;
}

}  // namespace

PairEstimate estimate_dprtf_pair(const TimeFrequencyTensor &tf,
                                 std::size_t mic_i, std::size_t mic_j,
                                 const EstimatorConfig &config) {
  const auto fwd = estimate_direction(tf, mic_i, mic_j, config, false);
  const auto swp = estimate_direction(tf, mic_j, mic_i, config, false);
  PairEstimate out;
  out.c_hat.assign(tf.bins(), cplx(0.0, 0.0));
  out.valid.assign(tf.bins(), 0);
  out.regularized.assign(tf.bins(), 0);
  for (std::size_t k = 0; k < tf.bins(); ++k) {
    if (!fwd.valid[k]) continue;
    if (swp.valid[k]) {
      const auto bi = bidirectional_dprtf(fwd.g0[k], swp.g0[k]);
      out.c_hat[k] = bi.c;
    } else {
      out.c_hat[k] = fwd.g0[k];
    }
    out.valid[k] = 1;
    out.regularized[k] = fwd.regularized[k] | swp.regularized[k];
  }
  return out;
}

PairEstimate estimate_dprtf_pair_noise_free(const TimeFrequencyTensor &tf,
                                            std::size_t mic_i,
                                            std::size_t mic_j,
                                            const EstimatorConfig &config) {
  const auto fwd = estimate_direction(tf, mic_i, mic_j, config, true);
  const auto swp = estimate_direction(tf, mic_j, mic_i, config, true);
  PairEstimate out;
  out.c_hat.assign(tf.bins(), cplx(0.0, 0.0));
  out.valid.assign(tf.bins(), 0);
  out.regularized.assign(tf.bins(), 0);
  for (std::size_t k = 0; k < tf.bins(); ++k) {
    if (!fwd.valid[k]) continue;
    if (swp.valid[k]) {
      const auto bi = bidirectional_dprtf(fwd.g0[k], swp.g0[k]);
      out.c_hat[k] = bi.c;
    } else {
      out.c_hat[k] = fwd.g0[k];
    }
    out.valid[k] = 1;
    out.regularized[k] = fwd.regularized[k] | swp.regularized[k];
  }
  return out;
}

DpRtfFeature estimate_feature(const TimeFrequencyTensor &tf,
                              const EstimatorConfig &config, bool noise_free) {
  DpRtfFeature feature;
  feature.bins = band_bins(config);
  for (std::size_t i = 0; i < tf.channels(); ++i)
    for (std::size_t j = i + 1; j < tf.channels(); ++j)
      feature.pairs.emplace_back(i, j);
  for (const auto &[i, j] : feature.pairs) {
    const auto est = noise_free
                         ? estimate_dprtf_pair_noise_free(tf, i, j, config)
                         : estimate_dprtf_pair(tf, i, j, config);
    for (std::size_t k : feature.bins) {
      if (est.valid[k]) {
        feature.c.push_back(normalize_dprtf(est.c_hat[k]));
        feature.h.push_back(1);
      } else {
        feature.c.push_back(cplx(0.0, 0.0));
        feature.h.push_back(0);
      }
    }
  }
  return feature;
}

}  // namespace dprtf
