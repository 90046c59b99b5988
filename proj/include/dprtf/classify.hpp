#ifndef DPRTF_CLASSIFY_HPP
#define DPRTF_CLASSIFY_HPP

#include <cstddef>
#include <vector>

namespace dprtf {

// Erlang(D, mu) density and distribution at xi.
struct ErlangValue {
  double pdf = 0.0;
  double cdf = 0.0;
};
ErlangValue erlang_pdf_cdf(double xi, std::size_t d, double mu);

// Equivalent independent sequence length for a PSD sequence of raw length
// p_tilde computed every R frames with D-frame averaging. Returns p_tilde
// unchanged when R >= D.
double equivalent_sequence_length(std::size_t p_tilde, std::size_t r,
                                  std::size_t d);

// Order statistics of the D-frame averaged periodogram of stationary noise,
// evaluated on the grid {0, 0.1D, ..., 3D} with scale mu = 1.
struct MinMaxModel {
  std::size_t d = 0;
  double p_eff = 0.0;
  std::vector<double> grid;
  std::vector<double> f_min;  // minimum pdf on the grid
  std::vector<double> f_max;  // maximum pdf on the grid
  std::vector<double> cdf_max;  // normalized cumulative sum of f_max
  double xi_min_mean = 0.0;   // expectation of the minimum
  double r1 = 0.0;            // 0.95 max-quantile / mean minimum
  double r2 = 0.0;            // 0.50 max-quantile / mean minimum
};

MinMaxModel min_max_statistics(std::size_t d, double p_eff);

// r1 and r2 from the model's maximum CDF, quantiles interpolated linearly
// on the grid.
void classification_thresholds(MinMaxModel &model);

// High-speech-power (P1) and negligible-speech-power (P2) frame index sets
// for one frequency.
struct FrameClasses {
  std::vector<std::size_t> p1;
  std::vector<std::size_t> p2;
  bool valid = true;  // false when the series carries no energy
};

FrameClasses classify_frames(const std::vector<double> &xi_series,
                             const std::vector<std::size_t> &frame_indices,
                             double r1, double r2);

}  // namespace dprtf

#endif
