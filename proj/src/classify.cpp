#include "dprtf/classify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dprtf {

ErlangValue erlang_pdf_cdf(double xi, std::size_t d, double mu) {
  if (xi < 0.0) throw std::invalid_argument("erlang: xi must be >= 0");
  if (d == 0 || mu <= 0.0) throw std::invalid_argument("erlang: bad parameters");
  ErlangValue out;
  const double x = xi / mu;
  // log pdf to stay finite for large shape
  const double log_pdf = (static_cast<double>(d) - 1.0) * std::log(std::max(x, 1e-300)) -
                         x - std::lgamma(static_cast<double>(d)) - std::log(mu);
  out.pdf = (xi == 0.0 && d > 1) ? 0.0 : std::exp(log_pdf);
  if (d == 1 && xi == 0.0) out.pdf = 1.0 / mu;
  // Integer shape: P(D, x) = 1 - e^{-x} sum_{i<D} x^i / i!
  double term = std::exp(-x);
  double sum = term;
  for (std::size_t i = 1; i < d; ++i) {
    term *= x / static_cast<double>(i);
    sum += term;
  }
  out.cdf = 1.0 - sum;
  if (out.cdf < 0.0) out.cdf = 0.0;
  return out;
}

double equivalent_sequence_length(std::size_t p_tilde, std::size_t r,
                                  std::size_t d) {
  if (r == 0 || d == 0) throw std::invalid_argument("R and D must be >= 1");
  if (r >= d) return static_cast<double>(p_tilde);
  const double ratio = static_cast<double>(d) / static_cast<double>(r);
  return static_cast<double>(p_tilde) / ratio * (1.0 + std::log(ratio));
}

MinMaxModel min_max_statistics(std::size_t d, double p_eff) {
  if (d == 0) throw std::invalid_argument("D must be >= 1");
  if (p_eff < 1.0) p_eff = 1.0;
  MinMaxModel model;
  model.d = d;
  model.p_eff = p_eff;
  const double step = 0.1 * static_cast<double>(d);
  model.grid.resize(31);
  model.f_min.resize(31);
  model.f_max.resize(31);
  model.cdf_max.resize(31);
  for (std::size_t i = 0; i < 31; ++i) {
    const double xi = step * static_cast<double>(i);
    model.grid[i] = xi;
    const auto e = erlang_pdf_cdf(xi, d, 1.0);
    model.f_min[i] = p_eff * std::pow(1.0 - e.cdf, p_eff - 1.0) * e.pdf;
    model.f_max[i] = p_eff * std::pow(e.cdf, p_eff - 1.0) * e.pdf;
  }
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < 31; ++i) {
    num += model.grid[i] * model.f_min[i];
    den += model.f_min[i];
  }
  model.xi_min_mean = den > 0.0 ? num / den : static_cast<double>(d);
  double acc = 0.0, total = 0.0;
  for (double v : model.f_max) total += v;
  for (std::size_t i = 0; i < 31; ++i) {
    acc += model.f_max[i];
    model.cdf_max[i] = total > 0.0 ? acc / total : 0.0;
  }
  classification_thresholds(model);
  return model;
}

namespace {

double quantile_on_grid(const std::vector<double> &grid,
                        const std::vector<double> &cdf, double target) {
  for (std::size_t i = 0; i < cdf.size(); ++i) {
    if (cdf[i] >= target) {
      if (i == 0) return grid[0];
      const double c0 = cdf[i - 1], c1 = cdf[i];
      const double t = c1 > c0 ? (target - c0) / (c1 - c0) : 1.0;
      return grid[i - 1] + t * (grid[i] - grid[i - 1]);
    }
  }
  return grid.back();
}

}  // namespace

void classification_thresholds(MinMaxModel &model) {
  const double q95 = quantile_on_grid(model.grid, model.cdf_max, 0.95);
  const double q50 = quantile_on_grid(model.grid, model.cdf_max, 0.5);
  model.r1 = q95 / model.xi_min_mean;
  model.r2 = q50 / model.xi_min_mean;
}

FrameClasses classify_frames(const std::vector<double> &xi_series,
                             const std::vector<std::size_t> &frame_indices,
                             double r1, double r2) {
  if (xi_series.empty()) throw std::invalid_argument("empty xi series");
  if (xi_series.size() != frame_indices.size())
    throw std::invalid_argument("series/index length mismatch");
  FrameClasses classes;
  double min_xi = std::numeric_limits<double>::infinity();
  double max_xi = 0.0;
  for (double v : xi_series) {
    min_xi = std::min(min_xi, v);
    max_xi = std::max(max_xi, v);
  }
  if (max_xi <= 0.0) {
    classes.valid = false;
    return classes;
  }
  for (std::size_t i = 0; i < xi_series.size(); ++i) {
    if (xi_series[i] > r1 * min_xi)
      classes.p1.push_back(frame_indices[i]);
    else if (xi_series[i] <= r2 * min_xi)
      classes.p2.push_back(frame_indices[i]);
  }
  return classes;
}

}  // namespace dprtf
