#include "dprtf/fft.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dprtf {

namespace {

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

void fft_pow2(std::vector<cplx> &a, bool inverse) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang =
        2.0 * std::numbers::pi / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
    const cplx wl(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      cplx w(1.0, 0.0);
      for (std::size_t j = 0; j < len / 2; ++j) {
        cplx u = a[i + j];
        cplx v = a[i + j + len / 2] * w;
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
        w *= wl;
      }
    }
  }
  if (inverse) {
    for (auto &x : a) x /= static_cast<double>(n);
  }
}

void dft_naive(std::vector<cplx> &a, bool inverse) {
  const std::size_t n = a.size();
  std::vector<cplx> out(n, cplx(0.0, 0.0));
  const double sign = inverse ? 1.0 : -1.0;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t m = 0; m < n; ++m) {
      const double ang = sign * 2.0 * std::numbers::pi *
                         static_cast<double>(k * m % n) / static_cast<double>(n);
      out[k] += a[m] * cplx(std::cos(ang), std::sin(ang));
    }
  }
  if (inverse) {
    for (auto &x : out) x /= static_cast<double>(n);
  }
  a = std::move(out);
}

}  // namespace

void dft(std::vector<cplx> &data, bool inverse) {
  if (data.empty()) throw std::invalid_argument("dft: empty input");
  if (is_pow2(data.size()))
    fft_pow2(data, inverse);
  else
    dft_naive(data, inverse);
}

std::vector<cplx> real_dft_half(const std::vector<double> &block) {
  std::vector<cplx> full(block.begin(), block.end());
  dft(full);
  full.resize(block.size() / 2 + 1);
  return full;
}

std::vector<double> fft_convolve(const std::vector<double> &a,
                                 const std::vector<double> &b) {
  if (a.empty() || b.empty()) return {};
  const std::size_t out_len = a.size() + b.size() - 1;
  std::size_t n = 1;
  while (n < out_len) n <<= 1;
  std::vector<cplx> fa(n, cplx(0.0, 0.0)), fb(n, cplx(0.0, 0.0));
  for (std::size_t i = 0; i < a.size(); ++i) fa[i] = a[i];
  for (std::size_t i = 0; i < b.size(); ++i) fb[i] = b[i];
  dft(fa);
  dft(fb);
  for (std::size_t i = 0; i < n; ++i) fa[i] *= fb[i];
  dft(fa, true);
  std::vector<double> out(out_len);
  for (std::size_t i = 0; i < out_len; ++i) out[i] = fa[i].real();
  return out;
}

}  // namespace dprtf
