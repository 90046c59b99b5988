#ifndef DPRTF_FFT_HPP
#define DPRTF_FFT_HPP

#include <complex>
#include <vector>

namespace dprtf {

using cplx = std::complex<double>;

// In-place DFT of length data.size(). Radix-2 when the size is a power of
// two, plain O(n^2) evaluation otherwise (sizes here are small).
void dft(std::vector<cplx> &data, bool inverse = false);

// Forward DFT of a real block, returning bins 0..n/2.
std::vector<cplx> real_dft_half(const std::vector<double> &block);

// Linear convolution of two real sequences via zero-padded FFT.
std::vector<double> fft_convolve(const std::vector<double> &a,
                                 const std::vector<double> &b);

}  // namespace dprtf

#endif
