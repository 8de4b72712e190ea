#pragma once

#include <complex>
#include <vector>

namespace etaforge::numkit {

/// In-place forward DFT, sign convention X_k = sum_j x_j e^{-2pi i jk/N}.
/// Radix-2 when N is a power of two, O(N^2) fallback otherwise (grids in
/// this project are small).
void fft(std::vector<std::complex<double>>& x);

/// In-place inverse DFT including the 1/N normalization.
void ifft(std::vector<std::complex<double>>& x);

} // namespace etaforge::numkit
