#include "etaforge/fourier.hpp"

#include <cmath>

namespace etaforge::numkit {

namespace {

using cd = std::complex<double>;

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

void fft_radix2(std::vector<cd>& a, bool invert) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = 2.0 * M_PI / static_cast<double>(len) * (invert ? 1.0 : -1.0);
        const cd wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            cd w(1.0, 0.0);
            for (std::size_t j = 0; j < len / 2; ++j) {
                const cd u = a[i + j];
                const cd v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
    if (invert) {
        const double inv_n = 1.0 / static_cast<double>(n);
        for (auto& v : a) v *= inv_n;
    }
}

void dft_naive(std::vector<cd>& a, bool invert) {
    const std::size_t n = a.size();
    std::vector<cd> out(n, cd(0.0, 0.0));
    const double sgn = invert ? 1.0 : -1.0;
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t j = 0; j < n; ++j) {
            const double ang = sgn * 2.0 * M_PI * static_cast<double>(j * k % n) / static_cast<double>(n);
            out[k] += a[j] * cd(std::cos(ang), std::sin(ang));
        }
    }
    if (invert) {
        const double inv_n = 1.0 / static_cast<double>(n);
        for (auto& v : out) v *= inv_n;
    }
    a = std::move(out);
}

} // namespace

void fft(std::vector<cd>& x) {
    if (is_pow2(x.size()))
        fft_radix2(x, false);
    else
        dft_naive(x, false);
}

void ifft(std::vector<cd>& x) {
    if (is_pow2(x.size()))
        fft_radix2(x, true);
    else
        dft_naive(x, true);
}

} // namespace etaforge::numkit
