#pragma once

#include <bit>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace fracvisco::fracspace::detail {

/// In-place iterative radix-2 transform; length must be a power of two.
/// Forward maps x_j to sum_j x_j e^{-2 pi i jk/N}; the inverse includes 1/N.
/// Twiddles come from a directly evaluated table, so roundoff stays flat
/// across long transforms.
inline void fft_radix2(std::vector<std::complex<double>>& a, bool inverse) {
    const std::size_t n = a.size();
    if (n == 0 || (n & (n - 1)) != 0)
        throw std::invalid_argument("fft_radix2: length must be a power of two");
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    const double sign = inverse ? 1.0 : -1.0;
    std::vector<std::complex<double>> tw(n / 2);
    for (std::size_t k = 0; k < tw.size(); ++k) {
        const double ang = sign * 2.0 * M_PI * static_cast<double>(k) / static_cast<double>(n);
        tw[k] = {std::cos(ang), std::sin(ang)};
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t half = len >> 1;
        const std::size_t stride = n / len;
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t k = 0; k < half; ++k) {
                const std::complex<double> u = a[i + k];
                const std::complex<double> v = a[i + k + half] * tw[k * stride];
                a[i + k] = u + v;
                a[i + k + half] = u - v;
            }
        }
    }
    if (inverse) {
        const double inv_n = 1.0 / static_cast<double>(n);
        for (auto& x : a) x *= inv_n;
    }
}

inline std::size_t next_pow2(std::size_t n) { return std::bit_ceil(n); }

} // namespace fracvisco::fracspace::detail
