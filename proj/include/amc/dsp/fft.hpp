// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <vector>

#include "amc/core/error.hpp"

namespace amc::dsp {

inline bool is_power_of_two(std::size_t n) { return n > 0 && (n & (n - 1)) == 0; }

/// In-place iterative radix-2 FFT. The inverse transform includes the 1/N
/// scaling. Length must be a power of two.
inline void fft_inplace(std::vector<std::complex<double>>& a, bool inverse) {
    const std::size_t n = a.size();
    require(is_power_of_two(n), "fft: length ", n, " is not a power of two");
    // bit-reversal permutation
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    const double pi = 3.14159265358979323846;
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double angle = 2.0 * pi / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
        const std::complex<double> wlen(std::cos(angle), std::sin(angle));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                std::complex<double> u = a[i + k];
                std::complex<double> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
    if (inverse) {
        for (auto& x : a) x /= static_cast<double>(n);
    }
}

inline std::vector<std::complex<double>> fft(std::vector<std::complex<double>> a) {
    fft_inplace(a, false);
    return a;
}

inline std::vector<std::complex<double>> ifft(std::vector<std::complex<double>> a) {
    fft_inplace(a, true);
    return a;
}

/// Analytic signal of a real sequence (FFT method): negative frequencies
/// are zeroed, positive ones doubled. Length must be a power of two.
inline std::vector<std::complex<double>> analytic_signal(const std::vector<double>& x) {
    const std::size_t n = x.size();
    require(is_power_of_two(n), "analytic_signal: length ", n, " is not a power of two");
    std::vector<std::complex<double>> spec(n);
    for (std::size_t i = 0; i < n; ++i) spec[i] = std::complex<double>(x[i], 0.0);
    fft_inplace(spec, false);
    for (std::size_t k = 1; k < n / 2; ++k) spec[k] *= 2.0;
    for (std::size_t k = n / 2 + 1; k < n; ++k) spec[k] = 0.0;
    fft_inplace(spec, true);
    return spec;
}

/// Index of the strongest FFT bin of a complex signal (power of two length).
inline std::size_t peak_bin(const std::vector<std::complex<double>>& x) {
    auto spec = fft(x);
    std::size_t best = 0;
    double best_mag = -1.0;
    for (std::size_t k = 0; k < spec.size(); ++k) {
        double m = std::norm(spec[k]);
        if (m > best_mag) {
            best_mag = m;
            best = k;
        }
    }
    return best;
}

}  // namespace amc::dsp
