// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "amc/core/error.hpp"
#include "amc/dsp/fft.hpp"
#include "amc/synth/modtype.hpp"
#include "amc/synth/rrc.hpp"

namespace amc::synth {

using cplx = std::complex<double>;

inline std::size_t bits_per_symbol(ModType m) {
    switch (m) {
        case ModType::BPSK: return 1;
        case ModType::QPSK: return 2;
        case ModType::PSK8: return 3;
        case ModType::QAM16: return 4;
        case ModType::QAM64: return 6;
        case ModType::PAM4: return 2;
        case ModType::BFSK: return 1;
        case ModType::CPFSK: return 1;
        default:
            throw ContractError(message("bits_per_symbol: ", mod_name(m), " is not digital"));
    }
}

namespace detail {

inline std::uint32_t gray_decode(std::uint32_t g) {
    for (std::uint32_t mask = g >> 1; mask; mask >>= 1) g ^= mask;
    return g;
}

/// Gray-mapped amplitude level for a bit pattern: adjacent levels differ in
/// exactly one bit. Levels are 2*k - (M-1) for k in 0..M-1, unnormalized.
inline double gray_level(std::uint32_t pattern, std::uint32_t levels) {
    const std::uint32_t k = gray_decode(pattern);
    return 2.0 * static_cast<double>(k) - static_cast<double>(levels - 1);
}

inline std::uint32_t take_bits(const std::vector<std::uint8_t>& bits, std::size_t pos,
                               std::size_t count) {
    std::uint32_t v = 0;
    for (std::size_t i = 0; i < count; ++i) v = (v << 1) | (bits[pos + i] & 1u);
    return v;
}

}  // namespace detail

/// Maps a bit pattern of bits_per_symbol(mod) bits onto one unit-average-
/// energy constellation point (Gray coded per axis where applicable).
inline cplx map_symbol(ModType mod, std::uint32_t pattern) {
    const double inv_sqrt2 = 0.70710678118654752440;
    switch (mod) {
        case ModType::BPSK:
            return cplx(pattern ? 1.0 : -1.0, 0.0);
        case ModType::QPSK:
            return cplx((pattern & 1u) ? inv_sqrt2 : -inv_sqrt2,
                        (pattern & 2u) ? inv_sqrt2 : -inv_sqrt2);
        case ModType::PSK8: {
            const double phase =
                2.0 * 3.14159265358979323846 * detail::gray_decode(pattern) / 8.0;
            return cplx(std::cos(phase), std::sin(phase));
        }
        case ModType::QAM16:
            return cplx(detail::gray_level(pattern >> 2, 4), detail::gray_level(pattern & 3u, 4)) /
                   std::sqrt(10.0);
        case ModType::QAM64:
            return cplx(detail::gray_level(pattern >> 3, 8), detail::gray_level(pattern & 7u, 8)) /
                   std::sqrt(42.0);
        case ModType::PAM4:
            return cplx(detail::gray_level(pattern, 4) / std::sqrt(5.0), 0.0);
        default:
            throw ContractError(message("map_symbol: ", mod_name(mod), " is not a linear scheme"));
    }
}

inline double mean_power(const std::vector<cplx>& x, std::size_t begin, std::size_t end) {
    require(end > begin && end <= x.size(), "mean_power: bad range");
    double p = 0.0;
    for (std::size_t i = begin; i < end; ++i) p += std::norm(x[i]);
    return p / static_cast<double>(end - begin);
}

/// Linear digital modulation: Gray-coded symbols, upsampled by sps and
/// pulse-shaped with the supplied RRC taps (full convolution). The output
/// is renormalized so the filter-settled region has unit average power.
inline std::vector<cplx> modulate_linear(ModType mod, const std::vector<std::uint8_t>& bits,
                                         int sps, const std::vector<double>& rrc) {
    require(mod == ModType::BPSK || mod == ModType::QPSK || mod == ModType::PSK8 ||
                mod == ModType::QAM16 || mod == ModType::QAM64 || mod == ModType::PAM4,
            "modulate_linear: unsupported scheme");
    const std::size_t bps = bits_per_symbol(mod);
    require(bits.size() % bps == 0, "modulate_linear: bit count ", bits.size(),
            " not divisible by bits/symbol ", bps);
    require(sps >= 1, "modulate_linear: sps must be >= 1");
    const std::size_t n_sym = bits.size() / bps;
    require(n_sym >= 1, "modulate_linear: no symbols");

    std::vector<cplx> up(n_sym * sps, cplx(0.0, 0.0));
    for (std::size_t s = 0; s < n_sym; ++s)
        up[s * sps] = map_symbol(mod, detail::take_bits(bits, s * bps, bps));

    std::vector<cplx> y(up.size() + rrc.size() - 1, cplx(0.0, 0.0));
    for (std::size_t s = 0; s < n_sym; ++s) {
        const cplx sym = up[s * sps];
        const std::size_t base = s * sps;
        for (std::size_t k = 0; k < rrc.size(); ++k) y[base + k] += sym * rrc[k];
    }

    const std::size_t settle = rrc.size() - 1;
    std::size_t begin = settle, end = up.size();
    if (begin >= end) {
        begin = 0;
        end = y.size();
    }
    const double p = mean_power(y, begin, end);
    if (p > 0) {
        const double scale = 1.0 / std::sqrt(p);
        for (auto& v : y) v *= scale;
    }
    return y;
}

/// Continuous-phase FSK: phase advances by +-pi*h/sps per sample, so the
/// envelope is exactly constant. Decision: h = 0.5 for CPFSK, 1.0 for BFSK.
inline std::vector<cplx> modulate_fsk(ModType kind, const std::vector<std::uint8_t>& bits,
                                      int sps, double mod_index) {
    require(kind == ModType::BFSK || kind == ModType::CPFSK, "modulate_fsk: unsupported scheme");
    require(mod_index > 0.0, "modulate_fsk: modulation index must be positive");
    require(sps >= 1, "modulate_fsk: sps must be >= 1");
    require(!bits.empty(), "modulate_fsk: no bits");

    const double pi = 3.14159265358979323846;
    std::vector<cplx> y(bits.size() * static_cast<std::size_t>(sps));
    double phase = 0.0;
    std::size_t n = 0;
    for (std::uint8_t b : bits) {
        const double step = pi * mod_index * ((b & 1u) ? 1.0 : -1.0) / sps;
        for (int k = 0; k < sps; ++k) {
            phase += step;
            y[n++] = cplx(std::cos(phase), std::sin(phase));
        }
    }
    return y;
}

inline double default_fsk_index(ModType kind) { return kind == ModType::BFSK ? 1.0 : 0.5; }

/// WBFM deviation: 75 kHz at a 1 MHz sample rate, i.e. 0.075 cycles/sample
/// peak when |audio| <= 1.
inline constexpr double kWbfmDeviation = 0.075;
inline constexpr double kAmModulationIndex = 0.5;

/// Analog modulation of a peak-normalized audio signal.
inline std::vector<cplx> modulate_analog(ModType kind, const std::vector<double>& audio) {
    require(!audio.empty(), "modulate_analog: empty audio");
    const double two_pi = 6.28318530717958647692;
    std::vector<cplx> y(audio.size());
    switch (kind) {
        case ModType::WBFM: {
            double phase = 0.0;
            for (std::size_t n = 0; n < audio.size(); ++n) {
                phase += two_pi * kWbfmDeviation * audio[n];
                y[n] = cplx(std::cos(phase), std::sin(phase));
            }
            return y;
        }
        case ModType::AMDSB: {
            for (std::size_t n = 0; n < audio.size(); ++n)
                y[n] = cplx(1.0 + kAmModulationIndex * audio[n], 0.0);
            return y;
        }
        case ModType::AMSSB: {
            // upper sideband via the analytic signal; pad to a power of two
            std::size_t padded = 1;
            while (padded < audio.size()) padded <<= 1;
            std::vector<double> buf(padded, 0.0);
            for (std::size_t n = 0; n < audio.size(); ++n) buf[n] = audio[n];
            auto analytic = dsp::analytic_signal(buf);
            for (std::size_t n = 0; n < audio.size(); ++n) y[n] = analytic[n];
            return y;
        }
        default:
            throw ContractError(message("modulate_analog: ", mod_name(kind), " is not analog"));
    }
}

}  // namespace amc::synth
