// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <vector>

#include "amc/core/rng.hpp"
#include "amc/dsp/fft.hpp"

namespace amc::synth {

/// Synthetic analog source: 3-8 random low-frequency tones plus exactly
/// band-limited noise, peak-normalized to 1. With probability silence_prob
/// a ramped silent segment is inserted; the ramp keeps the gating splatter
/// below the out-of-band budget. Length must be a power of two.
inline std::vector<double> synth_audio(SeededRng& rng, std::size_t length,
                                       double bandwidth_fraction, double silence_prob = 0.2) {
    require(bandwidth_fraction > 0.0 && bandwidth_fraction < 0.5,
            "synth_audio: bandwidth_fraction ", bandwidth_fraction, " outside (0, 0.5)");
    require(dsp::is_power_of_two(length), "synth_audio: length ", length,
            " is not a power of two");

    const double two_pi = 6.28318530717958647692;
    std::vector<double> x(length, 0.0);

    const std::size_t tone_count = 3 + static_cast<std::size_t>(rng.next_below(6));
    for (std::size_t t = 0; t < tone_count; ++t) {
        const double f = rng.uniform(0.25, 0.85) * bandwidth_fraction;
        const double amp = rng.uniform(0.2, 1.0);
        const double ph = rng.uniform(0.0, two_pi);
        for (std::size_t n = 0; n < length; ++n)
            x[n] += amp * std::sin(two_pi * f * static_cast<double>(n) + ph);
    }

    // band-limited noise built directly in the frequency domain
    const std::size_t max_bin =
        static_cast<std::size_t>(0.9 * bandwidth_fraction * static_cast<double>(length));
    std::vector<std::complex<double>> spec(length, {0.0, 0.0});
    for (std::size_t k = 1; k <= max_bin && k < length / 2; ++k) {
        const std::complex<double> v(rng.normal(), rng.normal());
        spec[k] = v;
        spec[length - k] = std::conj(v);
    }
    dsp::fft_inplace(spec, true);
    double noise_peak = 0.0;
    for (const auto& v : spec) noise_peak = std::max(noise_peak, std::fabs(v.real()));
    if (noise_peak > 0.0) {
        const double noise_amp = 0.3 / noise_peak;
        for (std::size_t n = 0; n < length; ++n) x[n] += noise_amp * spec[n].real();
    }

    if (rng.uniform01() < silence_prob) {
        const std::size_t seg = length / 10 + static_cast<std::size_t>(
                                                  rng.next_below(std::max<std::size_t>(1, length * 3 / 10)));
        const std::size_t start = static_cast<std::size_t>(
            rng.next_below(std::max<std::size_t>(1, length - seg)));
        const std::size_t ramp = std::min<std::size_t>(16, seg / 2);
        for (std::size_t n = 0; n < seg && start + n < length; ++n) {
            double g = 0.0;
            if (n < ramp)
                g = 0.5 * (1.0 + std::cos(3.14159265358979323846 * static_cast<double>(n) / ramp));
            else if (seg - n <= ramp)
                g = 0.5 * (1.0 + std::cos(3.14159265358979323846 *
                                          static_cast<double>(seg - n) / ramp));
            x[start + n] *= g;
        }
    }

    double peak = 0.0;
    for (double v : x) peak = std::max(peak, std::fabs(v));
    if (peak > 0.0)
        for (double& v : x) v /= peak;
    return x;
}

}  // namespace amc::synth
