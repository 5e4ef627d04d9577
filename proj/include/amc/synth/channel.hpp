// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "amc/core/rng.hpp"
#include "amc/synth/modtype.hpp"

namespace amc::synth {

struct FadingTap {
    int delay = 0;        // samples
    double power_db = 0;  // relative to the direct path
};

/// Distribution parameters of the channel draw applied to each sample:
/// multipath taps, oscillator random walks, and the random scale / phase /
/// translation ambiguities.
struct ChannelConfig {
    double snr_db = 0.0;          // target for the additive noise stage
    double cfo_offset = 0.0;      // constant carrier offset, rad/sample
    double cfo_walk_std = 1e-4;   // carrier random-walk step, rad/sample
    double sro_ppm_std = 0.01;    // clock random-walk step, ppm/sample
    std::vector<FadingTap> fading_taps = {{0, 0.0}, {2, -6.0}, {5, -12.0}};
    bool randomize_tap_phase = true;  // echoes get a uniform random phase
    double phase_max = 6.28318530717958647692;  // phase offset ~ U[0, phase_max)
    double scale_min = 0.5;  // amplitude scale ~ log-uniform [scale_min, scale_max]
    double scale_max = 2.0;

    /// A channel with every impairment disabled; apply_channel becomes the
    /// identity.
    static ChannelConfig identity() {
        ChannelConfig c;
        c.cfo_offset = 0.0;
        c.cfo_walk_std = 0.0;
        c.sro_ppm_std = 0.0;
        c.fading_taps = {{0, 0.0}};
        c.randomize_tap_phase = false;
        c.phase_max = 0.0;
        c.scale_min = c.scale_max = 1.0;
        return c;
    }

    int max_delay() const {
        int d = 0;
        for (const auto& tap : fading_taps) d = std::max(d, tap.delay);
        return d;
    }

    void check() const {
        require(cfo_walk_std >= 0 && sro_ppm_std >= 0, "channel: walk stds must be >= 0");
        require(!fading_taps.empty() && fading_taps[0].delay == 0 &&
                    fading_taps[0].power_db == 0.0,
                "channel: fading tap 0 must be the 0 dB direct path");
        for (const auto& tap : fading_taps)
            require(tap.delay >= 0, "channel: negative tap delay ", tap.delay);
        require(scale_min > 0 && scale_max >= scale_min, "channel: bad scale range");
        require(phase_max >= 0, "channel: phase_max must be >= 0");
    }
};

/// Margin consumed by the fractional resampler at the signal tail.
inline constexpr std::size_t kResampleMargin = 8;

/// Applies the impairment chain in a fixed order: multipath FIR, clock
/// drift (fractional resampling over an sro random walk), carrier mixing
/// (cfo random walk plus a random phase offset), then an amplitude scale.
/// The output is truncated to len(x) - max_delay - kResampleMargin.
inline std::vector<std::complex<double>> apply_channel(const std::vector<std::complex<double>>& x,
                                                       const ChannelConfig& cfg, SeededRng& rng) {
    cfg.check();
    const std::size_t max_delay = static_cast<std::size_t>(cfg.max_delay());
    require(x.size() > max_delay + kResampleMargin + 1,
            "apply_channel: insufficient input length ", x.size(), " for delay ", max_delay,
            " plus resampling margin");
    const std::size_t out_len = x.size() - max_delay - kResampleMargin;

    // draw order is fixed: phase offset, scale, tap phases, sro walk, cfo walk
    const double phase_offset = cfg.phase_max > 0 ? rng.uniform(0.0, cfg.phase_max) : 0.0;
    const double scale =
        cfg.scale_min == cfg.scale_max ? cfg.scale_min : rng.log_uniform(cfg.scale_min, cfg.scale_max);

    std::vector<std::complex<double>> taps;
    taps.reserve(cfg.fading_taps.size());
    for (std::size_t i = 0; i < cfg.fading_taps.size(); ++i) {
        const double amp = std::pow(10.0, cfg.fading_taps[i].power_db / 20.0);
        double ph = 0.0;
        if (cfg.randomize_tap_phase && cfg.fading_taps[i].delay != 0)
            ph = rng.uniform(0.0, 6.28318530717958647692);
        taps.emplace_back(amp * std::cos(ph), amp * std::sin(ph));
    }

    // multipath FIR (unit direct path plus delayed echoes)
    std::vector<std::complex<double>> faded(x.size(), {0.0, 0.0});
    for (std::size_t n = 0; n < x.size(); ++n) {
        std::complex<double> acc(0.0, 0.0);
        for (std::size_t ti = 0; ti < taps.size(); ++ti) {
            const std::size_t d = static_cast<std::size_t>(cfg.fading_taps[ti].delay);
            if (n >= d) acc += taps[ti] * x[n - d];
        }
        faded[n] = acc;
    }

    // sample-clock dilation: read positions advance by 1 + walk(ppm)*1e-6,
    // linear interpolation between input samples
    std::vector<std::complex<double>> resampled(out_len);
    double pos = 0.0;
    double ppm_walk = 0.0;
    for (std::size_t n = 0; n < out_len; ++n) {
        const std::size_t i = static_cast<std::size_t>(pos);
        const double frac = pos - static_cast<double>(i);
        if (frac == 0.0 || i + 1 >= faded.size()) {
            resampled[n] = faded[std::min(i, faded.size() - 1)];
        } else {
            resampled[n] = faded[i] + frac * (faded[i + 1] - faded[i]);
        }
        ppm_walk += rng.normal() * cfg.sro_ppm_std;
        pos += 1.0 + ppm_walk * 1e-6;
    }

    // carrier mixing: frequency random-walks around cfo_offset
    double freq = cfg.cfo_offset;
    double phase = phase_offset;
    for (std::size_t n = 0; n < out_len; ++n) {
        resampled[n] *= std::complex<double>(std::cos(phase), std::sin(phase)) * scale;
        freq += rng.normal() * cfg.cfo_walk_std;
        phase += freq;
    }
    return resampled;
}

/// Adds complex white Gaussian noise with per-sample variance
/// P_x / 10^(snr_db/10), where P_x is the mean power of x.
inline std::vector<std::complex<double>> add_awgn(const std::vector<std::complex<double>>& x,
                                                  double snr_db, SeededRng& rng) {
    require(!x.empty(), "add_awgn: empty signal");
    double power = 0.0;
    for (const auto& v : x) power += std::norm(v);
    power /= static_cast<double>(x.size());
    require(power > 0.0, "add_awgn: zero-power input");
    const double noise_var = power / std::pow(10.0, snr_db / 10.0);
    const double sigma = std::sqrt(noise_var / 2.0);
    std::vector<std::complex<double>> y(x.size());
    for (std::size_t n = 0; n < x.size(); ++n) {
        const double re = rng.normal() * sigma;
        const double im = rng.normal() * sigma;
        y[n] = x[n] + std::complex<double>(re, im);
    }
    return y;
}

/// 10*log10(sum|clean|^2 / sum|noisy-clean|^2); +infinity when the signals
/// are identical.
inline double measure_snr(const std::vector<std::complex<double>>& clean,
                          const std::vector<std::complex<double>>& noisy) {
    require(clean.size() == noisy.size(), "measure_snr: length mismatch ", clean.size(), " vs ",
            noisy.size());
    require(!clean.empty(), "measure_snr: empty signals");
    double sig = 0.0, noise = 0.0;
    for (std::size_t n = 0; n < clean.size(); ++n) {
        sig += std::norm(clean[n]);
        noise += std::norm(noisy[n] - clean[n]);
    }
    if (noise == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(sig / noise);
}

}  // namespace amc::synth
