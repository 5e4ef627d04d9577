// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <vector>

#include "amc/core/error.hpp"

namespace amc::synth {

/// Unit-energy root-raised-cosine taps spanning `span_symbols` symbols at
/// `sps` samples per symbol (length span*sps + 1, symmetric). The two
/// removable singularities are evaluated by their limit formulas.
inline std::vector<double> rrc_taps(double rolloff, int span_symbols, int sps) {
    require(rolloff > 0.0 && rolloff <= 1.0, "rrc_taps: rolloff ", rolloff, " outside (0, 1]");
    require(span_symbols > 0 && span_symbols % 2 == 0, "rrc_taps: span ", span_symbols,
            " must be positive and even");
    require(sps >= 1, "rrc_taps: sps must be >= 1");

    const double pi = 3.14159265358979323846;
    const int half = span_symbols * sps / 2;
    std::vector<double> taps(2 * half + 1);
    // evaluate n >= 0 and mirror: the pulse is even, so symmetry is exact
    for (int n = 0; n <= half; ++n) {
        const double t = static_cast<double>(n) / sps;  // in symbol periods
        double v;
        if (n == 0) {
            v = 1.0 - rolloff + 4.0 * rolloff / pi;
        } else if (std::fabs(t - 1.0 / (4.0 * rolloff)) < 1e-12) {
            const double a = rolloff;
            v = (a / std::sqrt(2.0)) * ((1.0 + 2.0 / pi) * std::sin(pi / (4.0 * a)) +
                                        (1.0 - 2.0 / pi) * std::cos(pi / (4.0 * a)));
        } else {
            const double num = std::sin(pi * t * (1.0 - rolloff)) +
                               4.0 * rolloff * t * std::cos(pi * t * (1.0 + rolloff));
            const double den = pi * t * (1.0 - 16.0 * rolloff * rolloff * t * t);
            v = num / den;
        }
        taps[half + n] = v;
        taps[half - n] = v;
    }
    double energy = 0.0;
    for (double v : taps) energy += v * v;
    const double scale = 1.0 / std::sqrt(energy);
    for (double& v : taps) v *= scale;
    return taps;
}

}  // namespace amc::synth
