// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstddef>

namespace amc::synth {

/// Amplitude-phase representation of an IQ frame: row 1 is sqrt(i^2+q^2)
/// rescaled to unit maximum, row 2 is atan2(q,i)/pi in [-1,1]. An all-zero
/// frame maps to all zeros.
template <typename In, typename Out>
void amplitude_phase_rows(const In* i_row, const In* q_row, std::size_t n, Out* amp, Out* phase) {
    double peak = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double i = static_cast<double>(i_row[k]);
        const double q = static_cast<double>(q_row[k]);
        const double a = std::sqrt(i * i + q * q);
        amp[k] = static_cast<Out>(a);
        phase[k] = static_cast<Out>(std::atan2(q, i) / 3.14159265358979323846);
        if (a > peak) peak = a;
    }
    if (peak > 0.0) {
        for (std::size_t k = 0; k < n; ++k)
            amp[k] = static_cast<Out>(static_cast<double>(amp[k]) / peak);
    }
}

}  // namespace amc::synth
