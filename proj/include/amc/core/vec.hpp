// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>

namespace amc::vec {

/// Dot product with 16 independent accumulators so the compiler can keep
/// SIMD lanes busy without reassociating a single serial chain. The
/// summation order is fixed, so results are reproducible run to run.
template <typename T>
T dot(const T* a, const T* b, std::size_t n) {
    T acc[16] = {};
    std::size_t j = 0;
    for (; j + 16 <= n; j += 16) {
        for (int k = 0; k < 16; ++k) acc[k] += a[j + k] * b[j + k];
    }
    T s = ((acc[0] + acc[1]) + (acc[2] + acc[3])) + ((acc[4] + acc[5]) + (acc[6] + acc[7])) +
          (((acc[8] + acc[9]) + (acc[10] + acc[11])) + ((acc[12] + acc[13]) + (acc[14] + acc[15])));
    for (; j < n; ++j) s += a[j] * b[j];
    return s;
}

/// y += alpha * x
template <typename T>
void axpy(T* y, T alpha, const T* x, std::size_t n) {
    for (std::size_t j = 0; j < n; ++j) y[j] += alpha * x[j];
}

}  // namespace amc::vec
