// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>

#include "amc/core/rng.hpp"
#include "amc/core/tensor.hpp"

namespace amc::nn {

enum class InitScheme { glorot_uniform, orthogonal, zeros };

namespace detail {

inline void fan_in_out(const std::vector<std::size_t>& shape, double& fan_in, double& fan_out) {
    if (shape.size() == 1) {
        fan_in = fan_out = static_cast<double>(shape[0]);
    } else if (shape.size() == 2) {  // [units, features]
        fan_in = static_cast<double>(shape[1]);
        fan_out = static_cast<double>(shape[0]);
    } else {  // [c_out, c_in, k]: receptive field multiplies both fans
        std::size_t rf = 1;
        for (std::size_t i = 2; i < shape.size(); ++i) rf *= shape[i];
        fan_in = static_cast<double>(shape[1] * rf);
        fan_out = static_cast<double>(shape[0] * rf);
    }
}

}  // namespace detail

/// Deterministic parameter initialization. Glorot bound is
/// sqrt(6/(fan_in+fan_out)); orthogonal runs modified Gram-Schmidt on a
/// Gaussian matrix (rows >= cols required) so Q^T Q = I within 1e-5.
template <typename T>
Tensor<T> init_params(const std::vector<std::size_t>& shape, InitScheme scheme, SeededRng& rng) {
    require(!shape.empty(), "init_params: empty shape");
    if (scheme == InitScheme::zeros) return Tensor<T>(std::vector<std::size_t>(shape));

    if (scheme == InitScheme::glorot_uniform) {
        double fan_in = 0, fan_out = 0;
        detail::fan_in_out(shape, fan_in, fan_out);
        const double bound = std::sqrt(6.0 / (fan_in + fan_out));
        Tensor<T> t{std::vector<std::size_t>(shape)};
        for (auto& v : t.data) v = static_cast<T>(rng.uniform(-bound, bound));
        return t;
    }

    // orthogonal
    require(shape.size() == 2, "init_params: orthogonal requires a rank-2 shape");
    const std::size_t rows = shape[0], cols = shape[1];
    require(rows >= cols, "init_params: orthogonal requires rows >= cols, got ", rows, "x", cols);
    std::vector<double> q(rows * cols);
    for (auto& v : q) v = rng.normal();
    for (std::size_t c = 0; c < cols; ++c) {
        for (std::size_t prev = 0; prev < c; ++prev) {
            double dot = 0;
            for (std::size_t r = 0; r < rows; ++r) dot += q[r * cols + c] * q[r * cols + prev];
            for (std::size_t r = 0; r < rows; ++r) q[r * cols + c] -= dot * q[r * cols + prev];
        }
        double norm = 0;
        for (std::size_t r = 0; r < rows; ++r) norm += q[r * cols + c] * q[r * cols + c];
        norm = std::sqrt(norm);
        require(norm > 1e-12, "init_params: degenerate column in orthogonal init");
        for (std::size_t r = 0; r < rows; ++r) q[r * cols + c] /= norm;
    }
    Tensor<T> t{std::vector<std::size_t>(shape)};
    for (std::size_t i = 0; i < q.size(); ++i) t.data[i] = static_cast<T>(q[i]);
    return t;
}

}  // namespace amc::nn
