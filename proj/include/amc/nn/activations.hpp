// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>

#include "amc/core/tensor.hpp"

namespace amc::nn {

template <typename T>
Tensor<T> relu(const Tensor<T>& x) {
    Tensor<T> y = x;
    for (auto& v : y.data) v = v > T(0) ? v : T(0);
    return y;
}

/// dL/dx from dL/dy using the forward output (relu(x) > 0 iff x > 0).
template <typename T>
Tensor<T> relu_backward(const Tensor<T>& y, const Tensor<T>& gy) {
    require(y.same_shape(gy), "relu_backward: grad shape ", shape_string(gy),
            " does not match output shape ", shape_string(y));
    Tensor<T> gx = gy;
    for (std::size_t i = 0; i < gx.data.size(); ++i)
        if (!(y.data[i] > T(0))) gx.data[i] = T(0);
    return gx;
}

/// Softmax over the last axis, computed with max-subtraction so that large
/// logits do not overflow. Rows sum to 1 within 1e-6.
template <typename T>
Tensor<T> softmax(const Tensor<T>& x) {
    require(x.rank() >= 1, "softmax: rank-0 input");
    const std::size_t cols = x.shape.back();
    const std::size_t rows = x.numel() / cols;
    Tensor<T> y = x;
    for (std::size_t r = 0; r < rows; ++r) {
        T* row = y.data.data() + r * cols;
        T mx = row[0];
        for (std::size_t c = 1; c < cols; ++c) mx = std::max(mx, row[c]);
        T sum = T(0);
        for (std::size_t c = 0; c < cols; ++c) {
            row[c] = std::exp(row[c] - mx);
            sum += row[c];
        }
        for (std::size_t c = 0; c < cols; ++c) row[c] /= sum;
    }
    return y;
}

template <typename T>
T sigmoid_scalar(T v) {
    return v >= T(0) ? T(1) / (T(1) + std::exp(-v)) : std::exp(v) / (T(1) + std::exp(v));
}

}  // namespace amc::nn
