// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "amc/core/rng.hpp"
#include "amc/core/tensor.hpp"

namespace amc::nn {

template <typename T>
struct DropoutOut {
    Tensor<T> y;
    Tensor<T> mask;  // 0 for dropped entries, 1/(1-rate) for kept ones
};

/// Inverted dropout: kept entries are scaled by 1/(1-rate) so the expected
/// output equals the input. training=false is a bit-exact identity.
template <typename T>
DropoutOut<T> dropout(const Tensor<T>& x, double rate, SeededRng& rng, bool training) {
    require(rate >= 0.0 && rate < 1.0, "dropout: rate ", rate, " outside [0, 1)");
    DropoutOut<T> out;
    out.y = x;
    if (!training || rate == 0.0) {
        out.mask = Tensor<T>::full(x.shape, T(1));
        return out;
    }
    out.mask = Tensor<T>(x.shape);
    const T keep_scale = T(1.0 / (1.0 - rate));
    for (std::size_t i = 0; i < x.numel(); ++i) {
        const T m = rng.uniform01() < rate ? T(0) : keep_scale;
        out.mask.data[i] = m;
        out.y.data[i] = x.data[i] * m;
    }
    return out;
}

template <typename T>
Tensor<T> dropout_backward(const Tensor<T>& gy, const Tensor<T>& mask) {
    require(gy.same_shape(mask), "dropout_backward: grad shape ", shape_string(gy),
            " does not match mask shape ", shape_string(mask));
    Tensor<T> gx = gy;
    for (std::size_t i = 0; i < gx.numel(); ++i) gx.data[i] *= mask.data[i];
    return gx;
}

}  // namespace amc::nn
