// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

#include "amc/core/tensor.hpp"

namespace amc::nn {

template <typename T>
struct MaxPoolOut {
    Tensor<T> y;                       // [C, L] with L = floor((T-size)/stride)+1
    std::vector<std::uint32_t> argmax; // flat index into x per output element
};

/// Max pooling over non-overlapping or strided windows. Ties break to the
/// lowest index.
template <typename T>
MaxPoolOut<T> maxpool1d_forward(const Tensor<T>& x, std::size_t size, std::size_t stride) {
    require(x.rank() == 2, "maxpool1d: x rank ", x.rank(), " != 2");
    require(size >= 1 && stride >= 1, "maxpool1d: size and stride must be >= 1");
    const std::size_t channels = x.dim(0), time = x.dim(1);
    require(time >= size, "maxpool1d: input length ", time, " shorter than window ", size,
            " yields an empty output");
    const std::size_t out_len = (time - size) / stride + 1;

    MaxPoolOut<T> out{Tensor<T>({channels, out_len}), {}};
    out.argmax.resize(channels * out_len);
    for (std::size_t c = 0; c < channels; ++c) {
        const T* xc = x.data.data() + c * time;
        for (std::size_t i = 0; i < out_len; ++i) {
            const std::size_t begin = i * stride;
            std::size_t best = begin;
            T best_v = xc[begin];
            for (std::size_t j = begin + 1; j < begin + size; ++j) {
                if (xc[j] > best_v) {  // strict: ties keep the lowest index
                    best_v = xc[j];
                    best = j;
                }
            }
            out.y(c, i) = best_v;
            out.argmax[c * out_len + i] = static_cast<std::uint32_t>(c * time + best);
        }
    }
    return out;
}

/// Routes each output gradient to the position that won its window, so the
/// total gradient mass is conserved.
template <typename T>
Tensor<T> maxpool1d_backward(const Tensor<T>& gy, const std::vector<std::uint32_t>& argmax,
                             std::size_t channels, std::size_t time) {
    require(gy.numel() == argmax.size(), "maxpool1d_backward: grad count ", gy.numel(),
            " does not match stored argmax count ", argmax.size());
    Tensor<T> gx({channels, time});
    for (std::size_t i = 0; i < argmax.size(); ++i) gx.data[argmax[i]] += gy.data[i];
    return gx;
}

}  // namespace amc::nn
