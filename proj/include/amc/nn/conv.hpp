// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "amc/core/tensor.hpp"
#include "amc/core/vec.hpp"

namespace amc::nn {

/// Same-padded 1-D convolution.
///   x: [C_in, T], w: [C_out, C_in, K] with K odd, b: [C_out]
///   y[o,t] = b[o] + sum_{c,k} w[o,c,k] * x_padded[c, t+k]
/// Zero padding of width (K-1)/2 on both ends keeps the output length T.
template <typename T>
Tensor<T> conv1d_forward(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& b) {
    require(x.rank() == 2, "conv1d: x rank ", x.rank(), " != 2");
    require(w.rank() == 3, "conv1d: w rank ", w.rank(), " != 3");
    require(b.rank() == 1, "conv1d: b rank ", b.rank(), " != 1");
    const std::size_t c_in = x.dim(0), time = x.dim(1);
    const std::size_t c_out = w.dim(0), k = w.dim(2);
    require(w.dim(1) == c_in, "conv1d: w.dim(1)=", w.dim(1), " does not match x.dim(0)=", c_in);
    require(b.dim(0) == c_out, "conv1d: b.dim(0)=", b.dim(0), " does not match w.dim(0)=", c_out);
    require(k % 2 == 1, "conv1d: kernel width ", k, " must be odd");

    const std::size_t pad = (k - 1) / 2;
    const std::size_t padded = time + k - 1;
    std::vector<T> xpad(c_in * padded, T(0));
    for (std::size_t c = 0; c < c_in; ++c)
        for (std::size_t t = 0; t < time; ++t) xpad[c * padded + pad + t] = x(c, t);

    Tensor<T> y({c_out, time});
    for (std::size_t o = 0; o < c_out; ++o) {
        T* yo = y.data.data() + o * time;
        for (std::size_t t = 0; t < time; ++t) yo[t] = b(o);
        for (std::size_t c = 0; c < c_in; ++c) {
            const T* xc = xpad.data() + c * padded;
            for (std::size_t kk = 0; kk < k; ++kk) {
                const T wv = w(o, c, kk);
                const T* xs = xc + kk;
                for (std::size_t t = 0; t < time; ++t) yo[t] += wv * xs[t];
            }
        }
    }
    return y;
}

template <typename T>
struct Conv1dGrads {
    Tensor<T> gx, gw, gb;
};

/// Analytic gradients of conv1d_forward for x, w and b given dL/dy.
template <typename T>
Conv1dGrads<T> conv1d_backward(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& gy) {
    const std::size_t c_in = x.dim(0), time = x.dim(1);
    const std::size_t c_out = w.dim(0), k = w.dim(2);
    require(gy.rank() == 2 && gy.dim(0) == c_out && gy.dim(1) == time,
            "conv1d_backward: gy shape ", shape_string(gy), " does not match output [",
            c_out, ",", time, "]");

    const std::size_t pad = (k - 1) / 2;
    const std::size_t padded = time + k - 1;
    std::vector<T> xpad(c_in * padded, T(0));
    for (std::size_t c = 0; c < c_in; ++c)
        for (std::size_t t = 0; t < time; ++t) xpad[c * padded + pad + t] = x(c, t);

    Conv1dGrads<T> g{Tensor<T>({c_in, time}), Tensor<T>({c_out, c_in, k}), Tensor<T>({c_out})};
    std::vector<T> gxpad(c_in * padded, T(0));

    for (std::size_t o = 0; o < c_out; ++o) {
        const T* gyo = gy.data.data() + o * time;
        T gb = T(0);
        for (std::size_t t = 0; t < time; ++t) gb += gyo[t];
        g.gb(o) = gb;
        for (std::size_t c = 0; c < c_in; ++c) {
            const T* xc = xpad.data() + c * padded;
            T* gxc = gxpad.data() + c * padded;
            for (std::size_t kk = 0; kk < k; ++kk) {
                const T* xs = xc + kk;
                g.gw(o, c, kk) = vec::dot(gyo, xs, time);
                vec::axpy(gxc + kk, w(o, c, kk), gyo, time);
            }
        }
    }
    for (std::size_t c = 0; c < c_in; ++c)
        for (std::size_t t = 0; t < time; ++t) g.gx(c, t) = gxpad[c * padded + pad + t];
    return g;
}

}  // namespace amc::nn
