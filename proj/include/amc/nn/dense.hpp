// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "amc/core/tensor.hpp"
#include "amc/core/vec.hpp"

namespace amc::nn {

/// Fully connected layer: y = W x + b with W: [U, F], x: [F], b: [U].
template <typename T>
Tensor<T> dense_forward(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& b) {
    require(x.rank() == 1, "dense: x rank ", x.rank(), " != 1");
    require(w.rank() == 2, "dense: W rank ", w.rank(), " != 2");
    const std::size_t units = w.dim(0), features = w.dim(1);
    require(x.dim(0) == features, "dense: x.dim(0)=", x.dim(0),
            " does not match W.dim(1)=", features);
    require(b.rank() == 1 && b.dim(0) == units, "dense: b shape ", shape_string(b),
            " does not match W.dim(0)=", units);

    Tensor<T> y({units});
    for (std::size_t u = 0; u < units; ++u)
        y(u) = b(u) + vec::dot(w.data.data() + u * features, x.data.data(), features);
    return y;
}

template <typename T>
struct DenseGrads {
    Tensor<T> gx, gw, gb;
};

/// dL/dx = W^T g, dL/dW = g (outer) x, dL/db = g.
template <typename T>
DenseGrads<T> dense_backward(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& gy) {
    const std::size_t units = w.dim(0), features = w.dim(1);
    require(gy.rank() == 1 && gy.dim(0) == units, "dense_backward: gy shape ",
            shape_string(gy), " does not match output [", units, "]");
    DenseGrads<T> g{Tensor<T>({features}), Tensor<T>({units, features}), Tensor<T>({units})};
    for (std::size_t u = 0; u < units; ++u) {
        const T gu = gy(u);
        vec::axpy(g.gx.data.data(), gu, w.data.data() + u * features, features);
        vec::axpy(g.gw.data.data() + u * features, gu, x.data.data(), features);
        g.gb(u) = gu;
    }
    return g;
}

}  // namespace amc::nn
