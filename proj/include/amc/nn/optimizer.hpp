// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "amc/core/tensor.hpp"

namespace amc::nn {

/// Rescales every output-unit row (leading axis) whose incoming-weight L2
/// norm exceeds the limit down to exactly the limit. A small relative slack
/// on the comparison makes the projection bit-exactly idempotent: a row
/// that was just projected will not be touched again.
template <typename T>
void max_norm_project(Tensor<T>& w, T limit) {
    require(limit > T(0), "max_norm_project: limit ", limit, " must be positive");
    require(w.rank() >= 1, "max_norm_project: rank-0 tensor");
    const std::size_t rows = w.dim(0);
    const std::size_t row_len = w.numel() / rows;
    const T slack = T(1) + T(8) * std::numeric_limits<T>::epsilon();
    for (std::size_t r = 0; r < rows; ++r) {
        T* row = w.data.data() + r * row_len;
        T sq = T(0);
        for (std::size_t j = 0; j < row_len; ++j) sq += row[j] * row[j];
        const T norm = std::sqrt(sq);
        if (norm > limit * slack) {
            const T scale = limit / norm;
            for (std::size_t j = 0; j < row_len; ++j) row[j] *= scale;
        }
    }
}

template <typename T>
struct AdamHyper {
    T lr = T(0.001);
    T beta1 = T(0.9);
    T beta2 = T(0.999);
    T eps = T(1e-8);
};

/// Per-parameter first/second moment buffers plus the shared step counter,
/// which increments by exactly one per adam_step call.
template <typename T>
struct AdamState {
    std::vector<Tensor<T>> m, v;
    long t = 0;

    static AdamState for_params(const std::vector<Parameter<T>*>& params) {
        AdamState s;
        s.m.reserve(params.size());
        s.v.reserve(params.size());
        for (const Parameter<T>* p : params) {
            s.m.push_back(Tensor<T>(p->value.shape));
            s.v.push_back(Tensor<T>(p->value.shape));
        }
        return s;
    }
};

/// Bias-corrected Adam update from the gradients accumulated in each
/// parameter, followed by the max-norm projection on constrained ones.
template <typename T>
void adam_step(const std::vector<Parameter<T>*>& params, AdamState<T>& state,
               const AdamHyper<T>& hyper) {
    require(hyper.lr > T(0), "adam_step: lr ", hyper.lr, " must be positive");
    require(state.m.size() == params.size(), "adam_step: state tracks ", state.m.size(),
            " parameters, got ", params.size());
    state.t += 1;
    const T bc1 = T(1) - std::pow(hyper.beta1, static_cast<T>(state.t));
    const T bc2 = T(1) - std::pow(hyper.beta2, static_cast<T>(state.t));
    for (std::size_t i = 0; i < params.size(); ++i) {
        Parameter<T>& p = *params[i];
        require(p.grad.same_shape(p.value), "adam_step: grad shape ", shape_string(p.grad),
                " does not match value shape ", shape_string(p.value), " for ", p.name);
        Tensor<T>& m = state.m[i];
        Tensor<T>& v = state.v[i];
        for (std::size_t j = 0; j < p.value.numel(); ++j) {
            const T g = p.grad.data[j];
            m.data[j] = hyper.beta1 * m.data[j] + (T(1) - hyper.beta1) * g;
            v.data[j] = hyper.beta2 * v.data[j] + (T(1) - hyper.beta2) * g * g;
            const T m_hat = m.data[j] / bc1;
            const T v_hat = v.data[j] / bc2;
            p.value.data[j] -= hyper.lr * m_hat / (std::sqrt(v_hat) + hyper.eps);
        }
        if (p.max_norm_limit > T(0)) max_norm_project(p.value, p.max_norm_limit);
    }
}

}  // namespace amc::nn
