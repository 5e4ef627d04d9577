// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>

#include "amc/core/tensor.hpp"

namespace amc::nn {

template <typename T>
struct CrossEntropyOut {
    double loss = 0.0;
    Tensor<T> dlogits;  // gradient wrt pre-softmax logits: (probs - labels) / N
};

/// Categorical cross entropy over softmax outputs. Probabilities are
/// clamped to [1e-7, 1-1e-7] before the log. The returned gradient is the
/// fused softmax+CE form, taken wrt the pre-softmax logits.
template <typename T>
CrossEntropyOut<T> cross_entropy(const Tensor<T>& probs, const Tensor<T>& labels) {
    require(probs.rank() == 2, "cross_entropy: probs rank ", probs.rank(), " != 2");
    require(probs.same_shape(labels), "cross_entropy: labels shape ", shape_string(labels),
            " does not match probs shape ", shape_string(probs));
    const std::size_t n = probs.dim(0), classes = probs.dim(1);
    require(n >= 1, "cross_entropy: empty batch");

    CrossEntropyOut<T> out;
    out.dlogits = Tensor<T>({n, classes});
    const double lo = 1e-7, hi = 1.0 - 1e-7;
    double total = 0.0;
    const T inv_n = T(1) / static_cast<T>(n);
    for (std::size_t r = 0; r < n; ++r) {
        std::size_t ones = 0, true_class = 0;
        for (std::size_t c = 0; c < classes; ++c) {
            const T l = labels(r, c);
            if (l == T(1)) {
                ++ones;
                true_class = c;
            } else if (l != T(0)) {
                throw ContractError(message("cross_entropy: labels row ", r, " not one-hot"));
            }
            out.dlogits(r, c) = (probs(r, c) - l) * inv_n;
        }
        require(ones == 1, "cross_entropy: labels row ", r, " not one-hot");
        double p = static_cast<double>(probs(r, true_class));
        p = p < lo ? lo : (p > hi ? hi : p);
        total -= std::log(p);
    }
    out.loss = total / static_cast<double>(n);
    return out;
}

/// Single-sample form used by the mini-batch loop: the gradient is scaled
/// by inv_batch so per-sample contributions sum to the batch gradient.
template <typename T>
double cross_entropy_sample(const Tensor<T>& probs, std::size_t true_class, T inv_batch,
                            Tensor<T>& dlogits_out) {
    require(probs.rank() == 1, "cross_entropy_sample: probs rank ", probs.rank(), " != 1");
    const std::size_t classes = probs.dim(0);
    require(true_class < classes, "cross_entropy_sample: class ", true_class, " out of range ",
            classes);
    dlogits_out = Tensor<T>({classes});
    for (std::size_t c = 0; c < classes; ++c)
        dlogits_out(c) = (probs(c) - (c == true_class ? T(1) : T(0))) * inv_batch;
    double p = static_cast<double>(probs(true_class));
    const double lo = 1e-7, hi = 1.0 - 1e-7;
    p = p < lo ? lo : (p > hi ? hi : p);
    return -std::log(p);
}

}  // namespace amc::nn
