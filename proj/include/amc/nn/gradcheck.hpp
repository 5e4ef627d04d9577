// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "amc/core/rng.hpp"
#include "amc/core/tensor.hpp"

namespace amc::nn {

struct GradCheckResult {
    double max_rel_err = 0.0;
    std::size_t coords_checked = 0;
    std::size_t kinks_skipped = 0;
};

/// Central-difference gradient verification, run in 64-bit mode.
///
/// `loss_fn(with_backward)` evaluates the model loss at the current
/// parameter values; when with_backward is true it must also fill each
/// parameter's grad. At least `coords_per_tensor` coordinates are sampled
/// per tensor (all of them when the tensor is smaller). Relative error is
/// |analytic - numeric| / max(|analytic|, |numeric|, 1e-8).
///
/// A central difference across a relu corner or a flipped pooling argmax
/// is not a derivative estimate, so when `branch_fingerprint` is supplied
/// (a digest of the forward pass's branch decisions) any coordinate whose
/// two perturbed evaluations disagree on it is discarded and another
/// coordinate is drawn in its place.
inline GradCheckResult grad_check(const std::function<double(bool)>& loss_fn,
                                  const std::vector<Parameter<double>*>& params,
                                  double epsilon, SeededRng& rng,
                                  std::size_t coords_per_tensor = 200,
                                  const std::function<std::uint64_t()>& branch_fingerprint = {}) {
    require(epsilon > 0, "grad_check: epsilon must be positive");
    for (Parameter<double>* p : params) p->grad.fill(0.0);
    const double base = loss_fn(true);
    if (!std::isfinite(base)) throw NumericError("grad_check: non-finite loss at base point");

    std::vector<Tensor<double>> analytic;
    analytic.reserve(params.size());
    for (Parameter<double>* p : params) analytic.push_back(p->grad);

    GradCheckResult result;
    for (std::size_t pi = 0; pi < params.size(); ++pi) {
        Parameter<double>& p = *params[pi];
        const std::size_t n = p.value.numel();
        std::vector<std::size_t> coords(n);
        for (std::size_t i = 0; i < n; ++i) coords[i] = i;
        // full Fisher-Yates; candidates beyond the quota serve as
        // replacements for kink-straddling coordinates
        for (std::size_t i = n; i > 1; --i)
            std::swap(coords[i - 1], coords[rng.next_below(i)]);
        const std::size_t want = std::min(n, coords_per_tensor);
        std::size_t taken = 0;
        for (std::size_t ci = 0; ci < n && taken < want; ++ci) {
            const std::size_t idx = coords[ci];
            const double saved = p.value.data[idx];
            p.value.data[idx] = saved + epsilon;
            const double up = loss_fn(false);
            const std::uint64_t fp_up = branch_fingerprint ? branch_fingerprint() : 0;
            p.value.data[idx] = saved - epsilon;
            const double down = loss_fn(false);
            const std::uint64_t fp_down = branch_fingerprint ? branch_fingerprint() : 0;
            p.value.data[idx] = saved;
            if (!std::isfinite(up) || !std::isfinite(down))
                throw NumericError(message("grad_check: non-finite loss perturbing ", p.name,
                                           "[", idx, "]"));
            if (fp_up != fp_down) {
                ++result.kinks_skipped;
                continue;
            }
            const double numeric = (up - down) / (2.0 * epsilon);
            const double a = analytic[pi].data[idx];
            const double denom = std::max({std::fabs(a), std::fabs(numeric), 1e-8});
            const double rel = std::fabs(a - numeric) / denom;
            result.max_rel_err = std::max(result.max_rel_err, rel);
            ++result.coords_checked;
            ++taken;
        }
    }
    return result;
}

}  // namespace amc::nn
