// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "amc/core/threading.hpp"
#include "amc/models/executor.hpp"
#include "amc/synth/dataset.hpp"
#include "amc/train/report.hpp"
#include "amc/train/trainer.hpp"

namespace amc::train {

struct EvalResult {
    Accuracy overall;
    std::map<int, Accuracy> by_snr;
    std::map<int, ConfusionMatrix> confusion;
    std::vector<std::uint8_t> predictions;  // aligned with the test set order
};

/// Argmax class of a probability row; ties break to the lowest index.
template <typename T>
std::size_t argmax_class(const Tensor<T>& probs) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < probs.numel(); ++c)
        if (probs(c) > probs(best)) best = c;
    return best;
}

/// Confusion counts partitioned by SNR; summing the partition reproduces
/// the pooled matrix.
inline std::map<int, ConfusionMatrix> confusion_by_snr(const std::vector<std::uint8_t>& predictions,
                                                       const std::vector<std::uint8_t>& labels,
                                                       const std::vector<int>& snrs) {
    require(predictions.size() == labels.size() && labels.size() == snrs.size(),
            "confusion_by_snr: length mismatch (", predictions.size(), ", ", labels.size(), ", ",
            snrs.size(), ")");
    std::map<int, ConfusionMatrix> out;
    for (std::size_t k = 0; k < predictions.size(); ++k)
        out[snrs[k]].add(labels[k], predictions[k]);
    return out;
}

/// Deterministic inference-mode evaluation: overall and per-SNR accuracy
/// plus per-SNR confusion matrices.
inline EvalResult evaluate(const models::Model<float>& model, const synth::Dataset& testset,
                           unsigned threads = 0) {
    require(!testset.samples.empty(), "evaluate: empty test set");
    const unsigned workers = resolve_thread_count(threads);
    std::vector<models::Executor<float>> executors;
    executors.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) executors.emplace_back(model);

    EvalResult result;
    result.predictions.resize(testset.samples.size());
    parallel_chunks(workers, testset.samples.size(),
                    [&](unsigned w, std::size_t b0, std::size_t b1) {
                        Tensor<float> x;
                        for (std::size_t k = b0; k < b1; ++k) {
                            detail::sample_to_tensor(testset.samples[k], x);
                            const Tensor<float>& probs = executors[w].forward(x, false);
                            result.predictions[k] = static_cast<std::uint8_t>(argmax_class(probs));
                        }
                    });

    std::vector<std::uint8_t> labels(testset.samples.size());
    std::vector<int> snrs(testset.samples.size());
    for (std::size_t k = 0; k < testset.samples.size(); ++k) {
        labels[k] = static_cast<std::uint8_t>(testset.samples[k].mod);
        snrs[k] = testset.samples[k].snr_db;
        Accuracy& acc = result.by_snr[snrs[k]];
        acc.total += 1;
        result.overall.total += 1;
        if (result.predictions[k] == labels[k]) {
            acc.correct += 1;
            result.overall.correct += 1;
        }
    }
    result.confusion = confusion_by_snr(result.predictions, labels, snrs);
    return result;
}

}  // namespace amc::train
