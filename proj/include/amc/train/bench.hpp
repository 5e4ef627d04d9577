// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>

#include "amc/train/trainer.hpp"

namespace amc::train {

struct BenchResult {
    std::vector<double> epoch_seconds;       // measured epochs, warm-up excluded
    double train_seconds_per_epoch = 0;      // median of the measured epochs
    double prediction_us_per_sample = 0;
    std::size_t prediction_samples = 0;
};

/// Wall-clock benchmark: one unmeasured warm-up epoch, then `measured`
/// timed training epochs (median reported), then inference over the
/// dataset at batch-128 granularity (warm-up batch excluded).
inline BenchResult benchmark_timing(const models::ModelSpec& spec, const synth::Dataset& data,
                                    const TrainConfig& cfg, int measured = 5) {
    require(measured >= 1, "bench: need at least one measured epoch");
    require(!data.samples.empty(), "bench: empty dataset");

    SeededRng init_rng(seed_hash({cfg.seed, 0x17u}));
    models::Model<float> model(spec, data.frame_len, &init_rng, cfg.max_norm);
    detail::MiniBatchLoop loop(model, cfg);

    std::vector<std::size_t> order(data.samples.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    BenchResult result;
    for (int epoch = 0; epoch <= measured; ++epoch) {
        const double t0 = detail::now_seconds();
        for (std::size_t begin = 0; begin < order.size(); begin += cfg.batch_size) {
            const std::size_t end = std::min(begin + cfg.batch_size, order.size());
            loop.step_batch(data, order, begin, end, epoch);
        }
        if (epoch > 0) result.epoch_seconds.push_back(detail::now_seconds() - t0);
    }
    std::vector<double> sorted = result.epoch_seconds;
    std::sort(sorted.begin(), sorted.end());
    result.train_seconds_per_epoch = sorted[sorted.size() / 2];

    // prediction timing at batch 128: one warm-up batch, then the full set
    const unsigned workers = resolve_thread_count(cfg.threads);
    std::vector<models::Executor<float>> executors;
    for (unsigned w = 0; w < workers; ++w) executors.emplace_back(model);
    const std::size_t warm = std::min<std::size_t>(128, data.samples.size());
    Tensor<float> x;
    for (std::size_t k = 0; k < warm; ++k) {
        detail::sample_to_tensor(data.samples[k], x);
        executors[0].forward(x, false);
    }
    const double t0 = detail::now_seconds();
    for (std::size_t begin = 0; begin < data.samples.size(); begin += 128) {
        const std::size_t end = std::min(begin + 128, data.samples.size());
        parallel_chunks(workers, end - begin, [&](unsigned w, std::size_t b0, std::size_t b1) {
            Tensor<float> xt;
            for (std::size_t k = b0; k < b1; ++k) {
                detail::sample_to_tensor(data.samples[begin + k], xt);
                executors[w].forward(xt, false);
            }
        });
    }
    const double elapsed = detail::now_seconds() - t0;
    result.prediction_samples = data.samples.size();
    result.prediction_us_per_sample = 1e6 * elapsed / static_cast<double>(data.samples.size());
    return result;
}

}  // namespace amc::train
