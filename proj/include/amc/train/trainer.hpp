// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <cstdint>

#include "amc/core/threading.hpp"
#include "amc/models/executor.hpp"
#include "amc/nn/optimizer.hpp"
#include "amc/synth/dataset.hpp"
#include "amc/train/report.hpp"

namespace amc::train {

struct TrainConfig {
    std::size_t batch_size = 128;
    float lr = 0.001f;
    int max_epochs = 50;
    int patience = 5;           // epochs without validation improvement
    double val_fraction = 0.1;  // carved out of the training set, stratified
    std::uint64_t seed = 1;
    unsigned threads = 0;  // 0 = AMC_THREADS env or machine cores
    float max_norm = 3.0f;
    float beta1 = 0.9f, beta2 = 0.999f, eps = 1e-8f;

    void check() const {
        require(batch_size >= 1, "train: batch_size must be >= 1");
        require(val_fraction > 0.0 && val_fraction < 0.5, "train: val_fraction ", val_fraction,
                " outside (0, 0.5)");
        require(max_epochs >= 1, "train: max_epochs must be >= 1");
        require(patience >= 1, "train: patience must be >= 1");
        require(lr > 0, "train: lr must be positive");
    }
};

namespace detail {

inline double now_seconds() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

template <typename T>
void sample_to_tensor(const synth::LabeledSample& s, Tensor<T>& x) {
    const std::size_t n = s.i.size();
    if (x.shape.size() != 2 || x.dim(1) != n) x = Tensor<T>({2, n});
    for (std::size_t k = 0; k < n; ++k) {
        x(0, k) = static_cast<T>(s.i[k]);
        x(1, k) = static_cast<T>(s.q[k]);
    }
}

/// Shared mini-batch machinery for training and benchmarking: one executor
/// per worker, per-sample gradients accumulated per worker and reduced in
/// worker order, per-sample losses summed in index order.
struct MiniBatchLoop {
    models::Model<float>& model;
    const TrainConfig& cfg;
    unsigned workers;
    std::vector<models::Executor<float>> executors;
    std::vector<Parameter<float>*> params;
    nn::AdamState<float> adam;
    nn::AdamHyper<float> hyper;

    MiniBatchLoop(models::Model<float>& m, const TrainConfig& c)
        : model(m), cfg(c), workers(resolve_thread_count(c.threads)) {
        executors.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) executors.emplace_back(model);
        params = model.param_ptrs();
        adam = nn::AdamState<float>::for_params(params);
        hyper = {cfg.lr, cfg.beta1, cfg.beta2, cfg.eps};
    }

    /// One optimizer step over data[order[begin..end)]. Returns the summed
    /// per-sample loss. Dropout masks are keyed on (seed, epoch, dataset
    /// index), so they do not depend on the worker count.
    double step_batch(const synth::Dataset& data, const std::vector<std::size_t>& order,
                      std::size_t begin, std::size_t end, int epoch) {
        const std::size_t batch_n = end - begin;
        const float inv_batch = 1.0f / static_cast<float>(batch_n);
        std::vector<double> losses(batch_n, 0.0);
        parallel_chunks(workers, batch_n, [&](unsigned w, std::size_t b0, std::size_t b1) {
            models::Executor<float>& ex = executors[w];
            Tensor<float> x, dlogits;
            for (std::size_t k = b0; k < b1; ++k) {
                const std::size_t idx = order[begin + k];
                const synth::LabeledSample& s = data.samples[idx];
                sample_to_tensor(s, x);
                const std::uint64_t mask_seed =
                    seed_hash({cfg.seed, 0xD0u, static_cast<std::uint64_t>(epoch), idx});
                const Tensor<float>& probs = ex.forward(x, true, mask_seed);
                losses[k] = nn::cross_entropy_sample(probs, static_cast<std::size_t>(s.mod),
                                                     inv_batch, dlogits);
                ex.backward(dlogits);
            }
        });
        double loss_sum = 0.0;
        for (double l : losses) loss_sum += l;
        for (unsigned w = 0; w < workers; ++w) {
            auto& g = executors[w].grads();
            for (std::size_t i = 0; i < params.size(); ++i) {
                Tensor<float>& dst = params[i]->grad;
                for (std::size_t j = 0; j < dst.numel(); ++j) dst.data[j] += g[i].data[j];
            }
            executors[w].zero_grads();
        }
        nn::adam_step(params, adam, hyper);
        model.zero_grads();
        return loss_sum;
    }

    /// Mean inference-mode cross entropy over a dataset; deterministic for
    /// any worker count.
    double mean_loss(const synth::Dataset& data) {
        if (data.samples.empty()) return 0.0;
        std::vector<double> losses(data.samples.size(), 0.0);
        parallel_chunks(workers, data.samples.size(),
                        [&](unsigned w, std::size_t b0, std::size_t b1) {
                            models::Executor<float>& ex = executors[w];
                            Tensor<float> x;
                            for (std::size_t k = b0; k < b1; ++k) {
                                const synth::LabeledSample& s = data.samples[k];
                                sample_to_tensor(s, x);
                                const Tensor<float>& probs = ex.forward(x, false);
                                double p = probs(static_cast<std::size_t>(s.mod));
                                p = p < 1e-7 ? 1e-7 : (p > 1.0 - 1e-7 ? 1.0 - 1e-7 : p);
                                losses[k] = -std::log(p);
                            }
                        });
        double sum = 0.0;
        for (double l : losses) sum += l;
        return sum / static_cast<double>(data.samples.size());
    }
};

}  // namespace detail

struct TrainResult {
    models::Model<float> model;  // weights of the best validation epoch
    std::vector<EpochRecord> history;
    int best_epoch = 0;  // 1-based
    double best_val_loss = 0.0;
};

/// Mini-batch training with early stopping. A stratified val_fraction of
/// the input is held out for the stopping signal; the returned weights are
/// those of the minimum-validation-loss epoch.
inline TrainResult train(const models::ModelSpec& spec, const synth::Dataset& trainset,
                         const TrainConfig& cfg) {
    cfg.check();
    require(!trainset.samples.empty(), "train: empty training set");

    SeededRng split_rng(seed_hash({cfg.seed, 0x5Au}));
    auto [train_part, val_part] = synth::split_stratified(trainset, 1.0 - cfg.val_fraction,
                                                          split_rng);
    if (train_part.samples.empty()) std::swap(train_part, val_part);

    SeededRng init_rng(seed_hash({cfg.seed, 0x17u}));
    TrainResult result;
    result.model = models::Model<float>(spec, trainset.frame_len, &init_rng, cfg.max_norm);

    detail::MiniBatchLoop loop(result.model, cfg);

    std::vector<std::size_t> order(train_part.samples.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    std::vector<Tensor<float>> best_values;
    int epochs_since_improve = 0;

    for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        const double t0 = detail::now_seconds();
        SeededRng shuffle_rng(seed_hash({cfg.seed, 0x5Fu, static_cast<std::uint64_t>(epoch)}));
        for (std::size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[shuffle_rng.next_below(i)]);

        double loss_sum = 0.0;
        for (std::size_t begin = 0; begin < order.size(); begin += cfg.batch_size) {
            const std::size_t end = std::min(begin + cfg.batch_size, order.size());
            const double batch_loss = loop.step_batch(train_part, order, begin, end, epoch);
            if (!std::isfinite(batch_loss))
                throw NumericError(message("train: non-finite loss at epoch ", epoch, ", batch ",
                                           begin / cfg.batch_size));
            loss_sum += batch_loss;
        }
        const double train_loss = loss_sum / static_cast<double>(order.size());
        const double val_loss =
            val_part.samples.empty() ? train_loss : loop.mean_loss(val_part);
        if (!std::isfinite(val_loss))
            throw NumericError(message("train: non-finite validation loss at epoch ", epoch));
        const double seconds = detail::now_seconds() - t0;

        result.history.push_back({epoch, static_cast<float>(train_loss),
                                  static_cast<float>(val_loss), static_cast<float>(seconds)});

        if (result.history.size() == 1 || val_loss < result.best_val_loss) {
            result.best_val_loss = val_loss;
            result.best_epoch = epoch;
            best_values.clear();
            for (const auto& p : result.model.params) best_values.push_back(p.value);
            epochs_since_improve = 0;
        } else {
            ++epochs_since_improve;
            if (epochs_since_improve >= cfg.patience) break;
        }
    }

    for (std::size_t i = 0; i < best_values.size(); ++i)
        result.model.params[i].value = best_values[i];
    return result;
}

}  // namespace amc::train
