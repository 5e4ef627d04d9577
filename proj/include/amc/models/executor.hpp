// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "amc/models/model.hpp"
#include "amc/nn/activations.hpp"
#include "amc/nn/conv.hpp"
#include "amc/nn/dense.hpp"
#include "amc/nn/dropout.hpp"
#include "amc/nn/loss.hpp"
#include "amc/nn/pool.hpp"
#include "amc/nn/rnn.hpp"
#include "amc/synth/ampphase.hpp"

namespace amc::models {

/// Runs a model forward and backward on one sample at a time. The executor
/// owns its layer caches and gradient accumulators, so several executors
/// can share one (const) model across threads; gradients are reduced by
/// the caller in a fixed order.
///
/// The trailing softmax is fused with cross entropy: backward() expects
/// the gradient taken wrt the pre-softmax logits and passes it straight
/// into the final dense layer.
template <typename T>
class Executor {
public:
    explicit Executor(const Model<T>& model)
        : model_(&model), shapes_(propagate_shapes(model.spec, model.input_len)) {
        caches_.resize(model.spec.layers.size());
        grads_.reserve(model.params.size());
        for (const auto& p : model.params) grads_.push_back(Tensor<T>(p.value.shape));
    }

    const Model<T>& model() const { return *model_; }

    std::vector<Tensor<T>>& grads() { return grads_; }

    void zero_grads() {
        for (auto& g : grads_) g.fill(T(0));
    }

    /// When enabled, forward() digests every branch decision (relu zero
    /// patterns, pooling argmax choices) into a fingerprint so gradient
    /// checking can recognize kink-straddling perturbations.
    void set_branch_tracking(bool on) { track_branches_ = on; }
    std::uint64_t branch_fingerprint() const { return fingerprint_; }

    /// Forward pass on one [2, input_len] sample; returns class
    /// probabilities. `dropout_seed` fixes every dropout mask of this pass,
    /// so identical seeds replay identical masks.
    const Tensor<T>& forward(const Tensor<T>& x, bool training, std::uint64_t dropout_seed = 0) {
        require(x.rank() == 2 && x.dim(0) == 2 && x.dim(1) == model_->input_len,
                "model_forward: input shape ", shape_string(x), " != [2,", model_->input_len, "]");
        Tensor<T> cur = x;
        if (model_->spec.input_format == InputFormat::amplitude_phase) {
            Tensor<T> ap({2, model_->input_len});
            synth::amplitude_phase_rows(x.data.data(), x.data.data() + model_->input_len,
                                        model_->input_len, ap.data.data(),
                                        ap.data.data() + model_->input_len);
            cur = std::move(ap);
        }
        training_ = training;
        fingerprint_ = 1469598103934665603ull;

        const auto& layers = model_->spec.layers;
        for (std::size_t li = 0; li < layers.size(); ++li) {
            const LayerSpec& l = layers[li];
            Cache& c = caches_[li];
            switch (l.kind) {
                case LayerKind::conv1d: {
                    const auto& w = param(li, 0).value;
                    const auto& b = param(li, 1).value;
                    c.input = std::move(cur);
                    Tensor<T> y = nn::conv1d_forward(c.input, w, b);
                    if (l.act == ActKind::relu) {
                        y = nn::relu(y);
                        if (track_branches_) digest_zeros(y);
                    }
                    c.output = std::move(y);
                    cur = c.output;
                    break;
                }
                case LayerKind::maxpool1d: {
                    c.in_shape = cur.shape;
                    auto out = nn::maxpool1d_forward(cur, l.pool_size, l.pool_stride);
                    c.argmax = std::move(out.argmax);
                    if (track_branches_)
                        for (std::uint32_t am : c.argmax) digest(am + 1);
                    cur = std::move(out.y);
                    break;
                }
                case LayerKind::rnn: {
                    c.rnn_from_grid = li_input_is_grid(li);
                    if (c.rnn_from_grid) {
                        // [channels, time] -> time steps of channel features
                        Tensor<T> seq({cur.dim(1), cur.dim(0)});
                        for (std::size_t ch = 0; ch < cur.dim(0); ++ch)
                            for (std::size_t t = 0; t < cur.dim(1); ++t) seq(t, ch) = cur(ch, t);
                        c.input = std::move(seq);
                    } else {
                        c.input = std::move(cur);
                    }
                    auto out = nn::rnn_sequence_forward(cell(li), c.input, l.return_sequences);
                    c.rnn = std::move(out.cache);
                    if (track_branches_ && l.act == ActKind::relu) {
                        digest_zeros(c.rnn.gates);
                        if (l.rnn_kind == nn::RnnKind::lstm) digest_zeros(c.rnn.act_c);
                        if (l.rnn_kind == nn::RnnKind::simple) digest_zeros(c.rnn.h);
                    }
                    cur = std::move(out.output);
                    break;
                }
                case LayerKind::dense: {
                    const auto& w = param(li, 0).value;
                    const auto& b = param(li, 1).value;
                    c.input = std::move(cur);
                    Tensor<T> y = nn::dense_forward(c.input, w, b);
                    if (l.act == ActKind::relu) {
                        y = nn::relu(y);
                        if (track_branches_) digest_zeros(y);
                    } else if (l.act == ActKind::softmax) {
                        y = nn::softmax(y);
                    }
                    c.output = std::move(y);
                    cur = c.output;
                    break;
                }
                case LayerKind::dropout: {
                    if (training_ && l.rate > 0.0) {
                        SeededRng rng(seed_hash({dropout_seed, li}));
                        auto out = nn::dropout(cur, l.rate, rng, true);
                        c.mask = std::move(out.mask);
                        cur = std::move(out.y);
                    } else {
                        c.mask = Tensor<T>();  // identity
                    }
                    break;
                }
                case LayerKind::flatten: {
                    c.in_shape = cur.shape;
                    cur.shape = {cur.numel()};
                    break;
                }
                case LayerKind::activation: {
                    if (l.act == ActKind::relu) {
                        c.output = nn::relu(cur);
                        if (track_branches_) digest_zeros(c.output);
                        cur = c.output;
                    } else if (l.act == ActKind::softmax) {
                        c.output = nn::softmax(cur);
                        cur = c.output;
                    } else {
                        c.output = cur;
                    }
                    break;
                }
            }
        }
        output_ = std::move(cur);
        return output_;
    }

    const Tensor<T>& output() const { return output_; }

    /// Backward pass from the fused softmax+CE gradient (wrt logits).
    /// Accumulates parameter gradients; call zero_grads() to reset.
    void backward(const Tensor<T>& dlogits) {
        Tensor<T> g = dlogits;
        const auto& layers = model_->spec.layers;
        for (std::size_t li = layers.size(); li-- > 0;) {
            const LayerSpec& l = layers[li];
            Cache& c = caches_[li];
            switch (l.kind) {
                case LayerKind::conv1d: {
                    if (l.act == ActKind::relu) g = nn::relu_backward(c.output, g);
                    auto dg = nn::conv1d_backward(c.input, param(li, 0).value, g);
                    accumulate(li, 0, dg.gw);
                    accumulate(li, 1, dg.gb);
                    g = std::move(dg.gx);
                    break;
                }
                case LayerKind::maxpool1d:
                    g = nn::maxpool1d_backward(g, c.argmax, c.in_shape[0], c.in_shape[1]);
                    break;
                case LayerKind::rnn: {
                    auto dg = nn::rnn_sequence_backward(cell(li), c.input, c.rnn, g,
                                                        l.return_sequences);
                    accumulate(li, 0, dg.g_wx);
                    accumulate(li, 1, dg.g_wh);
                    accumulate(li, 2, dg.g_b);
                    if (c.rnn_from_grid) {
                        Tensor<T> grid({dg.gx.dim(1), dg.gx.dim(0)});
                        for (std::size_t t = 0; t < dg.gx.dim(0); ++t)
                            for (std::size_t ch = 0; ch < dg.gx.dim(1); ++ch)
                                grid(ch, t) = dg.gx(t, ch);
                        g = std::move(grid);
                    } else {
                        g = std::move(dg.gx);
                    }
                    break;
                }
                case LayerKind::dense: {
                    if (l.act == ActKind::relu) g = nn::relu_backward(c.output, g);
                    // softmax head: g is already wrt the pre-softmax logits
                    auto dg = nn::dense_backward(c.input, param(li, 0).value, g);
                    accumulate(li, 0, dg.gw);
                    accumulate(li, 1, dg.gb);
                    g = std::move(dg.gx);
                    break;
                }
                case LayerKind::dropout:
                    if (c.mask.numel() > 0) g = nn::dropout_backward(g, c.mask);
                    break;
                case LayerKind::flatten:
                    g.shape = c.in_shape;
                    break;
                case LayerKind::activation:
                    if (l.act == ActKind::relu) g = nn::relu_backward(c.output, g);
                    // softmax: fused with the loss, pass through
                    break;
            }
        }
    }

private:
    struct Cache {
        Tensor<T> input;
        Tensor<T> output;
        std::vector<std::uint32_t> argmax;
        std::vector<std::size_t> in_shape;
        nn::RnnSequenceCache<T> rnn;
        Tensor<T> mask;
        bool rnn_from_grid = false;
    };

    const Parameter<T>& param(std::size_t layer, std::size_t offset) const {
        const std::size_t base = model_->layer_param_start[layer];
        return model_->params[base + offset];
    }

    void accumulate(std::size_t layer, std::size_t offset, const Tensor<T>& g) {
        Tensor<T>& dst = grads_[model_->layer_param_start[layer] + offset];
        for (std::size_t i = 0; i < dst.numel(); ++i) dst.data[i] += g.data[i];
    }

    bool li_input_is_grid(std::size_t li) const {
        if (li == 0) return true;
        return shapes_[li - 1].domain == LayerShape::Domain::grid;
    }

    nn::RnnCellParams<T> cell(std::size_t li) const {
        const LayerSpec& l = model_->spec.layers[li];
        nn::RnnCellParams<T> p;
        p.kind = l.rnn_kind;
        p.hidden = l.units;
        p.state_activation = l.act == ActKind::relu ? nn::StateAct::relu : nn::StateAct::tanh;
        p.input_weights = param(li, 0).value;
        p.recurrent_weights = param(li, 1).value;
        p.biases = param(li, 2).value;
        return p;
    }

    void digest(std::uint64_t v) {
        fingerprint_ = (fingerprint_ ^ v) * 1099511628211ull;
    }

    void digest_zeros(const Tensor<T>& t) {
        for (std::size_t i = 0; i < t.numel(); ++i) digest(t.data[i] == T(0) ? 2 : 3);
    }

    const Model<T>* model_;
    std::vector<LayerShape> shapes_;
    std::vector<Cache> caches_;
    std::vector<Tensor<T>> grads_;
    Tensor<T> output_;
    bool training_ = false;
    bool track_branches_ = false;
    std::uint64_t fingerprint_ = 0;
};

/// Spec-level batch forward: [N, 2, L] in, [N, classes] out. Per-sample
/// dropout seeds are drawn from `rng` in order, so the result depends only
/// on (weights, batch, seed).
template <typename T>
Tensor<T> model_forward(const Model<T>& model, const Tensor<T>& batch, bool training,
                        SeededRng& rng) {
    require(batch.rank() == 3 && batch.dim(1) == 2 && batch.dim(2) == model.input_len,
            "model_forward: batch shape ", shape_string(batch), " != [N,2,", model.input_len, "]");
    const std::size_t n = batch.dim(0);
    Executor<T> ex(model);
    Tensor<T> out({n, model.spec.classes});
    Tensor<T> x({2, model.input_len});
    for (std::size_t s = 0; s < n; ++s) {
        for (std::size_t i = 0; i < x.numel(); ++i)
            x.data[i] = batch.data[s * x.numel() + i];
        const std::uint64_t seed = rng.next_u64();
        const Tensor<T>& probs = ex.forward(x, training, seed);
        for (std::size_t c = 0; c < model.spec.classes; ++c) out(s, c) = probs(c);
    }
    return out;
}

}  // namespace amc::models
