// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "amc/train/evaluate.hpp"
#include "amc/train/trainer.hpp"

namespace amc::train {

struct AblationRun {
    std::string axis;       // which knob this run belongs to
    std::string value;      // knob setting, printable
    models::ScrnnVariant variant;
    std::vector<EpochRecord> history;
    EvalResult eval;
};

struct AblationGrid {
    std::vector<AblationRun> runs;
    std::uint64_t split_hash = 0;  // train/test assignment fingerprint
};

/// Content fingerprint of a dataset (FNV-1a over the raw frame bytes and
/// labels); identical splits hash identically.
inline std::uint64_t dataset_hash(const synth::Dataset& ds) {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](const void* data, std::size_t n) {
        const unsigned char* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < n; ++i) {
            h ^= p[i];
            h *= 1099511628211ull;
        }
    };
    for (const auto& s : ds.samples) {
        const std::uint8_t mod = static_cast<std::uint8_t>(s.mod);
        mix(&mod, 1);
        mix(&s.snr_db, 1);
        mix(s.i.data(), s.i.size() * sizeof(float));
        mix(s.q.data(), s.q.size() * sizeof(float));
    }
    return h;
}

inline const std::vector<std::string>& ablation_axes() {
    static const std::vector<std::string> axes = {"kernel_size", "conv_depth", "kernel_count",
                                                  "rnn_type", "rnn_depth"};
    return axes;
}

/// One-at-a-time grid around the default variant. Every run shares the
/// same seed and the same train/test split (fingerprinted in split_hash).
inline AblationGrid ablate(const synth::Dataset& data, const TrainConfig& cfg,
                           double train_fraction,
                           const std::vector<std::string>& axes = ablation_axes()) {
    SeededRng split_rng(seed_hash({cfg.seed, 0xAB1au}));
    auto [train_part, test_part] = synth::split_stratified(data, train_fraction, split_rng);

    AblationGrid grid;
    grid.split_hash = dataset_hash(train_part) ^ (dataset_hash(test_part) * 1099511628211ull);

    struct Pending {
        std::string axis, value;
        models::ScrnnVariant variant;
    };
    std::vector<Pending> pending;
    for (const std::string& axis : axes) {
        if (axis == "kernel_size") {
            for (int k : {3, 5, 7}) {
                models::ScrnnVariant v;
                v.kernel_size = k;
                pending.push_back({axis, std::to_string(k), v});
            }
        } else if (axis == "conv_depth") {
            for (int d : {1, 2, 3}) {
                models::ScrnnVariant v;
                v.conv_depth = d;
                pending.push_back({axis, std::to_string(d), v});
            }
        } else if (axis == "kernel_count") {
            for (int n : {64, 128, 256}) {
                models::ScrnnVariant v;
                v.kernel_count = n;
                pending.push_back({axis, std::to_string(n), v});
            }
        } else if (axis == "rnn_type") {
            for (auto kind : {nn::RnnKind::lstm, nn::RnnKind::gru, nn::RnnKind::simple}) {
                models::ScrnnVariant v;
                v.rnn_kind = kind;
                pending.push_back({axis,
                                   kind == nn::RnnKind::lstm  ? "lstm"
                                   : kind == nn::RnnKind::gru ? "gru"
                                                              : "simple",
                                   v});
            }
        } else if (axis == "rnn_depth") {
            for (int r : {1, 2, 3}) {
                models::ScrnnVariant v;
                v.rnn_depth = r;
                pending.push_back({axis, std::to_string(r), v});
            }
        } else {
            throw ContractError(message("ablate: unknown axis '", axis, "'"));
        }
    }

    // identical variants across axes (the default appears in each) are
    // trained once and the results reused
    std::map<std::string, std::size_t> done;
    for (const Pending& job : pending) {
        const std::string id = models::scrnn_variant_id(job.variant);
        AblationRun run;
        run.axis = job.axis;
        run.value = job.value;
        run.variant = job.variant;
        auto it = done.find(id);
        if (it != done.end()) {
            run.history = grid.runs[it->second].history;
            run.eval = grid.runs[it->second].eval;
        } else {
            TrainResult tr = train(models::build_scrnn(job.variant), train_part, cfg);
            run.history = tr.history;
            run.eval = evaluate(tr.model, test_part, cfg.threads);
            done[id] = grid.runs.size();
        }
        grid.runs.push_back(std::move(run));
    }
    return grid;
}

inline std::string ablation_csv(const AblationGrid& grid) {
    std::string out = "axis,value,variant,epochs,overall_accuracy\n";
    for (const auto& run : grid.runs) {
        out += run.axis;
        out += ',';
        out += run.value;
        out += ',';
        out += models::scrnn_variant_id(run.variant);
        out += ',';
        out += std::to_string(run.history.size());
        out += ',';
        out += detail::g9(run.eval.overall.value());
        out += '\n';
    }
    return out;
}

}  // namespace amc::train
