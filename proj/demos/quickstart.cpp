// SPDX-License-Identifier: Apache-2.0
//
// Minimal library walkthrough: synthesize a small two-class dataset,
// train the default SCRNN for a few epochs, and print per-SNR accuracy.

#include <cstdio>

#include "amc/amc.hpp"

int main() {
    using namespace amc;

    synth::GenConfig gen;
    gen.frames_per_cell = 60;
    gen.mods = {synth::ModType::BPSK, synth::ModType::QPSK};
    gen.snrs = {0, 10, 18};
    gen.seed = 42;
    const synth::Dataset dataset = synth::build_dataset(gen);
    std::printf("dataset: %zu samples\n", dataset.samples.size());

    SeededRng split_rng(seed_hash({gen.seed, 0xD5u}));
    auto [train_set, test_set] = synth::split_stratified(dataset, 0.8, split_rng);

    train::TrainConfig cfg;
    cfg.seed = 42;
    cfg.max_epochs = 5;
    cfg.patience = 5;
    const auto result = train::train(models::build_scrnn(), train_set, cfg);
    for (const auto& epoch : result.history)
        std::printf("epoch %d: train %.4f val %.4f (%.1fs)\n", epoch.epoch, epoch.train_loss,
                    epoch.val_loss, epoch.seconds);

    const auto eval = train::evaluate(result.model, test_set);
    std::printf("test accuracy: %.3f\n", eval.overall.value());
    for (const auto& [snr, acc] : eval.by_snr)
        std::printf("  %+3d dB: %.3f (%llu/%llu)\n", snr, acc.value(),
                    static_cast<unsigned long long>(acc.correct),
                    static_cast<unsigned long long>(acc.total));
    return 0;
}
