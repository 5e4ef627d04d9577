// SPDX-License-Identifier: Apache-2.0
//
// amc: workbench driver for synthetic modulation datasets and the
// CNN / LSTM / SCRNN classifier families.
//
// Commands: gen, train, eval, ablate, gradcheck, bench.
// Exit codes: 0 ok, 1 usage error, 2 data/contract error, 3 numeric error.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <random>

#include "amc/amc.hpp"
#include "amc/cli/config.hpp"

namespace {

using namespace amc;

constexpr std::uint64_t kSplitTag = 0xD5;  // train/test split stream id

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& seed) {
    if (seed) return *seed;
    std::random_device rd;
    const std::uint64_t generated =
        (static_cast<std::uint64_t>(rd()) << 32) ^ rd() ^
        static_cast<std::uint64_t>(
            std::chrono::steady_clock::now().time_since_epoch().count());
    std::fprintf(stderr, "amc: no seed given, recording generated seed %llu\n",
                 static_cast<unsigned long long>(generated));
    return generated;
}

struct CommonFlags {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;

    void attach(CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON config file");
        cmd->add_option("--seed", seed, "seed override (mandatory in persisted configs)");
        cmd->add_option("--threads", threads, "worker cap override (default: AMC_THREADS or cores)");
    }

    cli::RunConfig load() const {
        cli::RunConfig cfg;
        if (!config_path.empty()) cfg = cli::load_run_config(config_path);
        if (seed) cfg.seed = *seed;
        if (threads) cfg.train.threads = *threads;
        return cfg;
    }
};

std::pair<synth::Dataset, synth::Dataset> split_for_run(const synth::Dataset& ds,
                                                        const cli::RunConfig& cfg) {
    SeededRng rng(seed_hash({*cfg.seed, kSplitTag}));
    return synth::split_stratified(ds, cfg.split_fraction, rng);
}

train::RunReport make_report(const cli::RunConfig& cfg, const train::TrainResult& tr,
                             const train::EvalResult& ev, double predict_us) {
    train::RunReport report;
    report.model_id = cli::arch_id(cfg);
    report.history = tr.history;
    report.overall = ev.overall;
    report.accuracy_by_snr = ev.by_snr;
    report.confusion_by_snr = ev.confusion;
    std::vector<float> secs;
    double total = 0;
    for (const auto& r : tr.history) {
        secs.push_back(r.seconds);
        total += r.seconds;
    }
    std::sort(secs.begin(), secs.end());
    report.timing.train_seconds_per_epoch = secs.empty() ? 0 : secs[secs.size() / 2];
    report.timing.total_train_seconds = total;
    report.timing.prediction_us_per_sample = predict_us;
    report.config_json = cli::effective_config_json(cfg);
    return report;
}

int cmd_gen(const CommonFlags& common, const std::string& out_path,
            const std::optional<int>& frames) {
    cli::RunConfig cfg = common.load();
    cfg.seed = resolve_seed(cfg.seed);
    if (frames) cfg.gen.frames_per_cell = *frames;
    cfg.gen.seed = *cfg.seed;
    std::fprintf(stderr, "amc gen: %zu mods x %zu snrs x %d frames (seed %llu)\n",
                 cfg.gen.mods.size(), cfg.gen.snrs.size(), cfg.gen.frames_per_cell,
                 static_cast<unsigned long long>(*cfg.seed));
    const synth::Dataset ds = synth::build_dataset(cfg.gen, cfg.train.threads);
    synth::write_dataset(ds, out_path);
    std::fprintf(stderr, "amc gen: wrote %zu samples to %s\n", ds.samples.size(),
                 out_path.c_str());
    std::fprintf(stderr, "amc gen: effective config:\n%s",
                 cli::effective_config_json(cfg).c_str());
    return 0;
}

int cmd_train(const CommonFlags& common, std::string dataset_path, const std::string& out_dir,
              const std::optional<std::string>& arch, const std::optional<float>& lr,
              const std::optional<int>& epochs, const std::optional<std::size_t>& batch,
              const std::optional<int>& patience, const std::optional<double>& split) {
    cli::RunConfig cfg = common.load();
    if (!dataset_path.empty()) cfg.dataset_path = dataset_path;
    require(!cfg.dataset_path.empty(), "train: no dataset given (flag --dataset or config)");
    if (arch) cfg.arch = *arch;
    if (lr) cfg.train.lr = *lr;
    if (epochs) cfg.train.max_epochs = *epochs;
    if (batch) cfg.train.batch_size = *batch;
    if (patience) cfg.train.patience = *patience;
    if (split) cfg.split_fraction = *split;
    cfg.seed = resolve_seed(cfg.seed);
    cfg.train.seed = *cfg.seed;

    const synth::Dataset ds = synth::read_dataset(cfg.dataset_path);
    auto [train_part, test_part] = split_for_run(ds, cfg);
    std::fprintf(stderr, "amc train: %s on %zu train / %zu test samples\n",
                 cli::arch_id(cfg).c_str(), train_part.samples.size(), test_part.samples.size());

    const models::ModelSpec spec = cli::build_arch(cfg);
    train::TrainResult tr = train::train(spec, train_part, cfg.train);
    for (const auto& r : tr.history)
        std::fprintf(stderr, "amc train: epoch %d train %.4f val %.4f (%.1fs)\n", r.epoch,
                     r.train_loss, r.val_loss, r.seconds);

    const double t0 = train::detail::now_seconds();
    train::EvalResult ev = train::evaluate(tr.model, test_part, cfg.train.threads);
    const double predict_us = 1e6 * (train::detail::now_seconds() - t0) /
                              static_cast<double>(test_part.samples.size());

    std::filesystem::create_directories(out_dir);
    models::save_weights(tr.model, out_dir + "/weights.amcw");
    train::export_report(make_report(cfg, tr, ev, predict_us), out_dir);
    std::fprintf(stderr, "amc train: test accuracy %.4f, reports in %s\n", ev.overall.value(),
                 out_dir.c_str());
    return 0;
}

int cmd_eval(const std::string& run_dir, std::string dataset_path, std::string out_dir,
             const std::optional<unsigned>& threads) {
    cli::RunConfig cfg = cli::parse_run_config(binio::read_file(run_dir + "/config.json"));
    require(cfg.seed.has_value(), "eval: config.json has no seed");
    if (!dataset_path.empty()) cfg.dataset_path = dataset_path;
    require(!cfg.dataset_path.empty(), "eval: no dataset recorded or given");
    if (threads) cfg.train.threads = *threads;
    if (out_dir.empty()) out_dir = run_dir;

    models::Model<float> model = models::load_weights(run_dir + "/weights.amcw");
    const synth::Dataset ds = synth::read_dataset(cfg.dataset_path);
    auto [train_part, test_part] = split_for_run(ds, cfg);
    (void)train_part;
    train::EvalResult ev = train::evaluate(model, test_part, cfg.train.threads);

    train::RunReport report;
    report.model_id = cli::arch_id(cfg);
    report.overall = ev.overall;
    report.accuracy_by_snr = ev.by_snr;
    report.confusion_by_snr = ev.confusion;
    std::filesystem::create_directories(out_dir);
    train::detail::write_text(out_dir + "/accuracy_by_snr.csv", train::accuracy_csv(report));
    for (const auto& [snr, cm] : report.confusion_by_snr)
        train::detail::write_text(out_dir + "/confusion_" + std::to_string(snr) + ".csv",
                                  train::confusion_csv(cm));
    std::fprintf(stderr, "amc eval: accuracy %.4f over %llu samples, reports in %s\n",
                 ev.overall.value(), static_cast<unsigned long long>(ev.overall.total),
                 out_dir.c_str());
    return 0;
}

int cmd_ablate(const CommonFlags& common, std::string dataset_path, const std::string& out_dir,
               std::string axes_csv, const std::optional<int>& epochs) {
    cli::RunConfig cfg = common.load();
    if (!dataset_path.empty()) cfg.dataset_path = dataset_path;
    require(!cfg.dataset_path.empty(), "ablate: no dataset given");
    if (epochs) cfg.train.max_epochs = *epochs;
    cfg.seed = resolve_seed(cfg.seed);
    cfg.train.seed = *cfg.seed;

    std::vector<std::string> axes;
    if (axes_csv.empty()) {
        axes = train::ablation_axes();
    } else {
        std::size_t pos = 0;
        while (pos <= axes_csv.size()) {
            std::size_t comma = axes_csv.find(',', pos);
            if (comma == std::string::npos) comma = axes_csv.size();
            if (comma > pos) axes.push_back(axes_csv.substr(pos, comma - pos));
            pos = comma + 1;
        }
    }

    const synth::Dataset ds = synth::read_dataset(cfg.dataset_path);
    std::fprintf(stderr, "amc ablate: %zu axes on %zu samples\n", axes.size(),
                 ds.samples.size());
    train::AblationGrid grid = train::ablate(ds, cfg.train, cfg.split_fraction, axes);

    std::filesystem::create_directories(out_dir);
    train::detail::write_text(out_dir + "/ablation.csv", train::ablation_csv(grid));
    train::detail::write_text(out_dir + "/config.json", cli::effective_config_json(cfg));
    for (const auto& run : grid.runs) {
        const std::string run_dir =
            out_dir + "/" + run.axis + "_" + run.value;
        std::filesystem::create_directories(run_dir);
        train::detail::write_text(run_dir + "/history.csv", train::history_csv(run.history));
        train::RunReport rep;
        rep.overall = run.eval.overall;
        rep.accuracy_by_snr = run.eval.by_snr;
        train::detail::write_text(run_dir + "/accuracy_by_snr.csv", train::accuracy_csv(rep));
    }
    std::fprintf(stderr, "amc ablate: split hash %016llx, results in %s\n",
                 static_cast<unsigned long long>(grid.split_hash), out_dir.c_str());
    return 0;
}

int cmd_gradcheck(const CommonFlags& common, const std::optional<std::string>& arch, bool toy) {
    cli::RunConfig cfg = common.load();
    if (arch) cfg.arch = *arch;
    cfg.seed = resolve_seed(cfg.seed);
    const std::size_t input_len = toy ? 12 : 128;
    const models::ModelSpec spec = cli::build_arch(cfg);

    SeededRng init_rng(seed_hash({*cfg.seed, 0x17u}));
    models::Model<double> model(spec, input_len, &init_rng);
    models::Executor<double> ex(model);
    SeededRng data_rng(seed_hash({*cfg.seed, 0xDA7Au}));
    Tensor<double> x({2, input_len});
    for (auto& v : x.data) v = data_rng.normal() * 0.5;
    const std::size_t label = 3;
    const std::uint64_t mask_seed = seed_hash({*cfg.seed, 0xD0u});

    auto params = model.param_ptrs();
    auto loss_fn = [&](bool with_backward) {
        const Tensor<double>& probs = ex.forward(x, true, mask_seed);
        Tensor<double> dlogits;
        // scaled objective keeps finite-difference noise below the
        // relative-error floor (the check itself is unchanged)
        const double scale = 1.0 / 256.0;
        const double loss = nn::cross_entropy_sample(probs, label, scale, dlogits) * scale;
        if (with_backward) {
            ex.zero_grads();
            ex.backward(dlogits);
            for (std::size_t i = 0; i < params.size(); ++i) params[i]->grad = ex.grads()[i];
        }
        return loss;
    };
    ex.set_branch_tracking(true);
    SeededRng pick_rng(seed_hash({*cfg.seed, 0x6Cu}));
    const auto result = nn::grad_check(loss_fn, params, 1e-5, pick_rng, 200,
                                       [&ex] { return ex.branch_fingerprint(); });
    std::printf("gradcheck %s (input length %zu): max relative error %.3e over %zu coordinates"
                " (%zu kink-straddling skipped)\n",
                cli::arch_id(cfg).c_str(), input_len, result.max_rel_err, result.coords_checked,
                result.kinks_skipped);
    if (result.max_rel_err < 1e-4) return 0;
    std::fprintf(stderr, "amc gradcheck: FAILED threshold 1e-4\n");
    return 3;
}

int cmd_bench(const CommonFlags& common, std::string dataset_path, const std::string& out_dir,
              const std::optional<std::string>& arch, int measured) {
    cli::RunConfig cfg = common.load();
    if (!dataset_path.empty()) cfg.dataset_path = dataset_path;
    require(!cfg.dataset_path.empty(), "bench: no dataset given");
    if (arch) cfg.arch = *arch;
    cfg.seed = resolve_seed(cfg.seed);
    cfg.train.seed = *cfg.seed;

    const synth::Dataset ds = synth::read_dataset(cfg.dataset_path);
    const models::ModelSpec spec = cli::build_arch(cfg);
    std::fprintf(stderr, "amc bench: %s, %zu samples, %d measured epochs\n",
                 cli::arch_id(cfg).c_str(), ds.samples.size(), measured);
    train::BenchResult bench = train::benchmark_timing(spec, ds, cfg.train, measured);

    train::Timing timing;
    timing.train_seconds_per_epoch = bench.train_seconds_per_epoch;
    for (double s : bench.epoch_seconds) timing.total_train_seconds += s;
    timing.prediction_us_per_sample = bench.prediction_us_per_sample;
    std::filesystem::create_directories(out_dir);
    train::detail::write_text(out_dir + "/timing.json", train::timing_json(timing));
    train::detail::write_text(out_dir + "/config.json", cli::effective_config_json(cfg));
    std::fprintf(stderr, "amc bench: %.2f s/epoch, %.1f us/sample, results in %s\n",
                 timing.train_seconds_per_epoch, timing.prediction_us_per_sample,
                 out_dir.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"synthetic modulation classification workbench"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "synthesize a labeled IQ dataset");
    CommonFlags gen_common;
    gen_common.attach(gen);
    std::string gen_out;
    std::optional<int> gen_frames;
    gen->add_option("--out", gen_out, "output dataset file (.amcd)")->required();
    gen->add_option("--frames", gen_frames, "frames per (mod, snr) cell");

    // train
    auto* tr = app.add_subcommand("train", "train a model and export reports");
    CommonFlags tr_common;
    tr_common.attach(tr);
    std::string tr_dataset, tr_out;
    std::optional<std::string> tr_arch;
    std::optional<float> tr_lr;
    std::optional<int> tr_epochs, tr_patience;
    std::optional<std::size_t> tr_batch;
    std::optional<double> tr_split;
    tr->add_option("--dataset", tr_dataset, "dataset file (.amcd)");
    tr->add_option("--out", tr_out, "run directory")->required();
    tr->add_option("--arch", tr_arch, "scrnn | cnn | lstm");
    tr->add_option("--lr", tr_lr, "learning rate");
    tr->add_option("--epochs", tr_epochs, "max epochs");
    tr->add_option("--batch", tr_batch, "batch size");
    tr->add_option("--patience", tr_patience, "early-stop patience");
    tr->add_option("--split", tr_split, "train fraction of the dataset");

    // eval
    auto* ev = app.add_subcommand("eval", "re-evaluate a run directory");
    std::string ev_run, ev_dataset, ev_out;
    std::optional<unsigned> ev_threads;
    ev->add_option("--run", ev_run, "run directory with config.json and weights.amcw")->required();
    ev->add_option("--dataset", ev_dataset, "dataset override");
    ev->add_option("--out", ev_out, "output directory (default: the run directory)");
    ev->add_option("--threads", ev_threads, "worker cap override");

    // ablate
    auto* ab = app.add_subcommand("ablate", "one-at-a-time structure grid");
    CommonFlags ab_common;
    ab_common.attach(ab);
    std::string ab_dataset, ab_out, ab_axes;
    std::optional<int> ab_epochs;
    ab->add_option("--dataset", ab_dataset, "dataset file (.amcd)");
    ab->add_option("--out", ab_out, "output directory")->required();
    ab->add_option("--axes", ab_axes,
                   "comma list of kernel_size,conv_depth,kernel_count,rnn_type,rnn_depth");
    ab->add_option("--epochs", ab_epochs, "max epochs per run");

    // gradcheck
    auto* gc = app.add_subcommand("gradcheck", "finite-difference gradient verification");
    CommonFlags gc_common;
    gc_common.attach(gc);
    std::optional<std::string> gc_arch;
    bool gc_toy = false;
    gc->add_option("--arch", gc_arch, "scrnn | cnn | lstm");
    gc->add_flag("--toy", gc_toy, "toy input length 12 (64-bit mode either way)");

    // bench
    auto* be = app.add_subcommand("bench", "wall-clock timing");
    CommonFlags be_common;
    be_common.attach(be);
    std::string be_dataset, be_out;
    std::optional<std::string> be_arch;
    int be_measured = 5;
    be->add_option("--dataset", be_dataset, "dataset file (.amcd)");
    be->add_option("--out", be_out, "output directory")->required();
    be->add_option("--arch", be_arch, "scrnn | cnn | lstm");
    be->add_option("--epochs", be_measured, "measured epochs (median reported)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (gen->parsed()) return cmd_gen(gen_common, gen_out, gen_frames);
        if (tr->parsed())
            return cmd_train(tr_common, tr_dataset, tr_out, tr_arch, tr_lr, tr_epochs, tr_batch,
                             tr_patience, tr_split);
        if (ev->parsed()) return cmd_eval(ev_run, ev_dataset, ev_out, ev_threads);
        if (ab->parsed()) return cmd_ablate(ab_common, ab_dataset, ab_out, ab_axes, ab_epochs);
        if (gc->parsed()) return cmd_gradcheck(gc_common, gc_arch, gc_toy);
        if (be->parsed()) return cmd_bench(be_common, be_dataset, be_out, be_arch, be_measured);
    } catch (const amc::NumericError& e) {
        std::fprintf(stderr, "amc: numeric error: %s\n", e.what());
        return 3;
    } catch (const amc::Error& e) {
        std::fprintf(stderr, "amc: error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "amc: error: %s\n", e.what());
        return 2;
    }
    return 1;
}
