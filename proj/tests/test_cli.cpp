// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sys/wait.h>
#include <unistd.h>

#include "amc/cli/config.hpp"
#include "amc/core/binio.hpp"

using namespace amc;
using Catch::Approx;
namespace fs = std::filesystem;

namespace {

const std::string kCli = AMC_CLI_PATH;

struct Sandbox {
    fs::path dir;
    Sandbox() {
        dir = fs::temp_directory_path() /
              ("amc_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter()++));
        fs::create_directories(dir);
    }
    ~Sandbox() { fs::remove_all(dir); }
    static int& counter() {
        static int c = 0;
        return c;
    }
    std::string path(const std::string& name) const { return (dir / name).string(); }
};

int run(const std::string& args, const std::string& log_name = "") {
    std::string cmd = "\"" + kCli + "\" " + args;
    cmd += log_name.empty() ? " 2>/dev/null" : " > " + log_name + ".out 2> " + log_name + ".err";
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    return WIFEXITED(status) ? WEXITSTATUS(status) : -2;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

const char* kTinyGenConfig = R"({
  "gen": {
    "frames_per_cell": 3,
    "mods": ["BPSK", "QPSK"],
    "snrs": [0, 10]
  }
})";

}  // namespace

TEST_CASE("config: empty document yields the documented defaults") {
    const auto cfg = cli::parse_run_config("{}");
    CHECK(cfg.train.batch_size == 128);
    CHECK(cfg.train.lr == Approx(0.001f));
    CHECK(cfg.gen.samples_per_symbol == 8);
    CHECK(cfg.gen.frame_len == 128);
    CHECK(cfg.gen.rrc_rolloff == Approx(0.35));
    CHECK(cfg.split_fraction == Approx(0.9));
    CHECK(cfg.arch == "scrnn");
    CHECK_FALSE(cfg.seed.has_value());
    CHECK(cfg.gen.mods.size() == 11);
    CHECK(cfg.gen.snrs.size() == 20);

    // the effective echo round-trips through the parser
    cli::RunConfig with_seed = cfg;
    with_seed.seed = 7;
    const auto back = cli::parse_run_config(cli::effective_config_json(with_seed));
    CHECK(back.seed.value() == 7);
    CHECK(back.train.batch_size == 128);
    CHECK(back.gen.channel.fading_taps.size() == 3);

    CHECK_THROWS_AS(cli::parse_run_config("not json"), ContractError);
    CHECK_THROWS_AS(cli::parse_run_config("{\"nope\": 1}"), ContractError);
}

TEST_CASE("cli: no subcommand or unknown flag is a usage error") {
    CHECK(run("") == 1);
    CHECK(run("gen --nope --out x.amcd") == 1);
    CHECK(run("--help") == 0);
}

TEST_CASE("cli gen: same seed gives byte-identical datasets") {
    Sandbox box;
    write_text(box.path("c.json"), kTinyGenConfig);
    const std::string base = "gen --config " + box.path("c.json") + " --seed 42 --out ";
    REQUIRE(run(base + box.path("a.amcd")) == 0);
    REQUIRE(run(base + box.path("b.amcd")) == 0);
    CHECK(binio::read_file(box.path("a.amcd")) == binio::read_file(box.path("b.amcd")));

    REQUIRE(run("gen --config " + box.path("c.json") + " --seed 43 --out " +
                box.path("c.amcd")) == 0);
    CHECK(binio::read_file(box.path("a.amcd")) != binio::read_file(box.path("c.amcd")));
}

TEST_CASE("cli train: run directory has the full report layout") {
    Sandbox box;
    write_text(box.path("c.json"), kTinyGenConfig);
    REQUIRE(run("gen --config " + box.path("c.json") + " --seed 42 --out " +
                box.path("ds.amcd")) == 0);
    REQUIRE(run("train --dataset " + box.path("ds.amcd") + " --arch scrnn --seed 5 --epochs 1 " +
                "--patience 1 --split 0.75 --out " + box.path("run1")) == 0);
    for (const char* name : {"config.json", "weights.amcw", "history.csv",
                             "accuracy_by_snr.csv", "timing.json", "confusion_0.csv",
                             "confusion_10.csv"}) {
        INFO(name);
        CHECK(fs::exists(box.path("run1") / fs::path(name)));
    }
    // effective config re-parses and knows the seed and dataset
    const auto cfg = cli::parse_run_config(binio::read_file(box.path("run1") + "/config.json"));
    CHECK(cfg.seed.value() == 5);
    CHECK(cfg.dataset_path == box.path("ds.amcd"));
}

TEST_CASE("cli eval: reproduces accuracy_by_snr.csv byte-for-byte") {
    Sandbox box;
    write_text(box.path("c.json"), kTinyGenConfig);
    REQUIRE(run("gen --config " + box.path("c.json") + " --seed 42 --out " +
                box.path("ds.amcd")) == 0);
    REQUIRE(run("train --dataset " + box.path("ds.amcd") + " --arch scrnn --seed 5 --epochs 1 " +
                "--patience 1 --split 0.75 --out " + box.path("run1")) == 0);
    const std::string original = binio::read_file(box.path("run1") + "/accuracy_by_snr.csv");
    REQUIRE(run("eval --run " + box.path("run1") + " --out " + box.path("eval_out")) == 0);
    CHECK(binio::read_file(box.path("eval_out") + "/accuracy_by_snr.csv") == original);
}

TEST_CASE("cli: flag overrides file value, echoed in the effective config") {
    Sandbox box;
    write_text(box.path("c.json"),
               R"({"gen": {"frames_per_cell": 3, "mods": ["BPSK"], "snrs": [0]},
                   "train": {"lr": 0.001}})");
    REQUIRE(run("gen --config " + box.path("c.json") + " --seed 4 --out " +
                box.path("ds.amcd")) == 0);
    REQUIRE(run("train --config " + box.path("c.json") + " --dataset " + box.path("ds.amcd") +
                " --arch scrnn --seed 4 --epochs 1 --patience 1 --split 0.7 --lr 0.01 --out " +
                box.path("run")) == 0);
    const auto cfg = cli::parse_run_config(binio::read_file(box.path("run") + "/config.json"));
    CHECK(cfg.train.lr == Approx(0.01f));
}

TEST_CASE("cli: misspelled config key is rejected with its path") {
    Sandbox box;
    write_text(box.path("bad.json"), R"({"train": {"batchsize": 64}})");
    const std::string log = box.path("log");
    CHECK(run("train --config " + box.path("bad.json") + " --dataset x --out " + box.path("r"),
              log) == 2);
    const std::string err = binio::read_file(log + ".err");
    CHECK(err.find("batchsize") != std::string::npos);
}

TEST_CASE("cli: corrupted dataset file is a data error (exit 2)") {
    Sandbox box;
    write_text(box.path("junk.amcd"), "not a dataset");
    CHECK(run("train --dataset " + box.path("junk.amcd") + " --out " + box.path("r") +
              " --seed 1") == 2);
}

TEST_CASE("cli gradcheck: toy scrnn passes and exits 0") {
    Sandbox box;
    const std::string log = box.path("gc");
    CHECK(run("gradcheck --arch scrnn --toy --seed 3", log) == 0);
    const std::string out = binio::read_file(log + ".out");
    CHECK(out.find("max relative error") != std::string::npos);
}

TEST_CASE("cli bench: writes timing.json") {
    Sandbox box;
    write_text(box.path("c.json"), R"({"gen": {"frames_per_cell": 2, "mods": ["BPSK"],
                                       "snrs": [10]}})");
    REQUIRE(run("gen --config " + box.path("c.json") + " --seed 9 --out " +
                box.path("ds.amcd")) == 0);
    REQUIRE(run("bench --dataset " + box.path("ds.amcd") + " --arch scrnn --seed 9 --epochs 1 " +
                "--out " + box.path("bench_out")) == 0);
    CHECK(fs::exists(box.path("bench_out") + "/timing.json"));
    const std::string timing = binio::read_file(box.path("bench_out") + "/timing.json");
    CHECK(timing.find("prediction_us_per_sample") != std::string::npos);
}
