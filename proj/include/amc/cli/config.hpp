// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <json.hpp>

#include <optional>
#include <string>

#include "amc/models/model_spec.hpp"
#include "amc/synth/dataset.hpp"
#include "amc/train/trainer.hpp"

namespace amc::cli {

using json = nlohmann::ordered_json;

/// Everything a run needs, mirroring the JSON config file. Flags override
/// file values override these defaults.
struct RunConfig {
    std::optional<std::uint64_t> seed;  // mandatory in persisted configs
    std::string arch = "scrnn";         // scrnn | cnn | lstm
    double split_fraction = 0.9;        // train share of the dataset
    std::string dataset_path;
    synth::GenConfig gen;
    train::TrainConfig train;
    models::ScrnnVariant scrnn;
};

namespace detail {

inline void check_keys(const json& obj, const std::string& path,
                       std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : obj.items()) {
        bool ok = false;
        for (const char* a : allowed)
            if (key == a) ok = true;
        if (!ok)
            throw ContractError(message("config: unknown key \"", path, key, "\""));
    }
}

template <typename T>
void read_number(const json& obj, const std::string& path, const char* key, T& out) {
    if (!obj.contains(key)) return;
    const json& v = obj.at(key);
    if (!v.is_number())
        throw ContractError(message("config: \"", path, key, "\" must be a number"));
    out = v.get<T>();
}

inline void read_bool(const json& obj, const std::string& path, const char* key, bool& out) {
    if (!obj.contains(key)) return;
    const json& v = obj.at(key);
    if (!v.is_boolean())
        throw ContractError(message("config: \"", path, key, "\" must be a boolean"));
    out = v.get<bool>();
}

inline void read_string(const json& obj, const std::string& path, const char* key,
                        std::string& out) {
    if (!obj.contains(key)) return;
    const json& v = obj.at(key);
    if (!v.is_string())
        throw ContractError(message("config: \"", path, key, "\" must be a string"));
    out = v.get<std::string>();
}

inline void parse_channel(const json& obj, const std::string& path, synth::ChannelConfig& ch) {
    check_keys(obj, path,
               {"cfo_offset", "cfo_walk_std", "sro_ppm_std", "fading_taps",
                "randomize_tap_phase", "phase_max", "scale_min", "scale_max"});
    read_number(obj, path, "cfo_offset", ch.cfo_offset);
    read_number(obj, path, "cfo_walk_std", ch.cfo_walk_std);
    read_number(obj, path, "sro_ppm_std", ch.sro_ppm_std);
    read_bool(obj, path, "randomize_tap_phase", ch.randomize_tap_phase);
    read_number(obj, path, "phase_max", ch.phase_max);
    read_number(obj, path, "scale_min", ch.scale_min);
    read_number(obj, path, "scale_max", ch.scale_max);
    if (obj.contains("fading_taps")) {
        const json& taps = obj.at("fading_taps");
        if (!taps.is_array())
            throw ContractError(message("config: \"", path, "fading_taps\" must be an array"));
        ch.fading_taps.clear();
        for (const auto& t : taps) {
            if (!t.is_array() || t.size() != 2 || !t[0].is_number() || !t[1].is_number())
                throw ContractError(message("config: \"", path,
                                            "fading_taps\" entries must be [delay, power_db]"));
            ch.fading_taps.push_back({t[0].get<int>(), t[1].get<double>()});
        }
    }
}

inline void parse_gen(const json& obj, const std::string& path, synth::GenConfig& gen) {
    check_keys(obj, path,
               {"frames_per_cell", "samples_per_symbol", "frame_len", "rrc_rolloff",
                "rrc_span_symbols", "audio_bandwidth", "mods", "snrs", "channel"});
    read_number(obj, path, "frames_per_cell", gen.frames_per_cell);
    read_number(obj, path, "samples_per_symbol", gen.samples_per_symbol);
    read_number(obj, path, "frame_len", gen.frame_len);
    read_number(obj, path, "rrc_rolloff", gen.rrc_rolloff);
    read_number(obj, path, "rrc_span_symbols", gen.rrc_span_symbols);
    read_number(obj, path, "audio_bandwidth", gen.audio_bandwidth);
    if (obj.contains("mods")) {
        const json& mods = obj.at("mods");
        if (!mods.is_array())
            throw ContractError(message("config: \"", path, "mods\" must be an array"));
        gen.mods.clear();
        for (const auto& m : mods) {
            if (!m.is_string())
                throw ContractError(message("config: \"", path, "mods\" entries must be strings"));
            gen.mods.push_back(synth::mod_from_name(m.get<std::string>()));
        }
    }
    if (obj.contains("snrs")) {
        const json& snrs = obj.at("snrs");
        if (!snrs.is_array())
            throw ContractError(message("config: \"", path, "snrs\" must be an array"));
        gen.snrs.clear();
        for (const auto& s : snrs) {
            if (!s.is_number_integer())
                throw ContractError(message("config: \"", path, "snrs\" entries must be integers"));
            gen.snrs.push_back(s.get<int>());
        }
    }
    if (obj.contains("channel")) {
        const json& ch = obj.at("channel");
        if (!ch.is_object())
            throw ContractError(message("config: \"", path, "channel\" must be an object"));
        parse_channel(ch, path + "channel.", gen.channel);
    }
}

inline void parse_train(const json& obj, const std::string& path, train::TrainConfig& t,
                        double& split_fraction, std::string& arch) {
    check_keys(obj, path,
               {"batch_size", "lr", "max_epochs", "patience", "val_fraction", "split_fraction",
                "threads", "max_norm", "arch"});
    read_number(obj, path, "batch_size", t.batch_size);
    read_number(obj, path, "lr", t.lr);
    read_number(obj, path, "max_epochs", t.max_epochs);
    read_number(obj, path, "patience", t.patience);
    read_number(obj, path, "val_fraction", t.val_fraction);
    read_number(obj, path, "split_fraction", split_fraction);
    read_number(obj, path, "threads", t.threads);
    read_number(obj, path, "max_norm", t.max_norm);
    read_string(obj, path, "arch", arch);
}

inline void parse_scrnn(const json& obj, const std::string& path, models::ScrnnVariant& v) {
    check_keys(obj, path, {"conv_depth", "kernel_size", "kernel_count", "rnn_kind", "rnn_depth"});
    read_number(obj, path, "conv_depth", v.conv_depth);
    read_number(obj, path, "kernel_size", v.kernel_size);
    read_number(obj, path, "kernel_count", v.kernel_count);
    read_number(obj, path, "rnn_depth", v.rnn_depth);
    std::string kind;
    read_string(obj, path, "rnn_kind", kind);
    if (!kind.empty()) v.rnn_kind = models::detail::rnn_kind_from(kind);
}

}  // namespace detail

/// Parses and validates a config JSON document. Unknown keys, type
/// mismatches and out-of-range values are rejected with their key path.
inline RunConfig parse_run_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ContractError(message("config: invalid JSON: ", e.what()));
    }
    if (!doc.is_object()) throw ContractError("config: top level must be an object");
    RunConfig cfg;
    detail::check_keys(doc, "", {"seed", "dataset", "gen", "train", "scrnn"});
    if (doc.contains("seed")) {
        if (!doc.at("seed").is_number_integer())
            throw ContractError("config: \"seed\" must be an integer");
        cfg.seed = doc.at("seed").get<std::uint64_t>();
    }
    detail::read_string(doc, "", "dataset", cfg.dataset_path);
    if (doc.contains("gen")) {
        if (!doc.at("gen").is_object()) throw ContractError("config: \"gen\" must be an object");
        detail::parse_gen(doc.at("gen"), "gen.", cfg.gen);
    }
    if (doc.contains("train")) {
        if (!doc.at("train").is_object())
            throw ContractError("config: \"train\" must be an object");
        detail::parse_train(doc.at("train"), "train.", cfg.train, cfg.split_fraction, cfg.arch);
    }
    if (doc.contains("scrnn")) {
        if (!doc.at("scrnn").is_object())
            throw ContractError("config: \"scrnn\" must be an object");
        detail::parse_scrnn(doc.at("scrnn"), "scrnn.", cfg.scrnn);
    }

    // range checks with key paths
    if (cfg.gen.frames_per_cell < 1) throw ContractError("config: \"gen.frames_per_cell\" must be >= 1");
    if (cfg.gen.samples_per_symbol < 1)
        throw ContractError("config: \"gen.samples_per_symbol\" must be >= 1");
    if (!(cfg.gen.rrc_rolloff > 0.0 && cfg.gen.rrc_rolloff <= 1.0))
        throw ContractError("config: \"gen.rrc_rolloff\" outside (0, 1]");
    if (!(cfg.split_fraction > 0.0 && cfg.split_fraction < 1.0))
        throw ContractError("config: \"train.split_fraction\" outside (0, 1)");
    if (cfg.train.lr <= 0) throw ContractError("config: \"train.lr\" must be positive");
    if (!(cfg.train.val_fraction > 0.0 && cfg.train.val_fraction < 0.5))
        throw ContractError("config: \"train.val_fraction\" outside (0, 0.5)");
    if (cfg.arch != "scrnn" && cfg.arch != "cnn" && cfg.arch != "lstm")
        throw ContractError(message("config: \"train.arch\" must be scrnn, cnn or lstm, got \"",
                                    cfg.arch, "\""));
    cfg.scrnn.check();
    return cfg;
}

inline RunConfig load_run_config(const std::string& path) {
    return parse_run_config(binio::read_file(path));
}

/// The effective configuration, every field explicit, for echoing into run
/// directories. Round-trips through parse_run_config.
inline std::string effective_config_json(const RunConfig& cfg) {
    json doc;
    doc["seed"] = cfg.seed.value_or(0);
    doc["dataset"] = cfg.dataset_path;
    json gen;
    gen["frames_per_cell"] = cfg.gen.frames_per_cell;
    gen["samples_per_symbol"] = cfg.gen.samples_per_symbol;
    gen["frame_len"] = cfg.gen.frame_len;
    gen["rrc_rolloff"] = cfg.gen.rrc_rolloff;
    gen["rrc_span_symbols"] = cfg.gen.rrc_span_symbols;
    gen["audio_bandwidth"] = cfg.gen.audio_bandwidth;
    json mods = json::array();
    for (auto m : cfg.gen.mods) mods.push_back(synth::mod_name(m));
    gen["mods"] = mods;
    gen["snrs"] = cfg.gen.snrs;
    json ch;
    ch["cfo_offset"] = cfg.gen.channel.cfo_offset;
    ch["cfo_walk_std"] = cfg.gen.channel.cfo_walk_std;
    ch["sro_ppm_std"] = cfg.gen.channel.sro_ppm_std;
    json taps = json::array();
    for (const auto& t : cfg.gen.channel.fading_taps)
        taps.push_back(json::array({t.delay, t.power_db}));
    ch["fading_taps"] = taps;
    ch["randomize_tap_phase"] = cfg.gen.channel.randomize_tap_phase;
    ch["phase_max"] = cfg.gen.channel.phase_max;
    ch["scale_min"] = cfg.gen.channel.scale_min;
    ch["scale_max"] = cfg.gen.channel.scale_max;
    gen["channel"] = ch;
    doc["gen"] = gen;
    json tr;
    tr["batch_size"] = cfg.train.batch_size;
    tr["lr"] = cfg.train.lr;
    tr["max_epochs"] = cfg.train.max_epochs;
    tr["patience"] = cfg.train.patience;
    tr["val_fraction"] = cfg.train.val_fraction;
    tr["split_fraction"] = cfg.split_fraction;
    tr["threads"] = cfg.train.threads;
    tr["max_norm"] = cfg.train.max_norm;
    tr["arch"] = cfg.arch;
    doc["train"] = tr;
    json sc;
    sc["conv_depth"] = cfg.scrnn.conv_depth;
    sc["kernel_size"] = cfg.scrnn.kernel_size;
    sc["kernel_count"] = cfg.scrnn.kernel_count;
    sc["rnn_kind"] = models::detail::rnn_kind_name(cfg.scrnn.rnn_kind);
    sc["rnn_depth"] = cfg.scrnn.rnn_depth;
    doc["scrnn"] = sc;
    return doc.dump(2) + "\n";
}

/// Architecture spec for the configured model family.
inline models::ModelSpec build_arch(const RunConfig& cfg) {
    if (cfg.arch == "cnn") return models::build_cnn_baseline();
    if (cfg.arch == "lstm") return models::build_lstm_baseline();
    return models::build_scrnn(cfg.scrnn);
}

inline std::string arch_id(const RunConfig& cfg) {
    if (cfg.arch == "cnn") return "cnn-baseline";
    if (cfg.arch == "lstm") return "lstm-baseline";
    return models::scrnn_variant_id(cfg.scrnn);
}

}  // namespace amc::cli
