// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "amc/core/error.hpp"
#include "amc/synth/modtype.hpp"

namespace amc::train {

struct EpochRecord {
    int epoch = 0;  // 1-based
    float train_loss = 0;
    float val_loss = 0;
    float seconds = 0;
};

/// 11x11 count table; rows are the true class, columns the prediction.
struct ConfusionMatrix {
    std::array<std::array<std::uint64_t, synth::kModCount>, synth::kModCount> counts{};

    void add(std::size_t true_class, std::size_t predicted) {
        counts.at(true_class).at(predicted) += 1;
    }
    std::uint64_t row_sum(std::size_t r) const {
        std::uint64_t s = 0;
        for (auto v : counts[r]) s += v;
        return s;
    }
    std::uint64_t total() const {
        std::uint64_t s = 0;
        for (std::size_t r = 0; r < counts.size(); ++r) s += row_sum(r);
        return s;
    }
    std::uint64_t trace() const {
        std::uint64_t s = 0;
        for (std::size_t r = 0; r < counts.size(); ++r) s += counts[r][r];
        return s;
    }
    double accuracy() const {
        const std::uint64_t n = total();
        return n ? static_cast<double>(trace()) / static_cast<double>(n) : 0.0;
    }
};

struct Accuracy {
    std::uint64_t correct = 0, total = 0;
    double value() const { return total ? static_cast<double>(correct) / total : 0.0; }
};

struct Timing {
    double train_seconds_per_epoch = 0;
    double total_train_seconds = 0;
    double prediction_us_per_sample = 0;
};

struct RunReport {
    std::string model_id;
    std::vector<EpochRecord> history;
    Accuracy overall;
    std::map<int, Accuracy> accuracy_by_snr;
    std::map<int, ConfusionMatrix> confusion_by_snr;
    Timing timing;
    std::string config_json;  // effective configuration, echoed verbatim
};

namespace detail {

inline std::string g9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError(message("cannot open '", path, "' for writing"));
    out << text;
    if (!out) throw IoError(message("write failed for '", path, "'"));
}

}  // namespace detail

inline std::string history_csv(const std::vector<EpochRecord>& history) {
    std::string out = "epoch,train_loss,val_loss,seconds\n";
    for (const auto& r : history) {
        out += std::to_string(r.epoch);
        out += ',';
        out += detail::g9(r.train_loss);
        out += ',';
        out += detail::g9(r.val_loss);
        out += ',';
        out += detail::g9(r.seconds);
        out += '\n';
    }
    return out;
}

inline std::vector<EpochRecord> parse_history_csv(const std::string& text) {
    std::vector<EpochRecord> out;
    std::size_t pos = text.find('\n');
    require(pos != std::string::npos && text.substr(0, pos) == "epoch,train_loss,val_loss,seconds",
            "history.csv: bad header");
    ++pos;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string::npos) eol = text.size();
        const std::string line = text.substr(pos, eol - pos);
        pos = eol + 1;
        if (line.empty()) continue;
        EpochRecord r;
        char* end = nullptr;
        const char* s = line.c_str();
        r.epoch = static_cast<int>(std::strtol(s, &end, 10));
        require(*end == ',', "history.csv: malformed line '", line, "'");
        r.train_loss = std::strtof(end + 1, &end);
        require(*end == ',', "history.csv: malformed line '", line, "'");
        r.val_loss = std::strtof(end + 1, &end);
        require(*end == ',', "history.csv: malformed line '", line, "'");
        r.seconds = std::strtof(end + 1, &end);
        out.push_back(r);
    }
    return out;
}

inline std::string accuracy_csv(const RunReport& report) {
    std::string out = "snr_db,accuracy,correct,total\n";
    for (const auto& [snr, acc] : report.accuracy_by_snr) {
        out += std::to_string(snr);
        out += ',';
        out += detail::g9(acc.value());
        out += ',';
        out += std::to_string(acc.correct);
        out += ',';
        out += std::to_string(acc.total);
        out += '\n';
    }
    out += "overall,";
    out += detail::g9(report.overall.value());
    out += ',';
    out += std::to_string(report.overall.correct);
    out += ',';
    out += std::to_string(report.overall.total);
    out += '\n';
    return out;
}

inline std::string confusion_csv(const ConfusionMatrix& cm) {
    std::string out = "true\\pred";
    for (const auto& name : synth::mod_names()) {
        out += ',';
        out += name;
    }
    out += '\n';
    for (std::size_t r = 0; r < synth::kModCount; ++r) {
        out += synth::mod_names()[r];
        for (std::size_t c = 0; c < synth::kModCount; ++c) {
            out += ',';
            out += std::to_string(cm.counts[r][c]);
        }
        out += '\n';
    }
    return out;
}

inline std::string timing_json(const Timing& t) {
    std::string out = "{\n";
    out += "  \"train_seconds_per_epoch\": " + detail::g9(t.train_seconds_per_epoch) + ",\n";
    out += "  \"total_train_seconds\": " + detail::g9(t.total_train_seconds) + ",\n";
    out += "  \"prediction_us_per_sample\": " + detail::g9(t.prediction_us_per_sample) + "\n";
    out += "}\n";
    return out;
}

/// Writes the fixed report layout into dir: history.csv,
/// accuracy_by_snr.csv, confusion_<snr>.csv per SNR, timing.json and
/// config.json.
inline void export_report(const RunReport& report, const std::string& dir) {
    std::filesystem::create_directories(dir);
    detail::write_text(dir + "/history.csv", history_csv(report.history));
    detail::write_text(dir + "/accuracy_by_snr.csv", accuracy_csv(report));
    for (const auto& [snr, cm] : report.confusion_by_snr)
        detail::write_text(dir + "/confusion_" + std::to_string(snr) + ".csv", confusion_csv(cm));
    detail::write_text(dir + "/timing.json", timing_json(report.timing));
    if (!report.config_json.empty()) detail::write_text(dir + "/config.json", report.config_json);
}

}  // namespace amc::train
