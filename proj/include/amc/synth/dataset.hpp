// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <vector>

#include "amc/core/binio.hpp"
#include "amc/core/rng.hpp"
#include "amc/core/threading.hpp"
#include "amc/synth/ampphase.hpp"
#include "amc/synth/audio.hpp"
#include "amc/synth/channel.hpp"
#include "amc/synth/modulators.hpp"

namespace amc::synth {

/// One 2x128 received vector: I and Q planes, stored as 32-bit floats.
struct LabeledSample {
    std::vector<float> i, q;
    ModType mod = ModType::BPSK;
    std::int8_t snr_db = 0;
};

struct Dataset {
    std::uint16_t frame_len = 128;
    std::vector<std::string> mod_table = {mod_names().begin(), mod_names().end()};
    std::vector<LabeledSample> samples;

    /// Distinct SNR values present, ascending.
    std::vector<int> snr_values() const {
        std::vector<int> v;
        for (const auto& s : samples) {
            int snr = s.snr_db;
            if (std::find(v.begin(), v.end(), snr) == v.end()) v.push_back(snr);
        }
        std::sort(v.begin(), v.end());
        return v;
    }
};

inline std::vector<int> default_snr_ladder() {
    std::vector<int> v;
    for (int s = -20; s <= 18; s += 2) v.push_back(s);
    return v;
}

inline std::vector<ModType> all_mod_types() {
    std::vector<ModType> v;
    for (std::size_t i = 0; i < kModCount; ++i) v.push_back(static_cast<ModType>(i));
    return v;
}

struct GenConfig {
    int samples_per_symbol = 8;
    int frame_len = 128;
    int frames_per_cell = 1000;  // per (mod, snr) pair; 1000 => 220000 total
    double rrc_rolloff = 0.35;
    int rrc_span_symbols = 8;
    double audio_bandwidth = 0.08;  // fraction of the sample rate
    std::uint64_t seed = 1;
    ChannelConfig channel;
    std::vector<ModType> mods = all_mod_types();
    std::vector<int> snrs = default_snr_ladder();

    void check() const {
        require(samples_per_symbol >= 1, "gen: samples_per_symbol must be >= 1");
        require(frame_len >= 16, "gen: frame_len must be >= 16");
        require(frames_per_cell >= 1, "gen: frames_per_cell must be >= 1");
        require(!mods.empty() && !snrs.empty(), "gen: mods and snrs must be non-empty");
        channel.check();
    }
};

namespace detail {

/// Signal long enough that, after the RRC settles and the channel consumes
/// its margins, a frame can still be sliced at a random origin.
inline std::size_t symbols_needed(const GenConfig& cfg) {
    const std::size_t frame_syms =
        (static_cast<std::size_t>(cfg.frame_len) + cfg.samples_per_symbol - 1) /
        cfg.samples_per_symbol;
    return frame_syms + static_cast<std::size_t>(cfg.rrc_span_symbols) + 24;
}

inline std::vector<std::uint8_t> random_bits(SeededRng& rng, std::size_t count) {
    std::vector<std::uint8_t> bits(count);
    for (auto& b : bits) b = static_cast<std::uint8_t>(rng.next_u64() & 1u);
    return bits;
}

}  // namespace detail

/// Noise-free baseband for one sample draw. Digital schemes are trimmed to
/// the filter-settled region, so mean power is 1 at the channel input.
inline std::vector<cplx> synth_baseband(const GenConfig& cfg, ModType mod, SeededRng& rng) {
    const int sps = cfg.samples_per_symbol;
    if (mod == ModType::WBFM || mod == ModType::AMSSB || mod == ModType::AMDSB) {
        std::size_t audio_len = 1;
        const std::size_t want = static_cast<std::size_t>(cfg.frame_len) * 3;
        while (audio_len < want) audio_len <<= 1;
        const auto audio = synth_audio(rng, audio_len, cfg.audio_bandwidth);
        return modulate_analog(mod, audio);
    }
    const std::size_t n_sym = detail::symbols_needed(cfg);
    if (mod == ModType::BFSK || mod == ModType::CPFSK) {
        const auto bits = detail::random_bits(rng, n_sym);
        return modulate_fsk(mod, bits, sps, default_fsk_index(mod));
    }
    const auto rrc = rrc_taps(cfg.rrc_rolloff, cfg.rrc_span_symbols, sps);
    const auto bits = detail::random_bits(rng, n_sym * bits_per_symbol(mod));
    auto sig = modulate_linear(mod, bits, sps, rrc);
    // keep only the settled region
    const std::size_t settle = rrc.size() - 1;
    const std::size_t end = n_sym * static_cast<std::size_t>(sps);
    return std::vector<cplx>(sig.begin() + settle, sig.begin() + end);
}

/// Full receive pipeline for one (mod, snr, index) cell entry. Each sample
/// derives its own rng stream from hash(seed, mod, snr, index), so
/// generation order and worker count cannot change the result.
inline LabeledSample generate_sample(const GenConfig& cfg, ModType mod, int snr_db,
                                     std::size_t index) {
    SeededRng rng(seed_hash({cfg.seed, static_cast<std::uint64_t>(mod),
                             static_cast<std::uint64_t>(static_cast<std::int64_t>(snr_db)),
                             index}));
    const auto clean = synth_baseband(cfg, mod, rng);
    ChannelConfig ch = cfg.channel;
    ch.snr_db = snr_db;
    const auto propagated = apply_channel(clean, ch, rng);
    const auto noisy = add_awgn(propagated, snr_db, rng);

    const std::size_t frame = static_cast<std::size_t>(cfg.frame_len);
    require(noisy.size() >= frame, "generate_sample: signal length ", noisy.size(),
            " shorter than frame ", frame);
    const std::size_t origin =
        noisy.size() == frame
            ? 0
            : static_cast<std::size_t>(rng.next_below(noisy.size() - frame + 1));

    LabeledSample out;
    out.mod = mod;
    out.snr_db = static_cast<std::int8_t>(snr_db);
    out.i.resize(frame);
    out.q.resize(frame);
    double sq = 0.0;
    for (std::size_t n = 0; n < frame; ++n) sq += std::norm(noisy[origin + n]);
    const double rms = std::sqrt(sq / static_cast<double>(frame));
    const double inv = rms > 0 ? 1.0 / rms : 0.0;
    for (std::size_t n = 0; n < frame; ++n) {
        out.i[n] = static_cast<float>(noisy[origin + n].real() * inv);
        out.q[n] = static_cast<float>(noisy[origin + n].imag() * inv);
    }
    return out;
}

/// Stratified dataset: frames_per_cell samples for every (mod, snr) pair,
/// in cell-major order. Bit-reproducible for a given config regardless of
/// the worker count.
inline Dataset build_dataset(const GenConfig& cfg, unsigned threads = 0) {
    cfg.check();
    Dataset ds;
    ds.frame_len = static_cast<std::uint16_t>(cfg.frame_len);

    struct Cell {
        ModType mod;
        int snr;
        std::size_t index;
    };
    std::vector<Cell> jobs;
    jobs.reserve(cfg.mods.size() * cfg.snrs.size() * static_cast<std::size_t>(cfg.frames_per_cell));
    for (ModType mod : cfg.mods)
        for (int snr : cfg.snrs)
            for (int k = 0; k < cfg.frames_per_cell; ++k)
                jobs.push_back({mod, snr, static_cast<std::size_t>(k)});

    ds.samples.resize(jobs.size());
    parallel_chunks(resolve_thread_count(threads), jobs.size(),
                    [&](unsigned, std::size_t begin, std::size_t end) {
                        for (std::size_t j = begin; j < end; ++j)
                            ds.samples[j] =
                                generate_sample(cfg, jobs[j].mod, jobs[j].snr, jobs[j].index);
                    });
    return ds;
}

/// Splits every (mod, snr) cell to within one sample of train_fraction.
/// The two parts partition the input exactly.
inline std::pair<Dataset, Dataset> split_stratified(const Dataset& ds, double train_fraction,
                                                    SeededRng& rng) {
    require(train_fraction > 0.0 && train_fraction < 1.0, "split: fraction ", train_fraction,
            " outside (0, 1)");
    std::map<std::pair<int, int>, std::vector<std::size_t>> cells;
    for (std::size_t idx = 0; idx < ds.samples.size(); ++idx) {
        const auto& s = ds.samples[idx];
        cells[{static_cast<int>(s.mod), s.snr_db}].push_back(idx);
    }
    Dataset train, test;
    train.frame_len = test.frame_len = ds.frame_len;
    train.mod_table = test.mod_table = ds.mod_table;
    for (auto& [key, indices] : cells) {
        require(!indices.empty(), "split: empty cell");
        for (std::size_t i = indices.size(); i > 1; --i)
            std::swap(indices[i - 1], indices[rng.next_below(i)]);
        const std::size_t n_train = static_cast<std::size_t>(
            std::llround(train_fraction * static_cast<double>(indices.size())));
        for (std::size_t i = 0; i < indices.size(); ++i) {
            (i < n_train ? train : test).samples.push_back(ds.samples[indices[i]]);
        }
    }
    return {std::move(train), std::move(test)};
}

// ---------------------------------------------------------------------------
// file format (little-endian):
//   magic "AMCD" | u16 version=1 | u16 mod_count | {u8 len, ascii}*mod_count
//   | u32 sample_count | u16 frame_len
//   | records: u8 mod_id, i8 snr_db, f32*frame_len (I), f32*frame_len (Q)
// ---------------------------------------------------------------------------

inline void write_dataset(const Dataset& ds, const std::string& path) {
    require(ds.mod_table.size() <= 0xFFFF, "write_dataset: too many modulation names");
    std::string out;
    out.reserve(16 + ds.samples.size() * (2 + 8u * ds.frame_len));
    out += "AMCD";
    binio::put_u16(out, 1);
    binio::put_u16(out, static_cast<std::uint16_t>(ds.mod_table.size()));
    for (const auto& name : ds.mod_table) {
        require(name.size() <= 255, "write_dataset: modulation name too long");
        out.push_back(static_cast<char>(name.size()));
        out += name;
    }
    binio::put_u32(out, static_cast<std::uint32_t>(ds.samples.size()));
    binio::put_u16(out, ds.frame_len);
    for (const auto& s : ds.samples) {
        require(s.i.size() == ds.frame_len && s.q.size() == ds.frame_len,
                "write_dataset: sample frame length mismatch");
        out.push_back(static_cast<char>(static_cast<std::uint8_t>(s.mod)));
        out.push_back(static_cast<char>(s.snr_db));
        for (float v : s.i) binio::put_f32(out, v);
        for (float v : s.q) binio::put_f32(out, v);
    }
    binio::write_file(path, out);
}

inline Dataset read_dataset(const std::string& path) {
    const std::string buf = binio::read_file(path);
    binio::Reader r{buf, 0, path};
    r.need(4, "magic");
    if (buf.compare(0, 4, "AMCD") != 0)
        throw IoError(message("dataset: bad magic in '", path, "' at byte offset 0 (expected AMCD)"));
    r.off = 4;
    const std::uint16_t version = r.u16("version");
    if (version != 1)
        throw IoError(message("dataset: unsupported version ", version, " in '", path,
                              "' at byte offset 4 (expected 1)"));
    Dataset ds;
    const std::uint16_t mod_count = r.u16("mod count");
    ds.mod_table.clear();
    for (std::uint16_t m = 0; m < mod_count; ++m) {
        const std::uint8_t len = r.u8("mod name length");
        r.need(len, "mod name");
        ds.mod_table.emplace_back(buf.substr(r.off, len));
        r.off += len;
    }
    const std::uint32_t sample_count = r.u32("sample count");
    ds.frame_len = r.u16("frame length");
    ds.samples.reserve(sample_count);
    for (std::uint32_t k = 0; k < sample_count; ++k) {
        LabeledSample s;
        const std::uint8_t mod_id = r.u8("record mod id");
        if (mod_id >= ds.mod_table.size())
            throw IoError(message("dataset: record ", k, " mod id ", int(mod_id),
                                  " out of range (", ds.mod_table.size(), " names) at byte offset ",
                                  r.off - 1));
        s.mod = static_cast<ModType>(mod_id);
        s.snr_db = static_cast<std::int8_t>(r.u8("record snr"));
        s.i.resize(ds.frame_len);
        s.q.resize(ds.frame_len);
        for (auto& v : s.i) v = r.f32("I sample");
        for (auto& v : s.q) v = r.f32("Q sample");
        ds.samples.push_back(std::move(s));
    }
    return ds;
}

/// 2 x frame_len amplitude/phase representation of one sample.
template <typename T>
void to_amplitude_phase(const LabeledSample& s, T* amp, T* phase) {
    amplitude_phase_rows(s.i.data(), s.q.data(), s.i.size(), amp, phase);
}

}  // namespace amc::synth
