// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "amc/core/error.hpp"

namespace amc::synth {

/// The 11 modulation classes. Integer ids are stable label encodings
/// (0..10 in this order) and must never be reordered.
enum class ModType : std::uint8_t {
    BPSK = 0,
    QPSK = 1,
    PSK8 = 2,
    QAM16 = 3,
    QAM64 = 4,
    BFSK = 5,
    CPFSK = 6,
    PAM4 = 7,
    WBFM = 8,
    AMSSB = 9,
    AMDSB = 10,
};

inline constexpr std::size_t kModCount = 11;

inline const std::array<std::string, kModCount>& mod_names() {
    static const std::array<std::string, kModCount> names = {
        "BPSK", "QPSK", "PSK8", "QAM16", "QAM64", "BFSK",
        "CPFSK", "PAM4", "WBFM", "AMSSB", "AMDSB"};
    return names;
}

inline const std::string& mod_name(ModType m) { return mod_names()[static_cast<std::size_t>(m)]; }

inline ModType mod_from_name(const std::string& name) {
    for (std::size_t i = 0; i < kModCount; ++i)
        if (mod_names()[i] == name) return static_cast<ModType>(i);
    throw ContractError(message("unknown modulation name '", name, "'"));
}

inline bool is_digital(ModType m) { return static_cast<std::uint8_t>(m) <= 7; }

inline bool is_constant_envelope(ModType m) {
    return m == ModType::BFSK || m == ModType::CPFSK || m == ModType::WBFM;
}

}  // namespace amc::synth
