// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>

#include "amc/core/error.hpp"

namespace amc::binio {

// little-endian encode helpers

inline void put_u16(std::string& out, std::uint16_t v) {
    out.push_back(static_cast<char>(v & 0xFF));
    out.push_back(static_cast<char>((v >> 8) & 0xFF));
}

inline void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

inline void put_f32(std::string& out, float f) {
    std::uint32_t bits;
    std::memcpy(&bits, &f, 4);
    put_u32(out, bits);
}

/// Byte reader that reports the offset of any truncation.
struct Reader {
    const std::string& buf;
    std::size_t off = 0;
    const std::string& path;

    void need(std::size_t n, const char* what) {
        if (off + n > buf.size())
            throw IoError(message("truncated file '", path, "': need ", n, " byte(s) for ", what,
                                  " at byte offset ", off, ", file has ", buf.size()));
    }
    std::uint8_t u8(const char* what) {
        need(1, what);
        return static_cast<std::uint8_t>(buf[off++]);
    }
    std::uint16_t u16(const char* what) {
        need(2, what);
        std::uint16_t v = static_cast<std::uint8_t>(buf[off]) |
                          (static_cast<std::uint16_t>(static_cast<std::uint8_t>(buf[off + 1])) << 8);
        off += 2;
        return v;
    }
    std::uint32_t u32(const char* what) {
        need(4, what);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i)
            v |= static_cast<std::uint32_t>(static_cast<std::uint8_t>(buf[off + i])) << (8 * i);
        off += 4;
        return v;
    }
    float f32(const char* what) {
        const std::uint32_t bits = u32(what);
        float f;
        std::memcpy(&f, &bits, 4);
        return f;
    }
};

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(message("cannot open '", path, "' for reading"));
    std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return buf;
}

inline void write_file(const std::string& path, const std::string& buf) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(message("cannot open '", path, "' for writing"));
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw IoError(message("write failed for '", path, "'"));
}

}  // namespace amc::binio
