// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

#include "amc/core/error.hpp"

namespace amc {

namespace detail {

/// splitmix64 finalizer; used both to expand seeds and as a mixing hash.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

}  // namespace detail

/// Derives a child seed from a parent seed and a list of stream labels.
/// The chain is order-sensitive, so hash(seed, a, b) != hash(seed, b, a).
inline std::uint64_t seed_hash(std::initializer_list<std::uint64_t> parts) {
    std::uint64_t state = 0x243F6A8885A308D3ull;  // pi fraction bits
    for (std::uint64_t p : parts) {
        state ^= p;
        (void)detail::splitmix64(state);
    }
    std::uint64_t copy = state;
    return detail::splitmix64(copy);
}

/// Deterministic xoshiro256** stream, seeded via splitmix64 expansion.
/// Identical seeds give identical draw sequences on every platform; no
/// standard-library distributions are used anywhere.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : seed_(seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_) word = detail::splitmix64(sm);
    }

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() {
        const std::uint64_t result = detail::rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = detail::rotl(state_[3], 45);
        return result;
    }

    /// Uniform in [0, 1) with 53 bits of resolution.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform01();
    }

    /// Log-uniform over [lo, hi], lo > 0.
    double log_uniform(double lo, double hi) {
        require(lo > 0 && hi >= lo, "log_uniform: invalid range [", lo, ", ", hi, "]");
        return std::exp(uniform(std::log(lo), std::log(hi)));
    }

    /// Standard normal via Box-Muller (the sine branch is discarded so the
    /// stream is stateless between calls).
    double normal() {
        double u1 = uniform01();
        double u2 = uniform01();
        if (u1 <= 0.0) u1 = 0x1.0p-53;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    /// Uniform integer in [0, bound). Unbiased via rejection.
    std::uint64_t next_below(std::uint64_t bound) {
        require(bound > 0, "next_below: bound must be positive");
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            std::uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

    bool bernoulli(double p) { return uniform01() < p; }

private:
    std::uint64_t seed_;
    std::uint64_t state_[4];
};

}  // namespace amc
