// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace amc {

/// Resolves a worker count. 0 means "auto": the AMC_THREADS environment
/// variable if set, otherwise the machine core count.
inline unsigned resolve_thread_count(unsigned requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("AMC_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

/// Splits [0, n) into `workers` contiguous chunks and runs
/// fn(worker_index, begin, end) on each. Chunk boundaries depend only on
/// (n, workers), so any fixed-order reduction over per-worker results is
/// reproducible for a given worker count. workers == 1 runs inline.
inline void parallel_chunks(unsigned workers, std::size_t n,
                            const std::function<void(unsigned, std::size_t, std::size_t)>& fn) {
    if (n == 0) return;
    if (workers < 1) workers = 1;
    if (static_cast<std::size_t>(workers) > n) workers = static_cast<unsigned>(n);
    if (workers == 1) {
        fn(0, 0, n);
        return;
    }
    const std::size_t base = n / workers;
    const std::size_t extra = n % workers;
    std::vector<std::thread> threads;
    threads.reserve(workers - 1);
    std::size_t begin = 0;
    for (unsigned w = 0; w < workers; ++w) {
        std::size_t len = base + (w < extra ? 1 : 0);
        std::size_t end = begin + len;
        if (w + 1 == workers) {
            fn(w, begin, end);
        } else {
            threads.emplace_back(fn, w, begin, end);
        }
        begin = end;
    }
    for (auto& t : threads) t.join();
}

}  // namespace amc
