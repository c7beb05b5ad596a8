#pragma once

#include <cstdlib>
#include <thread>
#include <vector>

namespace v2vgeo {

/// Worker count: hardware concurrency capped by the V2VGEO_THREADS
/// environment variable (<=1 disables threading).
inline unsigned effective_thread_count() {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    if (const char* env = std::getenv("V2VGEO_THREADS")) {
        long cap = std::strtol(env, nullptr, 10);
        if (cap >= 1 && static_cast<unsigned>(cap) < hw) hw = static_cast<unsigned>(cap);
        if (cap == 1 || cap == 0) hw = 1;
    }
    return hw;
}

/// Runs fn(i) for i in [0, n). Each index writes only its own output slot,
/// so scheduling cannot change results.
template <typename Fn> void parallel_for(size_t n, Fn&& fn) {
    const unsigned threads = effective_thread_count();
    if (threads <= 1 || n < 2 * threads) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    const size_t chunk = (n + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
        const size_t lo = t * chunk;
        const size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (size_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace v2vgeo
