#pragma once

#include <cstdint>
#include <thread>
#include <vector>

namespace cpmri {

inline unsigned resolve_threads(unsigned requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

/// Run fn(i) for i in [0, n) on up to `threads` workers. Tasks must be
/// independent; results must not depend on the interleaving.
template <class Fn>
void parallel_for(std::int64_t n, unsigned threads, Fn&& fn) {
    threads = resolve_threads(threads);
    if (n <= 0) return;
    if (threads <= 1 || n == 1) {
        for (std::int64_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const unsigned n_workers = static_cast<unsigned>(std::min<std::int64_t>(threads, n));
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (unsigned t = 0; t < n_workers; ++t)
        pool.emplace_back([t, n, n_workers, &fn] {
            for (std::int64_t i = t; i < n; i += n_workers) fn(i);
        });
    for (std::thread& th : pool) th.join();
}

} // namespace cpmri
