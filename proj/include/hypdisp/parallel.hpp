#pragma once

#include <atomic>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace hypdisp {

// HYPDISP_THREADS overrides hardware concurrency; 0 or unset means auto.
inline int worker_count() {
    if (const char* env = std::getenv("HYPDISP_THREADS")) {
        int n = std::atoi(env);
        if (n > 0) return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

// Index-sharded loop. Deterministic: shard i handles indices i, i+P, i+2P, ...
// so results must be written by index, never appended.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                         int workers = 0) {
    if (workers <= 0) workers = worker_count();
    if (workers <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
            for (std::size_t i = static_cast<std::size_t>(w); i < n;
                 i += static_cast<std::size_t>(workers))
                body(i);
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace hypdisp
