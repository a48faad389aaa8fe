#pragma once

// Minimal deterministic parallel_for. Work is split into fixed index chunks
// regardless of thread count, so per-index results never depend on the
// schedule; FKL_THREADS caps the worker count.

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace fkl {

inline int worker_count() {
    unsigned hw = std::thread::hardware_concurrency();
    int n = hw == 0 ? 1 : static_cast<int>(hw);
    if (const char* env = std::getenv("FKL_THREADS")) {
        int cap = std::atoi(env);
        if (cap > 0) n = std::min(n, cap);
    }
    return n;
}

template <class F>
void parallel_for(std::size_t begin, std::size_t end, F&& body) {
    const std::size_t n = end > begin ? end - begin : 0;
    if (n == 0) return;
    int workers = std::min<std::size_t>(worker_count(), n);
    if (workers <= 1) {
        for (std::size_t i = begin; i < end; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::size_t chunk = (n + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        std::size_t lo = begin + w * chunk;
        std::size_t hi = std::min(end, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &body] {
            for (std::size_t i = lo; i < hi; ++i) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace fkl
