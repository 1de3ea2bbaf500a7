#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace ebi {

/// Worker count: hardware concurrency capped by the EBINDEX_THREADS variable.
inline int thread_budget() {
    int n = static_cast<int>(std::thread::hardware_concurrency());
    if (n < 1) n = 1;
    if (const char* env = std::getenv("EBINDEX_THREADS")) {
        const int cap = std::atoi(env);
        if (cap >= 1) n = std::min(n, cap);
    }
    return n;
}

/// Runs fn(i) for i in [0, count) across the thread budget. Callers write
/// results into index-addressed slots, so output ordering is deterministic.
inline void parallel_for(int count, const std::function<void(int)>& fn) {
    const int workers = std::min(thread_budget(), std::max(1, count));
    if (workers == 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&]() {
            while (true) {
                const int i = next.fetch_add(1);
                if (i >= count) break;
                fn(i);
            }
        });
    for (auto& t : pool) t.join();
}

}  // namespace ebi
