#pragma once

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace spinortheta {

// Worker cap: hardware concurrency, optionally lowered by SPINOR_THETA_THREADS.
inline int worker_count() {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    if (const char* env = std::getenv("SPINOR_THETA_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && v >= 1 && static_cast<unsigned>(v) < hw) hw = static_cast<unsigned>(v);
    }
    return static_cast<int>(hw);
}

// Runs fn(chunk) for chunk = 0..n_chunks-1. Each chunk must write only its own
// output slot; results are then independent of scheduling.
template <typename Fn>
void run_chunked(int n_chunks, Fn&& fn) {
    int workers = std::min(worker_count(), n_chunks);
    if (workers <= 1) {
        for (int i = 0; i < n_chunks; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            while (true) {
                int i = next.fetch_add(1);
                if (i >= n_chunks) break;
                fn(i);
            }
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace spinortheta
