#pragma once

#include <atomic>
#include <cstdlib>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace perclab {

// --jobs default: PERCLAB_JOBS env var, else hardware concurrency.
inline int default_jobs() {
    if (const char* env = std::getenv("PERCLAB_JOBS")) {
        const int j = std::atoi(env);
        if (j > 0) return j;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? int(hc) : 1;
}

// Run fn(block) for block = 0..n_blocks-1 on up to `jobs` threads. Workers
// pull blocks from an atomic counter; callers store per-block results and
// reduce in block order afterwards, so outputs do not depend on the number
// of threads. Exceptions propagate from the first failing block.
inline void parallel_blocks(std::size_t n_blocks,
                            const std::function<void(std::size_t)>& fn,
                            int jobs = default_jobs()) {
    if (n_blocks == 0) return;
    if (jobs <= 1 || n_blocks == 1) {
        for (std::size_t b = 0; b < n_blocks; ++b) fn(b);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr err;
    std::mutex err_mutex;
    auto worker = [&] {
        while (!failed.load(std::memory_order_relaxed)) {
            const std::size_t b = next.fetch_add(1);
            if (b >= n_blocks) return;
            try {
                fn(b);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!err) err = std::current_exception();
                failed = true;
                return;
            }
        }
    };
    std::vector<std::thread> threads;
    const int nt = int(std::min<std::size_t>(std::size_t(jobs), n_blocks));
    threads.reserve(std::size_t(nt));
    for (int t = 0; t < nt; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    if (err) std::rethrow_exception(err);
}

// Split `n_items` into fixed-size blocks (independent of thread count) and
// run body(begin, end, block) in parallel.
inline void parallel_chunks(std::size_t n_items, std::size_t chunk,
                            const std::function<void(std::size_t, std::size_t,
                                                     std::size_t)>& body,
                            int jobs = default_jobs()) {
    if (n_items == 0) return;
    const std::size_t n_blocks = (n_items + chunk - 1) / chunk;
    parallel_blocks(
        n_blocks,
        [&](std::size_t b) {
            const std::size_t lo = b * chunk;
            const std::size_t hi = std::min(n_items, lo + chunk);
            body(lo, hi, b);
        },
        jobs);
}

}  // namespace perclab
