#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace fas {

// Runs work(0..count-1) on up to `jobs` threads (0 means the hardware
// count). Rows are claimed through an atomic counter, so `work` must only
// touch row-local state.
inline void parallel_rows(std::size_t count, int jobs,
                          const std::function<void(std::size_t)>& work) {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    std::size_t nthreads = (jobs > 0) ? static_cast<std::size_t>(jobs) : hw;
    nthreads = std::min<std::size_t>(nthreads, count);
    if (nthreads <= 1) {
        for (std::size_t i = 0; i < count; ++i) work(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (std::size_t k = 0; k < nthreads; ++k)
        pool.emplace_back([&]() {
            for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) work(i);
        });
    for (auto& th : pool) th.join();
}

} // namespace fas
