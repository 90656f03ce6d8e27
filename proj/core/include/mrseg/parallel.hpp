#pragma once

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace mrseg {

// Runs fn(i) for i in [0, n) over `threads` workers. Work items claim
// indices from a shared counter; callers must write results by index so
// the outcome is independent of schedule.
template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    const unsigned workers = std::min<unsigned>(threads, unsigned(n));
    pool.reserve(workers);
    for (unsigned t = 0; t < workers; ++t)
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
        });
    for (auto& th : pool) th.join();
}

}  // namespace mrseg
