#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace sscd {

/// Runs fn(i) for i in [0, count) over at most `threads` workers with static
/// contiguous chunks. fn must only write state owned by index i. The first
/// exception thrown by any worker is rethrown on the caller.
template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
    const std::size_t workers = std::min<std::size_t>(std::max(1u, threads), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (count + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(count, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&, begin, end] {
            try {
                for (std::size_t i = begin; i < end; ++i) fn(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        });
    }
    pool.clear();
    if (failure) std::rethrow_exception(failure);
}

/// Hardware concurrency with a floor of one.
inline unsigned default_threads() noexcept { return std::max(1u, std::thread::hardware_concurrency()); }

}  // namespace sscd
