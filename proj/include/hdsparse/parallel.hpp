#pragma once
#include <hdsparse/common.hpp>

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace hdsparse {

/**
 * Calls f(i) for i in [0, n) on up to `workers` threads. Tasks are pulled
 * from a shared counter; f must write only to slot i of its outputs. The
 * first exception thrown by any task is rethrown after all threads join.
 */
template <typename F>
void parallel_for(Index n, int workers, F&& f)
{
    const int w = static_cast<int>(std::clamp<Index>(workers, 1, std::max<Index>(n, 1)));
    if (w <= 1) {
        for (Index i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<Index> next{0};
    std::exception_ptr err;
    std::mutex mu;
    auto run = [&] {
        for (;;) {
            const Index i = next.fetch_add(1);
            if (i >= n) return;
            try {
                f(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(mu);
                if (!err) err = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(w));
    for (int t = 0; t < w; ++t) pool.emplace_back(run);
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

} // namespace hdsparse
