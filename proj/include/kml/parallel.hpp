#pragma once

#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace kml {

/// Runs fn(i) for i in [0, count) on up to `jobs` threads. Callers store
/// results by index, so scheduling never affects the output.
inline void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn) {
    if (jobs <= 1 || count < 2) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t workers =
        std::min<std::size_t>({static_cast<std::size_t>(jobs), hw, count});
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < count; i += workers) fn(i);
        });
    for (auto& t : pool) t.join();
}

} // namespace kml
