#ifndef DGT_PARALLEL_HPP
#define DGT_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace dgt {

// Index-parallel loop over independent work items; results keyed by index
// stay deterministic regardless of scheduling. jobs <= 1 runs inline.
inline void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& body) {
    if (jobs <= 1 || n <= 1) {
        for (std::size_t k = 0; k < n; ++k) body(k);
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    const std::size_t workers = std::min(static_cast<std::size_t>(jobs), n);
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t k = next.fetch_add(1); k < n; k = next.fetch_add(1)) body(k);
        });
    for (auto& t : pool) t.join();
}

} // namespace dgt

#endif
