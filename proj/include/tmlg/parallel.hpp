#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace tmlg {

/// Runs f(i) for i in [0, n) on up to `threads` workers. Results must be
/// written to per-index slots so output does not depend on scheduling. If
/// any call throws, the exception from the lowest index is rethrown.
template <typename F>
void parallel_for(std::size_t n, unsigned threads, F&& f) {
    if (n == 0) return;
    unsigned workers = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(n)));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(n);
    auto work = [&] {
        for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
            try {
                f(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers - 1);
        for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
        work();
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

}  // namespace tmlg
