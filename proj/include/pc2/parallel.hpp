#pragma once
// Minimal work-sharing loop. Every index is processed exactly once; callers
// write results into per-index slots so the outcome does not depend on the
// number of workers.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace pc2 {

namespace detail {
inline std::atomic<unsigned>& thread_cap() {
    static std::atomic<unsigned> cap{0};
    return cap;
}
}  // namespace detail

/// Caps the worker count for all parallel loops; 0 restores the default.
inline void set_max_threads(unsigned n) { detail::thread_cap().store(n); }

/// Worker count: explicit cap, else PC2_THREADS, else hardware concurrency.
inline unsigned max_threads() {
    if (unsigned cap = detail::thread_cap().load(); cap > 0) return cap;
    if (const char* env = std::getenv("PC2_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

template <class F>
void parallel_for(std::size_t n, F&& fn) {
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(max_threads(), n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mu;
    auto body = [&] {
        try {
            for (std::size_t i = next++; i < n; i = next++) fn(i);
        } catch (...) {
            std::lock_guard lock(error_mu);
            if (!error) error = std::current_exception();
            next = n;
        }
    };
    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(body);
    body();
    pool.clear();
    if (error) std::rethrow_exception(error);
}

}  // namespace pc2
