#pragma once

#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace mtjrng {

// Deterministic parallel loop: body(i) must write only to slot i of some
// preallocated output, and must derive any randomness from i alone. Under
// that contract the result is byte-identical for every thread count.
template <typename Body>
void parallel_for(std::size_t n, unsigned n_threads, Body&& body) {
    if (n == 0) return;
    if (n_threads <= 1 || n == 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(n_threads, n));
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::mutex err_mutex;
    std::exception_ptr first_error;
    std::size_t next = 0;
    std::mutex next_mutex;
    const std::size_t chunk = std::max<std::size_t>(1, n / (workers * 8));
    for (unsigned t = 0; t < workers; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                std::size_t begin, end;
                {
                    std::lock_guard lock(next_mutex);
                    if (next >= n) return;
                    begin = next;
                    end = std::min(n, begin + chunk);
                    next = end;
                }
                try {
                    for (std::size_t i = begin; i < end; ++i) body(i);
                } catch (...) {
                    std::lock_guard lock(err_mutex);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

inline unsigned default_thread_count() {
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : hc;
}

} // namespace mtjrng
