#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace relhyper {

inline int resolve_thread_count(int requested) {
    if (requested > 0) return requested;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs fn(0..n_jobs-1) on up to n_threads workers. Jobs must write results
// into pre-assigned slots; with that discipline the outcome is identical to
// sequential execution regardless of scheduling.
inline void run_parallel(std::size_t n_jobs, int n_threads, const std::function<void(std::size_t)>& fn) {
    n_threads = resolve_thread_count(n_threads);
    if (n_threads <= 1 || n_jobs <= 1) {
        for (std::size_t i = 0; i < n_jobs; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto worker = [&]() {
        while (!failed.load(std::memory_order_relaxed)) {
            const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= n_jobs) break;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                failed.store(true, std::memory_order_relaxed);
            }
        }
    };

    std::vector<std::thread> pool;
    const std::size_t count = std::min<std::size_t>(static_cast<std::size_t>(n_threads), n_jobs);
    pool.reserve(count);
    for (std::size_t t = 0; t < count; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace relhyper
