#pragma once

#include <atomic>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace rslab {

// Runs body(i) for i in [0, count). Work is pulled from an atomic counter so
// the schedule is thread-count dependent, but each index writes only its own
// slot; callers aggregate in index order afterwards, which keeps every result
// byte-identical across thread counts. All indices are attempted even after a
// failure so that the reported error is always the one with the smallest
// index, independent of scheduling.
inline void parallel_for(size_t count, int threads, const std::function<void(size_t)>& body) {
    if (count == 0) return;
    if (threads < 1) threads = 1;
    const size_t workers = std::min<size_t>(threads, count);
    if (workers == 1) {
        std::exception_ptr first;
        for (size_t i = 0; i < count; ++i) {
            try {
                body(i);
            } catch (...) {
                if (!first) first = std::current_exception();
            }
        }
        if (first) std::rethrow_exception(first);
        return;
    }

    std::vector<std::exception_ptr> errors(count);
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            while (true) {
                const size_t i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    body(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    for (size_t i = 0; i < count; ++i)
        if (errors[i]) std::rethrow_exception(errors[i]);
}

}  // namespace rslab
