#pragma once

#include <atomic>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace twistor {

inline int default_jobs() {
    const unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : int(n);
}

// Runs task(strip) for strip = 0 .. strips-1 on up to `jobs` threads.
// Strips are claimed dynamically but their identity is fixed, so results
// keyed by strip index are identical at any job count.
inline void parallel_strips(int strips, int jobs, const std::function<void(int)>& task) {
    if (jobs <= 1 || strips <= 1) {
        for (int s = 0; s < strips; ++s) task(s);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr first_error;
    std::mutex error_mutex;
    const int workers = std::min(jobs, strips);
    pool.reserve(std::size_t(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            for (;;) {
                const int s = next.fetch_add(1);
                if (s >= strips) return;
                try {
                    task(s);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace twistor
