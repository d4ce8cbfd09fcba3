#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace curvecast {

/// Runs body(i) for i in [0, count) on up to `threads` workers. Tasks must be
/// independent; any per-task randomness has to come from seeds derived from
/// the task index so the outcome does not depend on scheduling. If tasks
/// throw, the exception with the smallest task index is rethrown after all
/// workers have joined.
inline void parallel_for(std::size_t count, int threads,
                         const std::function<void(std::size_t)>& body) {
    if (count == 0) return;
    const std::size_t workers =
        std::min<std::size_t>(count, threads < 1 ? 1 : static_cast<std::size_t>(threads));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }

    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                body(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

}  // namespace curvecast
