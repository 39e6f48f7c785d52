#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace aecqtl {

/// Worker count: `requested` if positive, else $AECQTL_WORKERS if set and
/// positive, else the hardware concurrency (at least 1).
inline unsigned resolve_workers(int requested) {
    if (requested > 0) {
        return static_cast<unsigned>(requested);
    }
    if (const char* env = std::getenv("AECQTL_WORKERS")) {
        try {
            const int v = std::stoi(env);
            if (v > 0) {
                return static_cast<unsigned>(v);
            }
        } catch (const std::exception&) {
        }
    }
    return std::max(1U, std::thread::hardware_concurrency());
}

/// Calls fn(i) for every i in [0, count), spread over up to `workers`
/// threads. Callers write results by index, so output never depends on
/// scheduling. The first exception thrown by any call is rethrown.
template <class F>
void parallel_for(std::size_t count, unsigned workers, F&& fn) {
    if (workers <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto body = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) {
                return;
            }
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) {
                    error = std::current_exception();
                }
                next.store(count);
            }
        }
    };
    const std::size_t threads = std::min<std::size_t>(workers, count);
    {
        std::vector<std::jthread> pool;
        pool.reserve(threads - 1);
        for (std::size_t t = 1; t < threads; ++t) {
            pool.emplace_back(body);
        }
        body();
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

} // namespace aecqtl
