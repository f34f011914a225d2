#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace sflam {

namespace detail {
inline std::atomic<std::size_t>& thread_override() {
    static std::atomic<std::size_t> value{0};
    return value;
}

inline bool& inside_worker() {
    thread_local bool flag = false;
    return flag;
}
} // namespace detail

/// Name of the environment variable that sets the worker count.
inline constexpr const char* kThreadsEnv = "SFLAM_THREADS";

/// Worker count: explicit override, else $SFLAM_THREADS, else 1.
inline std::size_t thread_count() {
    if (const auto n = detail::thread_override().load(); n > 0) {
        return n;
    }
    if (const char* env = std::getenv(kThreadsEnv)) {
        try {
            const long n = std::stol(env);
            if (n > 0) {
                return static_cast<std::size_t>(n);
            }
        } catch (const std::exception&) {
        }
    }
    return 1;
}

/// 0 clears the override.
inline void set_thread_count(std::size_t n) { detail::thread_override().store(n); }

/// Runs fn(i) for i in [0, n). Each index is visited exactly once; callers write
/// results into per-index slots so the outcome does not depend on the schedule.
/// The exception from the lowest failing index is rethrown. Nested calls from a
/// worker run serially.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
    const std::size_t workers = detail::inside_worker() ? 1 : std::min(thread_count(), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            fn(i);
        }
        return;
    }

    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                detail::inside_worker() = true;
                for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
                    try {
                        fn(i);
                    } catch (...) {
                        errors[i] = std::current_exception();
                    }
                }
            });
        }
    }
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

} // namespace sflam
