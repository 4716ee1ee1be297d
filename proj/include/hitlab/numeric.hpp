#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <numbers>
#include <span>
#include <string>
#include <thread>
#include <vector>

namespace hitlab {

/// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double value) noexcept
    {
        const double t = sum_ + value;
        if (std::abs(sum_) >= std::abs(value))
            comp_ += (sum_ - t) + value;
        else
            comp_ += (value - t) + sum_;
        sum_ = t;
    }

    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline double compensated_sum(std::span<const double> values) noexcept
{
    CompensatedSum acc;
    for (double v : values)
        acc.add(v);
    return acc.value();
}

/// Standard normal CDF.
inline double normal_cdf(double z) noexcept { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

/// Standard normal upper tail 1 - CDF, accurate far in the tail.
inline double normal_sf(double z) noexcept { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

/// Worker count from HITLAB_THREADS (0 or unset = hardware concurrency).
inline unsigned default_thread_count()
{
    unsigned n = 0;
    if (const char* env = std::getenv("HITLAB_THREADS")) {
        try {
            n = static_cast<unsigned>(std::stoul(env));
        } catch (...) {
            n = 0;
        }
    }
    if (n == 0)
        n = std::max(1u, std::thread::hardware_concurrency());
    return n;
}

/// Runs body(begin, end) over contiguous chunks of [0, count). Results must be
/// written per index by the body so that the outcome is independent of threads.
template <typename Body>
void parallel_for(std::size_t count, unsigned threads, Body&& body)
{
    if (threads == 0)
        threads = default_thread_count();
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
    if (threads <= 1) {
        body(std::size_t{0}, count);
        return;
    }
    std::vector<std::exception_ptr> errors(threads);
    {
        std::vector<std::jthread> workers;
        workers.reserve(threads);
        const std::size_t chunk = (count + threads - 1) / threads;
        for (unsigned w = 0; w < threads; ++w) {
            const std::size_t begin = w * chunk;
            const std::size_t end = std::min(count, begin + chunk);
            if (begin >= end)
                break;
            workers.emplace_back([&body, &errors, w, begin, end] {
                try {
                    body(begin, end);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
    }
    for (const auto& e : errors)
        if (e)
            std::rethrow_exception(e);
}

} // namespace hitlab
