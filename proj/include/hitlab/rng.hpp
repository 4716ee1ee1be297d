#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace hitlab {

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

/// SplitMix64 output mixer (Steele, Lea & Flood).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Counter-based stream: draw n of stream `stream` under `seed` is
/// mix64(base + n * gamma) with base = mix64(seed ^ mix64(stream * gamma')).
/// Each Monte Carlo path owns the stream numbered by its path index, so a
/// path's draws do not depend on which worker runs it.
class CounterRng {
public:
    using result_type = std::uint64_t;

    CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
        : base_(mix64(seed ^ mix64((stream + 1) * 0xD1B54A32D192ED03ULL)))
    {
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return ~result_type{0}; }

    result_type operator()() noexcept { return mix64(base_ + (++counter_) * kGoldenGamma); }

    /// Uniform on (0, 1], 53-bit resolution.
    double uniform() noexcept { return static_cast<double>(((*this)() >> 11) + 1) * 0x1.0p-53; }

    /// Standard normal by Box-Muller; the second variate is cached.
    double normal() noexcept
    {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double r = std::sqrt(-2.0 * std::log(uniform()));
        const double angle = 2.0 * std::numbers::pi * uniform();
        spare_ = r * std::sin(angle);
        has_spare_ = true;
        return r * std::cos(angle);
    }

    std::uint64_t draws() const noexcept { return counter_; }

private:
    std::uint64_t base_;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace hitlab
