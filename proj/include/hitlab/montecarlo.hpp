#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "closed_forms.hpp"
#include "error.hpp"
#include "numeric.hpp"
#include "rng.hpp"

namespace hitlab {

struct MCConfig {
    std::size_t n_paths = 10000;
    std::size_t n_steps = 100;
    std::uint64_t seed = 1;
    double t = 0.0;
    double x = 1.0;
    double s = 1.0;
    PolyBoundary f;

    void validate() const
    {
        if (n_paths < 100)
            throw Error(ErrorKind::InvalidArgument, "n_paths must be at least 100");
        if (n_steps < 10)
            throw Error(ErrorKind::InvalidArgument, "n_steps must be at least 10");
        if (!(x > 0.0))
            throw Error(ErrorKind::InvalidArgument, "bridge start x must be positive");
        if (!(s > t))
            throw Error(ErrorKind::InvalidArgument, "horizon s must exceed t");
    }
};

struct MCEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t n_paths = 0;
};

struct BridgePath {
    std::vector<double> times;
    std::vector<double> values;
};

namespace detail {

// Bessel(3) bridge from x at t to 0 at s, as the norm of a 3D Brownian
// bridge from (x, 0, 0) to the origin. Each coordinate follows the exact
// Gaussian bridge recursion, so the marginals carry no discretisation error.
// visit(j, value) is called for j = 0..n_steps.
template <typename Visit>
void walk_bessel3_bridge(const MCConfig& cfg, CounterRng& rng, Visit&& visit)
{
    const double span = cfg.s - cfg.t;
    if (span < 1e-12)
        throw Error(ErrorKind::DegenerateInterval, "bridge interval s - t below 1e-12");
    const std::size_t n = cfg.n_steps;
    const double du = span / static_cast<double>(n);
    std::array<double, 3> c = {cfg.x, 0.0, 0.0};
    visit(std::size_t{0}, cfg.x);
    for (std::size_t j = 0; j + 1 < n; ++j) {
        const double remaining = span - static_cast<double>(j) * du;
        const double keep = (remaining - du) / remaining; // fraction of the gap to 0 left after the step
        const double sd = std::sqrt(du * keep);
        for (double& coord : c)
            coord = coord * keep + sd * rng.normal();
        visit(j + 1, std::sqrt(c[0] * c[0] + c[1] * c[1] + c[2] * c[2]));
    }
    visit(n, 0.0);
}

inline MCEstimate summarize_samples(const std::vector<double>& samples)
{
    MCEstimate est;
    est.n_paths = samples.size();
    if (samples.empty())
        return est;
    const double n = static_cast<double>(samples.size());
    est.mean = compensated_sum(samples) / n;
    CompensatedSum sq;
    for (double v : samples)
        sq.add((v - est.mean) * (v - est.mean));
    const double var = samples.size() > 1 ? sq.value() / (n - 1.0) : 0.0;
    est.std_error = std::sqrt(var / n);
    return est;
}

} // namespace detail

/// One bridge path on the uniform grid of n_steps intervals over [t, s].
inline BridgePath sample_bessel3_bridge(const MCConfig& cfg, CounterRng& rng)
{
    BridgePath path;
    path.times.resize(cfg.n_steps + 1);
    path.values.resize(cfg.n_steps + 1);
    const double du = (cfg.s - cfg.t) / static_cast<double>(cfg.n_steps);
    detail::walk_bessel3_bridge(cfg, rng, [&](std::size_t j, double v) {
        path.times[j] = j == cfg.n_steps ? cfg.s : cfg.t + static_cast<double>(j) * du;
        path.values[j] = v;
    });
    return path;
}

/// Per-path functional exp(-integral_t^s f''(u) X_u du), trapezoid in u.
inline std::vector<double> v_mc_samples(const MCConfig& cfg, unsigned threads = 0)
{
    cfg.validate();
    const std::size_t n = cfg.n_steps;
    const double du = (cfg.s - cfg.t) / static_cast<double>(n);
    std::vector<double> weight(n + 1);
    for (std::size_t j = 0; j <= n; ++j) {
        const double u = j == n ? cfg.s : cfg.t + static_cast<double>(j) * du;
        weight[j] = cfg.f.d2f(u) * du * ((j == 0 || j == n) ? 0.5 : 1.0);
    }

    std::vector<double> samples(cfg.n_paths);
    parallel_for(cfg.n_paths, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t p = begin; p < end; ++p) {
            CounterRng rng(cfg.seed, p);
            double integral = 0.0;
            detail::walk_bessel3_bridge(cfg, rng, [&](std::size_t j, double v) { integral += weight[j] * v; });
            samples[p] = std::exp(-integral);
        }
    });
    return samples;
}

/// v(t, x) = E[exp(-integral_t^s f''(u) X_u du)] over Bessel(3) bridges from
/// x at t to 0 at s. The estimate does not depend on the worker count.
inline MCEstimate v_mc_estimate(const MCConfig& cfg, unsigned threads = 0)
{
    return detail::summarize_samples(v_mc_samples(cfg, threads));
}

struct HittingHistogram {
    std::vector<double> edges;   // bins + 1 edges over [0, horizon]
    std::vector<double> density; // hits per bin / (n_paths * width)
    std::size_t n_paths = 0;
    std::size_t n_hits = 0;

    double hit_fraction() const noexcept
    {
        return n_paths ? static_cast<double>(n_hits) / static_cast<double>(n_paths) : 0.0;
    }
};

/// First passage times of standard Brownian motion from 0 to `level`, one per
/// path, or NaN when the level is not reached by `horizon`. Between grid
/// points a crossing is detected with the Brownian-bridge probability
/// exp(-2 (level - a)(level - b) / dt); the hit is timed at the step midpoint.
inline std::vector<double> first_passage_times(double level, double horizon, double dt, std::size_t n_paths,
                                               std::uint64_t seed, unsigned threads = 0)
{
    if (!(level > 0.0))
        throw Error(ErrorKind::InvalidArgument, "level must be positive");
    if (!(dt > 0.0) || dt > horizon / 100.0 * (1.0 + 1e-12))
        throw Error(ErrorKind::InvalidArgument, "dt must be in (0, horizon/100]");
    const auto steps = static_cast<std::size_t>(std::llround(horizon / dt));
    const double sqrt_dt = std::sqrt(dt);
    constexpr double kNegligible = 46.0; // exp(-46) ~ 1e-20

    std::vector<double> hits(n_paths, std::numeric_limits<double>::quiet_NaN());
    parallel_for(n_paths, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t p = begin; p < end; ++p) {
            CounterRng rng(seed, p);
            double a = 0.0;
            for (std::size_t j = 0; j < steps; ++j) {
                const double b = a + sqrt_dt * rng.normal();
                bool crossed = b >= level;
                if (!crossed) {
                    const double exponent = 2.0 * (level - a) * (level - b) / dt;
                    crossed = exponent < kNegligible && rng.uniform() < std::exp(-exponent);
                }
                if (crossed) {
                    hits[p] = (static_cast<double>(j) + 0.5) * dt;
                    break;
                }
                a = b;
            }
        }
    });
    return hits;
}

inline HittingHistogram hitting_time_histogram(double level, double horizon, double dt, std::size_t n_paths,
                                               std::uint64_t seed, std::size_t bins = 50, unsigned threads = 0)
{
    if (bins == 0)
        throw Error(ErrorKind::InvalidArgument, "histogram needs at least one bin");
    const auto hits = first_passage_times(level, horizon, dt, n_paths, seed, threads);
    HittingHistogram hist;
    hist.n_paths = n_paths;
    hist.edges.resize(bins + 1);
    for (std::size_t b = 0; b <= bins; ++b)
        hist.edges[b] = horizon * static_cast<double>(b) / static_cast<double>(bins);
    std::vector<std::size_t> counts(bins, 0);
    const double width = horizon / static_cast<double>(bins);
    for (double h : hits) {
        if (std::isnan(h))
            continue;
        ++hist.n_hits;
        const auto b = std::min(bins - 1, static_cast<std::size_t>(h / width));
        ++counts[b];
    }
    hist.density.resize(bins);
    for (std::size_t b = 0; b < bins; ++b)
        hist.density[b] = static_cast<double>(counts[b]) / (static_cast<double>(n_paths) * width);
    return hist;
}

/// P(first passage to x by T) = 2 (1 - N(x / sqrt(T))), by reflection.
inline double hitting_probability(double x, double horizon) { return 2.0 * normal_sf(x / std::sqrt(horizon)); }

} // namespace hitlab
