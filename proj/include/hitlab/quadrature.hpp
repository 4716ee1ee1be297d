#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <algorithm>
#include <string>
#include <vector>

#include "error.hpp"

namespace hitlab {

struct QuadratureOptions {
    double abs_tol = 1e-10;
    int max_depth = 50; // bisection levels below the initial interval
};

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
    int evaluations = 0;
};

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15).
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000,
};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
};
// Gauss weights for the odd-indexed Kronrod nodes 1, 3, 5 and the centre.
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
};

struct Segment {
    double a, b, value, error, abs_value;
    int depth;
};

template <typename F>
Segment kronrod15(F& fn, double a, double b, int depth)
{
    const double centre = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = fn(centre);
    double kronrod = fc * kKronrodWeights[7];
    double gauss = fc * kGaussWeights[3];
    double abs_sum = std::abs(fc) * kKronrodWeights[7];
    for (std::size_t j = 0; j < 7; ++j) {
        const double dx = half * kKronrodNodes[j];
        const double lo = fn(centre - dx);
        const double hi = fn(centre + dx);
        const double pair = lo + hi;
        kronrod += kKronrodWeights[j] * pair;
        abs_sum += kKronrodWeights[j] * (std::abs(lo) + std::abs(hi));
        if (j % 2 == 1)
            gauss += kGaussWeights[j / 2] * pair;
    }
    const double value = kronrod * half;
    const double error = std::abs((kronrod - gauss) * half);
    return {a, b, value, error, std::abs(abs_sum * half), depth};
}

} // namespace detail

/// Globally adaptive Gauss-Kronrod (7/15) integration of fn over [a, b].
///
/// The segment with the largest error estimate is bisected until the summed
/// estimate drops below abs_tol, or below a rounding floor relative to the
/// integral of |fn|. Splitting a segment beyond max_depth raises
/// QuadratureFailure. Reversed limits integrate with the opposite sign.
template <typename F>
QuadratureResult integrate(F&& fn, double a, double b, const QuadratureOptions& opts = {})
{
    if (!std::isfinite(a) || !std::isfinite(b))
        throw Error(ErrorKind::InvalidArgument, "integration limits must be finite");
    if (a == b)
        return {};
    double sign = 1.0;
    if (b < a) {
        std::swap(a, b);
        sign = -1.0;
    }

    int evaluations = 0;
    auto counted = [&](double x) {
        ++evaluations;
        return fn(x);
    };

    std::vector<detail::Segment> segments{detail::kronrod15(counted, a, b, 0)};
    double total = 0.0, total_error = 0.0, magnitude = 0.0;
    auto update_totals = [&] {
        total = total_error = magnitude = 0.0;
        for (const auto& seg : segments) {
            total += seg.value;
            total_error += seg.error;
            magnitude += seg.abs_value;
        }
    };

    constexpr double eps = std::numeric_limits<double>::epsilon();
    update_totals();
    if (!std::isfinite(total) || !std::isfinite(total_error))
        throw Error(ErrorKind::QuadratureFailure, "non-finite integrand");
    // Below this the estimate is rounding noise, whatever abs_tol asks for.
    while (total_error > opts.abs_tol && total_error > 50.0 * eps * magnitude) {
        auto worst = std::max_element(segments.begin(), segments.end(),
                                      [](const auto& l, const auto& r) { return l.error < r.error; });
        if (worst->depth >= opts.max_depth)
            throw Error(ErrorKind::QuadratureFailure,
                        "tolerance " + std::to_string(opts.abs_tol) + " not reached after " +
                            std::to_string(opts.max_depth) + " subdivision levels on [" + std::to_string(a) +
                            ", " + std::to_string(b) + "]");
        const detail::Segment parent = *worst;
        const double mid = 0.5 * (parent.a + parent.b);
        *worst = detail::kronrod15(counted, parent.a, mid, parent.depth + 1);
        segments.push_back(detail::kronrod15(counted, mid, parent.b, parent.depth + 1));
        update_totals();
        if (!std::isfinite(total) || !std::isfinite(total_error))
            throw Error(ErrorKind::QuadratureFailure, "non-finite integrand");
    }
    return {sign * total, total_error, evaluations};
}

} // namespace hitlab
