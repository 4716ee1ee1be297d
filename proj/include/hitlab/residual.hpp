#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "closed_forms.hpp"
#include "error.hpp"
#include "numeric.hpp"
#include "transform.hpp"

namespace hitlab {

/// Uniform space-time lattice, nt x nx nodes including the edges.
struct Grid {
    double t0 = 0.0, t1 = 1.0, x0 = 0.0, x1 = 1.0;
    std::size_t nt = 3, nx = 3;

    void validate() const
    {
        if (nt < 3 || nx < 3)
            throw Error(ErrorKind::GridTooSmall, "grid too small: need nt, nx >= 3");
        if (!(t1 > t0) || !(x1 > x0))
            throw Error(ErrorKind::InvalidArgument, "grid needs t1 > t0 and x1 > x0");
    }

    double dt() const noexcept { return (t1 - t0) / static_cast<double>(nt - 1); }
    double dx() const noexcept { return (x1 - x0) / static_cast<double>(nx - 1); }
    double t(std::size_t i) const noexcept { return t0 + static_cast<double>(i) * dt(); }
    double x(std::size_t j) const noexcept { return x0 + static_cast<double>(j) * dx(); }
    std::size_t size() const noexcept { return nt * nx; }

    /// Same extent with both steps halved; node (i, j) here is (2i, 2j) there.
    Grid halved() const { return {t0, t1, x0, x1, 2 * nt - 1, 2 * nx - 1}; }

    bool operator==(const Grid&) const = default;
};

/// Window over [0, s] x [0, x_max] shrunk by 5% of each span, which keeps
/// clear of x = 0 and t = s.
inline Grid verification_window(double s, double x_max = 3.0, std::size_t nt = 101, std::size_t nx = 101)
{
    return {0.05 * s, 0.95 * s, 0.05 * x_max, 0.95 * x_max, nt, nx};
}

struct ResidualReport {
    double max_abs = 0.0;
    double l2 = 0.0; // root-mean-square over the points checked
    std::optional<double> convergence_ratio;
};

/// Order-2 convergence under step halving, or a residual at rounding level.
inline bool converged(const ResidualReport& r, double floor = 1e-9)
{
    if (r.max_abs <= floor)
        return true;
    return r.convergence_ratio && *r.convergence_ratio >= 3.5 && *r.convergence_ratio <= 4.5;
}

/// A verification subject: either a pure function of (t, x) or samples on a
/// grid, stored row-major with t as the outer index.
class ScalarField {
public:
    using Function = std::function<double(double, double)>;

    static ScalarField function(Function fn)
    {
        ScalarField f;
        f.fn_ = std::move(fn);
        return f;
    }

    static ScalarField samples(Grid grid, std::vector<double> values)
    {
        grid.validate();
        if (values.size() != grid.size())
            throw Error(ErrorKind::InvalidArgument, "sample count does not match the grid");
        ScalarField f;
        f.grid_ = grid;
        f.values_ = std::move(values);
        return f;
    }

    bool is_sampled() const noexcept { return !fn_; }
    const Grid& grid() const noexcept { return grid_; }

    double operator()(double t, double x) const
    {
        if (!fn_)
            throw Error(ErrorKind::InvalidArgument, "sampled field cannot be evaluated off its grid");
        return fn_(t, x);
    }

    /// Values on g; rows are evaluated in parallel, each node independently.
    std::vector<double> sample(const Grid& g, unsigned threads = 0) const
    {
        if (!fn_) {
            if (!(g == grid_))
                throw Error(ErrorKind::InvalidArgument, "sampled field requested on a different grid");
            return values_;
        }
        std::vector<double> out(g.size());
        parallel_for(g.nt, threads, [&](std::size_t begin, std::size_t end) {
            for (std::size_t i = begin; i < end; ++i)
                for (std::size_t j = 0; j < g.nx; ++j)
                    out[i * g.nx + j] = fn_(g.t(i), g.x(j));
        });
        return out;
    }

private:
    Function fn_;
    Grid grid_;
    std::vector<double> values_;
};

/// R[u] = time_coeff u_t + diffusion_coeff u_xx + potential(t, x) u.
struct LinearOperator {
    double time_coeff = 0.0;
    double diffusion_coeff = 0.0;
    std::function<double(double, double)> potential;
};

/// -u_t + x f'' u - 1/2 u_xx (zero for solutions of the backward equation).
inline LinearOperator backward_operator(const PolyBoundary& f)
{
    return {-1.0, -0.5, [f](double t, double x) { return x * f.d2f(t); }};
}

/// -Phi_t + 1/2 Phi_xx - x f'' Phi.
inline LinearOperator adjoint_operator(const PolyBoundary& f)
{
    return {-1.0, 0.5, [f](double t, double x) { return -x * f.d2f(t); }};
}

/// w_tau - 1/2 w_xx, with the time slot read as tau.
inline LinearOperator heat_operator() { return {1.0, -0.5, nullptr}; }

namespace detail {

inline ResidualReport summarize(std::span<const double> residuals)
{
    ResidualReport r;
    CompensatedSum sq;
    for (double v : residuals) {
        r.max_abs = std::max(r.max_abs, std::abs(v));
        sq.add(v * v);
    }
    r.l2 = residuals.empty() ? 0.0 : std::sqrt(sq.value() / static_cast<double>(residuals.size()));
    return r;
}

// Interior nodes whose indices are multiples of stride, excluding the outer
// stride-wide frame. stride = 2 on a halved grid gives the coarse interior.
template <typename PointResidual>
std::vector<double> interior_residuals(const Grid& g, std::size_t stride, PointResidual&& point)
{
    std::vector<double> out;
    for (std::size_t i = stride; i + stride < g.nt; i += stride)
        for (std::size_t j = stride; j + stride < g.nx; j += stride)
            out.push_back(point(i, j));
    return out;
}

inline std::vector<double> operator_residuals(std::span<const double> u, const Grid& g, const LinearOperator& op,
                                              std::size_t stride)
{
    const double dt = g.dt(), dx = g.dx();
    return interior_residuals(g, stride, [&](std::size_t i, std::size_t j) {
        const double c = u[i * g.nx + j];
        const double ut = (u[(i + 1) * g.nx + j] - u[(i - 1) * g.nx + j]) / (2.0 * dt);
        const double uxx = (u[i * g.nx + j + 1] - 2.0 * c + u[i * g.nx + j - 1]) / (dx * dx);
        const double pot = op.potential ? op.potential(g.t(i), g.x(j)) : 0.0;
        return op.time_coeff * ut + op.diffusion_coeff * uxx + pot * c;
    });
}

inline std::vector<double> divergence_residuals(std::span<const double> ft, std::span<const double> fx, const Grid& g,
                                                std::size_t stride)
{
    const double dt = g.dt(), dx = g.dx();
    return interior_residuals(g, stride, [&](std::size_t i, std::size_t j) {
        const double dft = (ft[(i + 1) * g.nx + j] - ft[(i - 1) * g.nx + j]) / (2.0 * dt);
        const double dfx = (fx[i * g.nx + j + 1] - fx[i * g.nx + j - 1]) / (2.0 * dx);
        return dft + dfx;
    });
}

inline std::optional<double> ratio(double coarse, double fine)
{
    if (!(fine > 0.0))
        return std::nullopt;
    return coarse / fine;
}

} // namespace detail

/// Residual of a linear operator on the interior of g. For function fields the
/// halved grid is also evaluated and compared at the nodes the two grids share.
inline ResidualReport operator_residual(const ScalarField& u, const LinearOperator& op, const Grid& g,
                                        unsigned threads = 0)
{
    g.validate();
    const auto coarse = u.sample(g, threads);
    ResidualReport report = detail::summarize(detail::operator_residuals(coarse, g, op, 1));
    if (!u.is_sampled()) {
        const Grid fine = g.halved();
        const auto values = u.sample(fine, threads);
        const auto fine_report = detail::summarize(detail::operator_residuals(values, fine, op, 2));
        report.convergence_ratio = detail::ratio(report.max_abs, fine_report.max_abs);
    }
    return report;
}

inline ResidualReport residual_backward(const ScalarField& u, const PolyBoundary& f, const Grid& g,
                                        unsigned threads = 0)
{
    return operator_residual(u, backward_operator(f), g, threads);
}

inline ResidualReport residual_adjoint(const ScalarField& phi, const PolyBoundary& f, const Grid& g,
                                       unsigned threads = 0)
{
    return operator_residual(phi, adjoint_operator(f), g, threads);
}

/// Heat residual with the grid's t axis read as tau.
inline ResidualReport residual_heat(const ScalarField& omega, const Grid& g, unsigned threads = 0)
{
    return operator_residual(omega, heat_operator(), g, threads);
}

/// Pointwise central-difference residual at scattered points, steps h and
/// h/2; the report takes the maximum over the points at each step.
inline ResidualReport residual_at_points(const ScalarField::Function& fn, const LinearOperator& op,
                                         std::span<const std::pair<double, double>> points, double step)
{
    auto at_step = [&](double h) {
        std::vector<double> r;
        r.reserve(points.size());
        for (const auto& [t, x] : points) {
            const double c = fn(t, x);
            const double ut = (fn(t + h, x) - fn(t - h, x)) / (2.0 * h);
            const double uxx = (fn(t, x + h) - 2.0 * c + fn(t, x - h)) / (h * h);
            const double pot = op.potential ? op.potential(t, x) : 0.0;
            r.push_back(op.time_coeff * ut + op.diffusion_coeff * uxx + pot * c);
        }
        return detail::summarize(r);
    };
    ResidualReport report = at_step(step);
    report.convergence_ratio = detail::ratio(report.max_abs, at_step(0.5 * step).max_abs);
    return report;
}

/// d/dt (Phi u1) + d/dx (1/2 (Phi u1_x - Phi_x u1)) on the interior of g.
inline ResidualReport conservation_check(const TransformConfig& cfg, const Grid& g, unsigned threads = 0)
{
    g.validate();
    auto sample = [&](const Grid& grid) {
        std::vector<double> ft(grid.size()), fx(grid.size());
        parallel_for(grid.nt, threads, [&](std::size_t begin, std::size_t end) {
            for (std::size_t i = begin; i < end; ++i)
                for (std::size_t j = 0; j < grid.nx; ++j) {
                    const auto p = flux(cfg, grid.t(i), grid.x(j));
                    ft[i * grid.nx + j] = p.ft;
                    fx[i * grid.nx + j] = p.fx;
                }
        });
        return std::pair{std::move(ft), std::move(fx)};
    };
    const auto [ft, fx] = sample(g);
    ResidualReport report = detail::summarize(detail::divergence_residuals(ft, fx, g, 1));
    const Grid fine = g.halved();
    const auto [ft2, fx2] = sample(fine);
    report.convergence_ratio =
        detail::ratio(report.max_abs, detail::summarize(detail::divergence_residuals(ft2, fx2, fine, 2)).max_abs);
    return report;
}

struct BoundViolation {
    double t = 0.0, x = 0.0, w = 0.0, h = 0.0;
};

struct BoundReport {
    bool skipped = false;
    std::string reason;
    std::size_t points_checked = 0;
    std::vector<BoundViolation> violations;

    bool passed() const noexcept { return !skipped && violations.empty(); }
};

inline constexpr double kBoundTolerance = 1e-9 + 1e-10;

/// Flags nodes of g (restricted to t < s, x > 0) where w < -tol or
/// w > h(s - t, x) + tol.
inline BoundReport bound_check_field(const ScalarField& w, double s, const Grid& g, double tol = kBoundTolerance,
                                     unsigned threads = 0)
{
    g.validate();
    const auto values = w.sample(g, threads);
    BoundReport report;
    for (std::size_t i = 0; i < g.nt; ++i) {
        const double t = g.t(i);
        if (!(t < s))
            continue;
        for (std::size_t j = 0; j < g.nx; ++j) {
            const double x = g.x(j);
            if (!(x > 0.0))
                continue;
            ++report.points_checked;
            const double wv = values[i * g.nx + j];
            const double h = hitting_density(s - t, x);
            if (!(wv >= -tol) || !(wv <= h + tol))
                report.violations.push_back({t, x, wv, h});
        }
    }
    return report;
}

/// True when f'' >= 0 on [0, s], checked on a dense sample including the ends.
inline bool convex_on(const PolyBoundary& f, double s, std::size_t samples = 2001)
{
    for (std::size_t i = 0; i < samples; ++i) {
        const double t = s * static_cast<double>(i) / static_cast<double>(samples - 1);
        if (f.d2f(t) < 0.0)
            return false;
    }
    return true;
}

/// 0 <= w <= h(s - t, x) for the transformed solution of cfg. Only meaningful
/// when f'' >= 0 on [0, s]; otherwise the check is skipped.
inline BoundReport bound_check(const TransformConfig& cfg, double s, const Grid& g, unsigned threads = 0)
{
    g.validate();
    if (!convex_on(cfg.u1.f, s) || !convex_on(cfg.phi.f, s)) {
        BoundReport report;
        report.skipped = true;
        report.reason = "skipped: precondition f''>=0 not met";
        return report;
    }
    const TransformedField w(cfg, std::min(g.t1, s));
    return bound_check_field(ScalarField::function([&w](double t, double x) { return w(t, x); }), s, g,
                             kBoundTolerance, threads);
}

enum class BoundaryMode { T0Only, AllT };

struct BoundaryLimitReport {
    BoundaryMode mode = BoundaryMode::T0Only;
    bool pass = false;
    double min_slope = 0.0;
    std::vector<std::pair<double, double>> slopes; // (t, fitted slope)
};

/// Least-squares slope of log|w| against log x at x = 2^-1 .. 2^-10. Passes
/// when every slope is at least 0.9 (linear or faster vanishing at x = 0).
/// T0Only looks at t = 0; AllT at every entry of t_values.
inline BoundaryLimitReport boundary_limit_check(const ScalarField::Function& w, BoundaryMode mode,
                                                std::span<const double> t_values = {})
{
    BoundaryLimitReport report;
    report.mode = mode;
    std::vector<double> times;
    if (mode == BoundaryMode::T0Only)
        times = {0.0};
    else
        times.assign(t_values.begin(), t_values.end());
    if (times.empty())
        throw Error(ErrorKind::InvalidArgument, "boundary limit check needs at least one time");

    report.min_slope = std::numeric_limits<double>::infinity();
    for (double t : times) {
        double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
        constexpr int n = 10;
        for (int i = 1; i <= n; ++i) {
            const double x = std::ldexp(1.0, -i);
            const double lx = std::log(x);
            const double ly = std::log(std::max(std::abs(w(t, x)), std::numeric_limits<double>::min()));
            sx += lx;
            sy += ly;
            sxx += lx * lx;
            sxy += lx * ly;
        }
        const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        report.slopes.emplace_back(t, slope);
        report.min_slope = std::min(report.min_slope, slope);
    }
    report.pass = report.min_slope >= 0.9;
    return report;
}

} // namespace hitlab
