#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "closed_forms.hpp"
#include "error.hpp"
#include "quadrature.hpp"

// Potential-system transformation. With L u = u_t + 1/2 u_xx - V1 u and its
// adjoint, Phi L u - u L* Phi = d/dt(Phi u) + d/dx(1/2 (Phi u_x - Phi_x u)).
// The potential v1 has v1_x = Phi u1 and v1_t = -1/2 (Phi u1_x - Phi_x u1);
// w = v1 / Phi solves the backward equation with V2 = V1 - d^2/dx^2 log Phi.

namespace hitlab {

enum class B2Mode {
    Ode,  // B2 integrated from its ODE, starting at b2_at_zero
    Zero, // B2 held at 0 for every t
};

struct TransformConfig {
    PhiParams phi;
    U1Params u1;
    double k = 0.0;
    double b2_at_zero = 0.0;
    B2Mode b2_mode = B2Mode::Ode;
    QuadratureOptions quadrature;
};

/// Conserved density and spatial flux of the conservation law.
struct FluxPair {
    double ft = 0.0;
    double fx = 0.0;
};

inline FluxPair flux(const TransformConfig& cfg, double t, double x)
{
    const double u = u1_eval(cfg.u1, t, x);
    const double du = u1_dx(cfg.u1, t, x);
    const double phi = phi_eval(cfg.phi, t, x);
    const double dphi = phi_dx(cfg.phi, t, x);
    return {phi * u, 0.5 * (phi * du - dphi * u)};
}

/// dB2/dt = 1/2 (Phi_x u1 - Phi u1_x) at x = k, i.e. minus the flux there.
inline double b2_rate(const TransformConfig& cfg, double t) { return -flux(cfg, t, cfg.k).fx; }

namespace detail {

// One RK4 step of an ODE whose right-hand side depends on t only.
inline double b2_step(const TransformConfig& cfg, double t, double h, double rate_at_t)
{
    return h / 6.0 * (rate_at_t + 4.0 * b2_rate(cfg, t + 0.5 * h) + b2_rate(cfg, t + h));
}

} // namespace detail

/// Integrates the B2 ODE with RK4 over the given grid (one step per interval).
/// The grid must start at 0 and increase strictly.
inline std::vector<double> b2_solve(const TransformConfig& cfg, std::span<const double> t_grid)
{
    if (t_grid.empty() || t_grid.front() != 0.0)
        throw Error(ErrorKind::InvalidArgument, "B2 time grid must start at 0");
    for (std::size_t i = 1; i < t_grid.size(); ++i)
        if (!(t_grid[i] > t_grid[i - 1]))
            throw Error(ErrorKind::UnsortedGrid, "B2 time grid must be strictly increasing");

    std::vector<double> out(t_grid.size());
    out[0] = cfg.b2_at_zero;
    double rate = b2_rate(cfg, 0.0);
    for (std::size_t i = 1; i < t_grid.size(); ++i) {
        const double h = t_grid[i] - t_grid[i - 1];
        out[i] = out[i - 1] + detail::b2_step(cfg, t_grid[i - 1], h, rate);
        rate = b2_rate(cfg, t_grid[i]);
    }
    return out;
}

/// B2 on a uniform table [0, t_end], evaluable at any t in between by one
/// partial RK4 step from the nearest node below. Honours B2Mode::Zero.
class B2Table {
public:
    B2Table() = default;

    B2Table(const TransformConfig& cfg, double t_end, double step = 1e-3) : cfg_(cfg), step_(step)
    {
        if (!(step > 0.0))
            throw Error(ErrorKind::InvalidArgument, "B2 table step must be positive");
        if (cfg.b2_mode == B2Mode::Zero || t_end <= 0.0) {
            nodes_ = {cfg.b2_mode == B2Mode::Zero ? 0.0 : cfg.b2_at_zero};
            rates_ = {cfg.b2_mode == B2Mode::Zero ? 0.0 : b2_rate(cfg, 0.0)};
            return;
        }
        const auto n = static_cast<std::size_t>(std::floor(t_end / step + 1e-9));
        std::vector<double> grid(n + 1);
        for (std::size_t i = 0; i <= n; ++i)
            grid[i] = static_cast<double>(i) * step;
        nodes_ = b2_solve(cfg, grid);
        rates_.resize(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i)
            rates_[i] = b2_rate(cfg, grid[i]);
    }

    double at(double t) const
    {
        if (cfg_.b2_mode == B2Mode::Zero)
            return 0.0;
        if (t < 0.0)
            throw Error(ErrorKind::InvalidArgument, "B2 requested before t = 0");
        auto i = static_cast<std::size_t>(std::floor(t / step_));
        i = std::min(i, nodes_.size() - 1);
        const double t_node = static_cast<double>(i) * step_;
        const double h = t - t_node;
        if (h == 0.0)
            return nodes_[i];
        return nodes_[i] + detail::b2_step(cfg_, t_node, h, rates_[i]);
    }

private:
    TransformConfig cfg_;
    double step_ = 1e-3;
    std::vector<double> nodes_{0.0};
    std::vector<double> rates_{0.0};
};

/// w(t, x) = [integral_k^x u1 Phi dxi + B2(t)] / Phi(t, x).
inline double w_eval(const TransformConfig& cfg, double t, double x, double b2_at_t)
{
    auto integrand = [&](double xi) { return u1_eval(cfg.u1, t, xi) * phi_eval(cfg.phi, t, xi); };
    const double integral = integrate(integrand, cfg.k, x, cfg.quadrature).value;
    return (integral + b2_at_t) / phi_eval(cfg.phi, t, x);
}

/// The transformed solution as a field of (t, x), for t in [0, t_end].
class TransformedField {
public:
    TransformedField(TransformConfig cfg, double t_end, double b2_step = 1e-3)
        : cfg_(std::move(cfg)), b2_(cfg_, t_end, b2_step)
    {
    }

    double operator()(double t, double x) const { return w_eval(cfg_, t, x, b2_.at(t)); }
    double b2(double t) const { return b2_.at(t); }
    const TransformConfig& config() const noexcept { return cfg_; }

private:
    TransformConfig cfg_;
    B2Table b2_;
};

/// Transformed potential for the exponential adjoint family: log Phi is
/// affine in x, so V2 equals V1 = x f''(t) exactly.
inline double v2_potential(const PhiParams& phi, double t, double x)
{
    return x * phi.f.d2f(t);
}

/// V2 = V1 - 2 D d^2/dx^2 log Phi by central differences, for any positive
/// field. D = 1/2 is the library's diffusion coefficient.
template <typename Field>
double v2_potential_fd(const PolyBoundary& f, Field&& phi, double t, double x, double dx, double diffusion = 0.5)
{
    const double lo = phi(t, x - dx);
    const double mid = phi(t, x);
    const double hi = phi(t, x + dx);
    if (!(lo > 0.0 && mid > 0.0 && hi > 0.0))
        throw Error(ErrorKind::NonpositiveField, "log Phi needs Phi > 0 near x=" + std::to_string(x));
    const double curvature = (std::log(hi) - 2.0 * std::log(mid) + std::log(lo)) / (dx * dx);
    return x * f.d2f(t) - 2.0 * diffusion * curvature;
}

/// v = w / h(s - t, x).
inline double v_from_w(double w, double t, double x, double s)
{
    if (!(x > 0.0) || !(t < s))
        throw Error(ErrorKind::ZeroDenominator,
                    "h(s-t, x) vanishes or is undefined at t=" + std::to_string(t) + " x=" + std::to_string(x));
    return w / hitting_density(s - t, x);
}

} // namespace hitlab
