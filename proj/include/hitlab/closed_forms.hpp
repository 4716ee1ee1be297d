#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <variant>

#include "error.hpp"
#include "poly_boundary.hpp"

// Closed-form solutions for the potential V1(t, x) = x f''(t).
//
// Diffusion coefficient 1/2 throughout:
//   heat      w_tau = 1/2 w_xx
//   backward  u_t + 1/2 u_xx - x f'' u = 0
//   adjoint  -Phi_t + 1/2 Phi_xx - x f'' Phi = 0

namespace hitlab {

/// omega(tau, x) = exp(1/2 mu^2 tau + sign mu x).
struct ExponentialOmega {
    double mu = 0.0;
    int sign = 1;
};

/// omega(tau, x) = G(tau, x - y), the heat kernel centred at y.
struct GaussOmega {
    double y = 0.0;
};

/// omega = d/dx [G(tau, x - y) - G(tau, x + y)] / (2y): spatial derivative of
/// the normalised image pair. Its antiderivative from 0 vanishes at x = 0, and
/// y = 0 selects the dipole limit, whose antiderivative is h(tau, x) exactly.
struct ImagesOmega {
    double y = 0.0;
};

using OmegaKind = std::variant<ExponentialOmega, GaussOmega, ImagesOmega>;

inline bool needs_positive_tau(const OmegaKind& kind) noexcept
{
    return !std::holds_alternative<ExponentialOmega>(kind);
}

namespace detail {

inline double gauss_kernel(double tau, double z) noexcept
{
    return std::exp(-z * z / (2.0 * tau)) / std::sqrt(2.0 * std::numbers::pi * tau);
}

// d^n/dz^n of the heat kernel, n = 0..4.
inline double gauss_kernel_d(double tau, double z, int n) noexcept
{
    const double g = gauss_kernel(tau, z);
    const double u = z / tau;
    switch (n) {
    case 0: return g;
    case 1: return -u * g;
    case 2: return (u * u - 1.0 / tau) * g;
    case 3: return (3.0 * u / tau - u * u * u) * g;
    default: return (u * u * u * u - 6.0 * u * u / tau + 3.0 / (tau * tau)) * g;
    }
}

inline void check_tau(double tau)
{
    if (!(tau > 0.0))
        throw Error(ErrorKind::NonpositiveTau, "heat kernel needs tau > 0, got " + std::to_string(tau));
}

// n-th spatial derivative of omega, n = 0..2.
inline double omega_d(const OmegaKind& kind, double tau, double x, int n)
{
    return std::visit(
        [&](const auto& k) -> double {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, ExponentialOmega>) {
                const double rate = k.sign * k.mu;
                return std::pow(rate, n) * std::exp(0.5 * k.mu * k.mu * tau + rate * x);
            } else if constexpr (std::is_same_v<K, GaussOmega>) {
                check_tau(tau);
                return gauss_kernel_d(tau, x - k.y, n);
            } else {
                check_tau(tau);
                if (k.y == 0.0) {
                    // d^{n+1}/dx^{n+1} h(tau, x), h = -G_x
                    return -gauss_kernel_d(tau, x, n + 2);
                }
                return (gauss_kernel_d(tau, x - k.y, n + 1) - gauss_kernel_d(tau, x + k.y, n + 1)) / (2.0 * k.y);
            }
        },
        kind);
}

} // namespace detail

inline double omega_eval(const OmegaKind& kind, double tau, double x) { return detail::omega_d(kind, tau, x, 0); }
inline double omega_dx(const OmegaKind& kind, double tau, double x) { return detail::omega_d(kind, tau, x, 1); }
inline double omega_dxx(const OmegaKind& kind, double tau, double x) { return detail::omega_d(kind, tau, x, 2); }

/// Parameters of the adjoint solution
///   Phi(t, x) = exp{1/2 I2(t) - x f'(t)} omega(t, x - sign_int I1(t)),
/// omega = Exponential{lambda, sign_x}. sign_int = +1 is the only choice that
/// solves the adjoint equation when f' is not identically zero.
struct PhiParams {
    PolyBoundary f;
    double lambda = 0.0;
    int sign_x = 1;
    int sign_int = 1;

    OmegaKind omega() const { return ExponentialOmega{lambda, sign_x}; }
};

/// u1(t, x) = exp{1/2 (I2(s) - I2(t)) + x f'(t)} omega(s - t, x + I1(s) - I1(t)).
struct U1Params {
    PolyBoundary f;
    double s = 1.0;
    OmegaKind omega = ExponentialOmega{};
};

/// Adjoint-equation solution built from any heat solution omega. The general
/// form of phi_eval; with a non-exponential omega, log Phi is not affine in x.
inline double adjoint_solution(const PolyBoundary& f, const OmegaKind& omega, double t, double x, int sign_int = 1)
{
    const auto b = boundary_eval(f, t);
    return std::exp(0.5 * b.int_df_sq - x * b.df) * omega_eval(omega, t, x - sign_int * b.int_df);
}

inline double adjoint_solution_dx(const PolyBoundary& f, const OmegaKind& omega, double t, double x, int sign_int = 1)
{
    const auto b = boundary_eval(f, t);
    const double y = x - sign_int * b.int_df;
    return std::exp(0.5 * b.int_df_sq - x * b.df) * (omega_dx(omega, t, y) - b.df * omega_eval(omega, t, y));
}

inline double phi_eval(const PhiParams& p, double t, double x) { return adjoint_solution(p.f, p.omega(), t, x, p.sign_int); }

inline double phi_dx(const PhiParams& p, double t, double x)
{
    // log Phi is affine in x with slope sign_x lambda - f'(t).
    return (p.sign_x * p.lambda - p.f.df(t)) * phi_eval(p, t, x);
}

/// One literal reading of the displayed closed form
///   exp{1/2 I2 - x[f' + bracket_sign lambda] + time_sign 1/2 lambda^2 t
///       + integral_sign [lambda] I1},
/// used to brute-force which sign/factor reading solves the adjoint equation.
struct PhiLiteralReading {
    int bracket_sign = 1;
    int integral_sign = 1;
    bool lambda_on_integral = false;
    int time_sign = -1;
};

inline double phi_literal_eval(const PolyBoundary& f, double lambda, const PhiLiteralReading& r, double t, double x)
{
    const auto b = boundary_eval(f, t);
    const double int_factor = r.lambda_on_integral ? lambda : 1.0;
    return std::exp(0.5 * b.int_df_sq - x * (b.df + r.bracket_sign * lambda) + r.time_sign * 0.5 * lambda * lambda * t +
                    r.integral_sign * int_factor * b.int_df);
}

namespace detail {

inline void check_horizon(const U1Params& p, double t)
{
    if (needs_positive_tau(p.omega) && !(t < p.s))
        throw Error(ErrorKind::HorizonViolation,
                    "u1 needs t < s, got t=" + std::to_string(t) + " s=" + std::to_string(p.s));
}

} // namespace detail

inline double u1_eval(const U1Params& p, double t, double x)
{
    detail::check_horizon(p, t);
    const auto bt = boundary_eval(p.f, t);
    const auto bs = boundary_eval(p.f, p.s);
    return std::exp(0.5 * (bs.int_df_sq - bt.int_df_sq) + x * bt.df) *
           omega_eval(p.omega, p.s - t, x + bs.int_df - bt.int_df);
}

inline double u1_dx(const U1Params& p, double t, double x)
{
    detail::check_horizon(p, t);
    const auto bt = boundary_eval(p.f, t);
    const auto bs = boundary_eval(p.f, p.s);
    const double tau = p.s - t;
    const double y = x + bs.int_df - bt.int_df;
    return std::exp(0.5 * (bs.int_df_sq - bt.int_df_sq) + x * bt.df) *
           (bt.df * omega_eval(p.omega, tau, y) + omega_dx(p.omega, tau, y));
}

/// First-passage density of standard Brownian motion to level x, in t.
inline double hitting_density(double t, double x)
{
    if (!(t > 0.0))
        throw Error(ErrorKind::NonpositiveTime, "hitting density needs t > 0, got " + std::to_string(t));
    if (x < 0.0)
        throw Error(ErrorKind::NegativeLevel, "hitting density needs x >= 0, got " + std::to_string(x));
    if (x == 0.0)
        return 0.0;
    // Log form keeps tiny t from producing inf * 0.
    return x * std::exp(-x * x / (2.0 * t) - 1.5 * std::log(t)) / std::sqrt(2.0 * std::numbers::pi);
}

} // namespace hitlab
