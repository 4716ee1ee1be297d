#include <cmath>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include "hitlab/residual.hpp"
#include "hitlab/transform.hpp"

using namespace hitlab;

namespace {

TransformConfig make_config(PolyBoundary f, double lambda, OmegaKind omega, double s = 1.0, double k = 0.0)
{
    TransformConfig cfg;
    cfg.phi = PhiParams{f, lambda, 1, 1};
    cfg.u1 = U1Params{f, s, omega};
    cfg.k = k;
    return cfg;
}

template <typename Fn>
void expect_error(ErrorKind kind, Fn&& fn)
{
    try {
        fn();
        FAIL() << "expected " << to_string(kind);
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), kind);
    }
}

} // namespace

TEST(Flux, TrivialFieldsGiveUnitDensityAndNoFlux)
{
    const auto cfg = make_config(PolyBoundary{0.0}, 0.0, ExponentialOmega{0.0, 1});
    const auto p = flux(cfg, 0.3, 1.7);
    EXPECT_EQ(p.ft, 1.0);
    EXPECT_EQ(p.fx, 0.0);
}

TEST(Flux, ExponentialPairAtOrigin)
{
    // Phi = 1, u1 = exp(1/2 (1 - t) + x) at s = 1: ft = e^{1/2}, fx = 1/2 u1_x = 1/2 e^{1/2}.
    auto cfg = make_config(PolyBoundary{0.0}, 0.0, ExponentialOmega{1.0, 1});
    const auto p = flux(cfg, 0.0, 0.0);
    EXPECT_NEAR(p.ft, std::exp(0.5), 1e-14);
    EXPECT_NEAR(p.fx, 0.5 * std::exp(0.5), 1e-14);

    // Phi = exp(1/2 t + x), u1 = 1: fx = -1/2 Phi_x = -1/2 e^{1/2} at t = 1.
    auto cfg2 = make_config(PolyBoundary{0.0}, 1.0, ExponentialOmega{0.0, 1});
    const auto p2 = flux(cfg2, 1.0, 0.0);
    EXPECT_NEAR(p2.ft, std::exp(0.5), 1e-14);
    EXPECT_NEAR(p2.fx, -0.5 * std::exp(0.5), 1e-14);
}

TEST(Flux, OpposedExponentials)
{
    // Phi = exp(1/2 t + x), u1 = exp(1/2 (1 - t) - x): at the origin ft = e^{1/2}, fx = -e^{1/2}.
    const auto cfg = make_config(PolyBoundary{0.0}, 1.0, ExponentialOmega{1.0, -1});
    const auto p = flux(cfg, 0.0, 0.0);
    EXPECT_NEAR(p.ft, std::exp(0.5), 1e-15);
    EXPECT_NEAR(p.fx, -std::exp(0.5), 1e-15);
}

TEST(Flux, MatchesDefinitionByFiniteDifferences)
{
    const PolyBoundary f{0.0, 0.2, 0.5};
    const auto base = make_config(f, 0.7, GaussOmega{0.3});
    const auto p = flux(base, 0.4, 1.1);
    const double phi = phi_eval(base.phi, 0.4, 1.1);
    const double u = u1_eval(base.u1, 0.4, 1.1);
    EXPECT_NEAR(p.ft, phi * u, 1e-15 * std::abs(phi * u));
    const double h = 1e-6;
    const double du = (u1_eval(base.u1, 0.4, 1.1 + h) - u1_eval(base.u1, 0.4, 1.1 - h)) / (2 * h);
    const double dphi = (phi_eval(base.phi, 0.4, 1.1 + h) - phi_eval(base.phi, 0.4, 1.1 - h)) / (2 * h);
    EXPECT_NEAR(p.fx, 0.5 * (phi * du - dphi * u), 1e-7 * std::abs(p.fx));
}

TEST(Flux, ConservationLawHoldsOnTheWindow)
{
    const std::vector<PolyBoundary> fs = {PolyBoundary{0.0}, PolyBoundary{0.0, 1.0}, PolyBoundary{0.0, 0.0, 0.5}};
    for (const auto& f : fs) {
        const auto cfg = make_config(f, 0.5, GaussOmega{0.2});
        const auto r = conservation_check(cfg, verification_window(1.0, 3.0, 41, 41), 1);
        EXPECT_TRUE(converged(r)) << "degree " << f.degree() << " max " << r.max_abs << " ratio "
                                  << r.convergence_ratio.value_or(-1);
    }
}

TEST(B2Solve, ZeroRateKeepsInitialValue)
{
    auto cfg = make_config(PolyBoundary{0.0}, 0.0, ExponentialOmega{0.0, 1});
    cfg.b2_at_zero = 0.75;
    const std::vector<double> grid = {0.0, 0.1, 0.35, 1.0};
    for (double v : b2_solve(cfg, grid))
        EXPECT_EQ(v, 0.75);
}

TEST(B2Solve, ConstantRateGrowsLinearly)
{
    // Phi = exp(1/2 t + x), u1 = 1, k = 0: rate = 1/2 Phi_x(t, 0) = 1/2 e^{t/2}; B2(1/2) = e^{1/4} - 1.
    auto cfg = make_config(PolyBoundary{0.0}, 1.0, ExponentialOmega{0.0, 1});
    EXPECT_NEAR(b2_rate(cfg, 0.0), 0.5, 1e-15);
    std::vector<double> grid;
    for (int i = 0; i <= 50; ++i)
        grid.push_back(0.01 * i);
    const auto b2 = b2_solve(cfg, grid);
    EXPECT_NEAR(b2.back(), std::exp(0.25) - 1.0, 1e-12);
}

TEST(B2Solve, ExponentialPairRate)
{
    // Phi = 1, u1 = exp(1/2 (1 - t) + x): rate = -1/2 u1_x(t, 0) = -1/2 e^{(1-t)/2}.
    auto cfg = make_config(PolyBoundary{0.0}, 0.0, ExponentialOmega{1.0, 1});
    EXPECT_NEAR(b2_rate(cfg, 0.0), -0.5 * std::exp(0.5), 1e-14);
}

TEST(B2Solve, OpposedExponentialsAtHalf)
{
    // The rate is the constant e^{1/2}, so B2(1/2) = e^{1/2} / 2; checked against quadrature too.
    const auto cfg = make_config(PolyBoundary{0.0}, 1.0, ExponentialOmega{1.0, -1});
    const std::vector<double> grid = {0.0, 0.125, 0.25, 0.375, 0.5};
    const auto b2 = b2_solve(cfg, grid);
    EXPECT_NEAR(b2.back(), 0.5 * std::exp(0.5), 1e-13);
    const double oracle = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        [&](double t) { return b2_rate(cfg, t); }, 0.0, 0.5, 15, 1e-14);
    EXPECT_NEAR(b2.back(), oracle, 1e-10);
}

TEST(B2Solve, MatchesIndependentQuadratureOfTheRate)
{
    const PolyBoundary f{0.0, 0.3, 0.5};
    auto cfg = make_config(f, 0.8, GaussOmega{0.4}, 1.0, 0.3);
    cfg.b2_at_zero = -0.2;
    std::vector<double> grid;
    for (int i = 0; i <= 900; ++i)
        grid.push_back(1e-3 * i);
    const auto b2 = b2_solve(cfg, grid);
    for (std::size_t i : {100u, 450u, 900u}) {
        const double oracle =
            cfg.b2_at_zero + boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
                                 [&](double t) { return b2_rate(cfg, t); }, 0.0, grid[i], 15, 1e-14);
        EXPECT_NEAR(b2[i], oracle, 1e-10) << "t=" << grid[i];
    }
    // The table agrees off its nodes too.
    const B2Table table(cfg, 0.9);
    const double t = 0.4567;
    const double oracle = cfg.b2_at_zero + boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
                                               [&](double u) { return b2_rate(cfg, u); }, 0.0, t, 15, 1e-14);
    EXPECT_NEAR(table.at(t), oracle, 1e-10);
}

TEST(B2Solve, GridErrors)
{
    const auto cfg = make_config(PolyBoundary{0.0}, 0.5, GaussOmega{0.0});
    const std::vector<double> unsorted = {0.0, 0.3, 0.2};
    expect_error(ErrorKind::UnsortedGrid, [&] { b2_solve(cfg, unsorted); });
    const std::vector<double> repeated = {0.0, 0.3, 0.3};
    expect_error(ErrorKind::UnsortedGrid, [&] { b2_solve(cfg, repeated); });
    const std::vector<double> late = {0.1, 0.3};
    expect_error(ErrorKind::InvalidArgument, [&] { b2_solve(cfg, late); });
}

TEST(B2Table, ZeroModeIsIdenticallyZero)
{
    auto cfg = make_config(PolyBoundary{0.0, 0.0, 0.5}, 1.0, GaussOmega{0.5});
    cfg.b2_mode = B2Mode::Zero;
    cfg.b2_at_zero = 3.0;
    const B2Table table(cfg, 0.9);
    for (double t : {0.0, 0.3, 0.9})
        EXPECT_EQ(table.at(t), 0.0);
}

TEST(WEval, VanishesAtReferencePointWhenB2IsZero)
{
    const auto cfg = make_config(PolyBoundary{0.0, 0.0, 0.5}, 0.6, GaussOmega{0.1}, 1.0, 0.4);
    EXPECT_EQ(w_eval(cfg, 0.3, 0.4, 0.0), 0.0);
}

TEST(WEval, TrivialFieldsGiveIdentity)
{
    const auto cfg = make_config(PolyBoundary{0.0}, 0.0, ExponentialOmega{0.0, 1});
    for (double x : {0.0, 0.5, 2.0, -1.0})
        EXPECT_NEAR(w_eval(cfg, 0.2, x, 0.0), x, 1e-14);
}

TEST(WEval, DipoleGivesTheHittingDensity)
{
    // f = 0, lambda = 0, dipole omega: w(t, x) = h(s - t, x).
    const auto cfg = make_config(PolyBoundary{0.0}, 0.0, ImagesOmega{0.0});
    const TransformedField w(cfg, 0.9);
    EXPECT_NEAR(w(0.0, 1.0), hitting_density(1.0, 1.0), 1e-10);
    for (double t : {0.1, 0.5, 0.9}) {
        EXPECT_NEAR(w.b2(t), 0.0, 1e-15);
        for (double x : {0.2, 1.0, 2.5})
            EXPECT_NEAR(w(t, x), hitting_density(1.0 - t, x), 1e-10);
    }
}

TEST(WEval, AdditiveInTheReferencePoint)
{
    // Moving k from k1 to k2 adds integral_{k2}^{k1} Phi u1 to the numerator.
    const PolyBoundary f{0.0, 0.0, 0.5};
    const auto a = make_config(f, 0.6, GaussOmega{0.1}, 1.0, 0.2);
    const auto b = make_config(f, 0.6, GaussOmega{0.1}, 1.0, 0.9);
    const double t = 0.35, x = 1.4;
    const double phi = phi_eval(a.phi, t, x);
    const double shift = w_eval(a, t, 0.9, 0.0) * phi_eval(a.phi, t, 0.9) / phi;
    EXPECT_NEAR(w_eval(a, t, x, 0.0), w_eval(b, t, x, 0.0) + shift, 1e-10);
}

TEST(WEval, BoundaryValueAtTimeZero)
{
    auto cfg = make_config(PolyBoundary{0.0, 0.0, 0.5}, 0.6, GaussOmega{0.1});
    cfg.b2_at_zero = 0.25;
    // At x = k, w = B2 / Phi.
    const TransformedField w(cfg, 0.5);
    EXPECT_NEAR(w(0.0, 0.0), 0.25 / phi_eval(cfg.phi, 0.0, 0.0), 1e-15);
}

TEST(WEval, SolvesTheBackwardEquation)
{
    const std::vector<PolyBoundary> fs = {PolyBoundary{0.0}, PolyBoundary{0.0, 1.0}, PolyBoundary{0.0, 0.0, 0.5}};
    for (const auto& f : fs) {
        auto cfg = make_config(f, 0.5, GaussOmega{0.3});
        cfg.b2_at_zero = 0.1;
        const TransformedField w(cfg, 0.95);
        const auto r = residual_backward(ScalarField::function([&](double t, double x) { return w(t, x); }), f,
                                         verification_window(1.0, 3.0, 31, 31), 1);
        EXPECT_TRUE(converged(r)) << "degree " << f.degree() << " max " << r.max_abs << " ratio "
                                  << r.convergence_ratio.value_or(-1);
    }
}

TEST(WEval, DroppingB2BreaksTheEquation)
{
    const PolyBoundary f{0.0, 0.0, 0.5};
    auto cfg = make_config(f, 0.5, GaussOmega{0.3});
    cfg.b2_mode = B2Mode::Zero;
    const TransformedField w(cfg, 0.95);
    const auto r = residual_backward(ScalarField::function([&](double t, double x) { return w(t, x); }), f,
                                     verification_window(1.0, 3.0, 31, 31), 1);
    EXPECT_FALSE(converged(r));
}

TEST(V2Potential, EqualsV1ForExponentialFamily)
{
    const PhiParams p{PolyBoundary{0.0, 0.0, 0.5}, 0.7, -1, 1};
    for (double x : {-1.0, 0.0, 2.0})
        EXPECT_DOUBLE_EQ(v2_potential(p, 0.4, x), x * 1.0);
    auto phi = [&](double t, double x) { return phi_eval(p, t, x); };
    EXPECT_NEAR(v2_potential_fd(p.f, phi, 0.4, 1.3, 1e-3), 1.3, 1e-6);
}

TEST(V2Potential, GaussianFieldCurvature)
{
    auto phi = [](double, double x) { return std::exp(x * x); };
    const PolyBoundary zero{0.0};
    EXPECT_NEAR(v2_potential_fd(zero, phi, 0.0, 0.5, 1e-3), -2.0, 1e-6);
    EXPECT_NEAR(v2_potential_fd(zero, phi, 0.0, 0.5, 1e-3, 1.0), -4.0, 1e-6);
}

TEST(V2Potential, NonpositiveFieldRaises)
{
    auto phi = [](double, double x) { return x; };
    expect_error(ErrorKind::NonpositiveField, [&] { v2_potential_fd(PolyBoundary{0.0}, phi, 0.0, 0.0, 1e-3); });
}

TEST(V2Potential, CurvatureFactorMatchesNonAffineAdjointField)
{
    // For any positive adjoint solution Phi, 1/Phi solves the backward
    // equation with V2 = V1 - d^2/dx^2 log Phi. A Gauss omega makes log Phi
    // curved, so only the right diffusion factor passes.
    const PolyBoundary f{0.0, 0.0, 0.5};
    const OmegaKind om = GaussOmega{0.2};
    auto phi = [&](double t, double x) { return adjoint_solution(f, om, t, x); };
    auto inv = [&](double t, double x) { return 1.0 / phi(t, x); };
    const std::vector<std::pair<double, double>> pts = {{0.3, 0.2}, {0.5, 0.9}, {0.7, 1.6}, {0.9, -0.4}};
    for (double diffusion : {0.5, 1.0}) {
        const LinearOperator op{-1.0, -0.5, [&, diffusion](double t, double x) {
                                    return v2_potential_fd(f, phi, t, x, 1e-4, diffusion);
                                }};
        const auto r = residual_at_points(inv, op, pts, 0.02);
        if (diffusion == 0.5)
            EXPECT_TRUE(converged(r)) << r.max_abs << " " << r.convergence_ratio.value_or(-1);
        else
            EXPECT_GT(r.max_abs, 1e-2);
    }
}

TEST(VFromW, RatioToHittingDensity)
{
    EXPECT_NEAR(v_from_w(hitting_density(1.0, 1.0), 0.0, 1.0, 1.0), 1.0, 1e-15);
    EXPECT_NEAR(v_from_w(0.5 * hitting_density(0.5, 2.0), 0.5, 2.0, 1.0), 0.5, 1e-15);
}

TEST(VFromW, ZeroDenominatorErrors)
{
    expect_error(ErrorKind::ZeroDenominator, [] { v_from_w(0.1, 0.0, 0.0, 1.0); });
    expect_error(ErrorKind::ZeroDenominator, [] { v_from_w(0.1, 1.0, 1.0, 1.0); });
    expect_error(ErrorKind::ZeroDenominator, [] { v_from_w(0.1, 0.0, -1.0, 1.0); });
}
