#pragma once

#include <cmath>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "config.hpp"
#include "io.hpp"
#include "montecarlo.hpp"
#include "residual.hpp"
#include "transform.hpp"

// Command implementations behind the hitlab tool. Exit codes:
// 0 pass, 1 verification failure, 2 config error, 3 runtime error.

namespace hitlab::cli {

enum ExitCode : int {
    kPass = 0,
    kVerificationFailure = 1,
    kConfigError = 2,
    kRuntimeError = 3,
};

struct RunOptions {
    unsigned threads = 0; // 0 = HITLAB_THREADS or hardware concurrency
    std::ostream* out = &std::cout;
    std::ostream* err = &std::cerr;
};

inline const std::vector<std::string>& field_names()
{
    static const std::vector<std::string> names = {"phi", "u1", "w", "h", "v"};
    return names;
}

/// Samples one named field on the config grid. h and v are NaN where
/// h(s - t, x) is undefined or zero.
inline std::vector<double> field_values(const RunConfig& rc, const std::string& name, unsigned threads = 0)
{
    const TransformConfig cfg = rc.transform();
    const Grid& g = rc.grid;
    const double s = rc.problem.s;
    const double nan = std::numeric_limits<double>::quiet_NaN();

    auto h_at = [s, nan](double t, double x) { return (t < s && x >= 0.0) ? hitting_density(s - t, x) : nan; };

    if (name == "phi")
        return ScalarField::function([&](double t, double x) { return phi_eval(cfg.phi, t, x); }).sample(g, threads);
    if (name == "u1")
        return ScalarField::function([&](double t, double x) { return u1_eval(cfg.u1, t, x); }).sample(g, threads);
    if (name == "h")
        return ScalarField::function(h_at).sample(g, threads);
    if (name == "w" || name == "v") {
        const TransformedField w(cfg, g.t1);
        if (name == "w")
            return ScalarField::function([&](double t, double x) { return w(t, x); }).sample(g, threads);
        return ScalarField::function([&](double t, double x) {
                   const double h = h_at(t, x);
                   return (h > 0.0) ? w(t, x) / h : nan;
               })
            .sample(g, threads);
    }
    throw ConfigError("unknown field '" + name + "'");
}

template <typename Body>
int guarded(const RunOptions& opts, Body&& body)
{
    try {
        return body();
    } catch (const ConfigError& e) {
        *opts.err << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        *opts.err << "error: " << e.what() << '\n';
        return kRuntimeError;
    }
}

/// Writes <prefix>_{phi,u1,w,h,v}.csv.
inline int run_eval(const RunConfig& rc, const RunOptions& opts = {})
{
    return guarded(opts, [&] {
        for (const auto& name : field_names())
            write_text(rc.output + "_" + name + ".csv", field_csv(rc.grid, field_values(rc, name, opts.threads)));
        *opts.out << "wrote " << field_names().size() << " fields on a " << rc.grid.nt << "x" << rc.grid.nx
                  << " grid to " << rc.output << "_*.csv\n";
        return static_cast<int>(kPass);
    });
}

inline nlohmann::json verify_report(const RunConfig& rc, unsigned threads = 0)
{
    const TransformConfig cfg = rc.transform();
    const Grid& g = rc.grid;
    const PolyBoundary& f = cfg.phi.f;
    nlohmann::json doc;

    const TransformedField w(cfg, g.t1);
    const auto backward = residual_backward(ScalarField::function([&](double t, double x) { return w(t, x); }), f, g,
                                            threads);
    const auto backward_u1 = residual_backward(
        ScalarField::function([&](double t, double x) { return u1_eval(cfg.u1, t, x); }), f, g, threads);
    const auto adjoint = residual_adjoint(
        ScalarField::function([&](double t, double x) { return phi_eval(cfg.phi, t, x); }), f, g, threads);
    const auto conservation = conservation_check(cfg, g, threads);
    const auto bound = bound_check(cfg, rc.problem.s, g, threads);

    const BoundaryMode mode = cfg.b2_mode == B2Mode::Zero ? BoundaryMode::AllT : BoundaryMode::T0Only;
    std::vector<double> times;
    for (int i = 0; i <= 10; ++i)
        times.push_back(g.t1 * i / 10.0);
    const TransformedField w_edge(cfg, g.t1);
    const auto limit = boundary_limit_check([&](double t, double x) { return w_edge(t, x); }, mode, times);

    doc["backward"] = to_json(backward);
    doc["backward_u1"] = to_json(backward_u1);
    doc["adjoint"] = to_json(adjoint);
    doc["conservation"] = to_json(conservation);

    nlohmann::json b;
    b["status"] = bound.skipped ? bound.reason : (bound.passed() ? "pass" : "fail");
    b["points_checked"] = bound.points_checked;
    b["violations"] = bound.violations.size();
    if (!bound.violations.empty()) {
        const auto& v = bound.violations.front();
        b["first_violation"] = {{"t", v.t}, {"x", v.x}, {"w", v.w}, {"h", v.h}};
    } else {
        b["first_violation"] = nullptr;
    }
    doc["bound"] = b;

    doc["boundary_limit"] = {{"mode", mode == BoundaryMode::AllT ? "all_t" : "t0_only"},
                             {"min_slope", limit.min_slope},
                             {"pass", limit.pass}};

    nlohmann::json checks;
    checks["backward"] = converged(backward);
    checks["backward_u1"] = converged(backward_u1);
    checks["adjoint"] = converged(adjoint);
    checks["conservation"] = converged(conservation);
    checks["bound"] = bound.skipped || bound.passed();
    checks["boundary_limit"] = limit.pass;
    bool all = true;
    for (const auto& item : checks.items())
        all = all && item.value().get<bool>();
    doc["checks"] = checks;
    doc["pass"] = all;
    return doc;
}

/// Prints the verification report and writes <prefix>_verify.json.
inline int run_verify(const RunConfig& rc, const RunOptions& opts = {})
{
    return guarded(opts, [&] {
        const auto doc = verify_report(rc, opts.threads);
        const std::string text = doc.dump(2) + "\n";
        write_text(rc.output + "_verify.json", text);
        *opts.out << text;
        return doc["pass"].get<bool>() ? static_cast<int>(kPass) : static_cast<int>(kVerificationFailure);
    });
}

struct MCComparison {
    MCEstimate estimate;
    double v_quadrature = 0.0;
    double gap = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

/// Bessel-bridge estimate of v against w / h from the transformed solution;
/// agreement means |gap| <= 3 std_error + 2e-3.
inline MCComparison compare_mc(const RunConfig& rc, unsigned threads = 0)
{
    MCComparison c;
    const MCConfig mc = rc.mc_config();
    c.estimate = v_mc_estimate(mc, threads);
    const TransformedField w(rc.transform(), mc.t);
    c.v_quadrature = v_from_w(w(mc.t, mc.x), mc.t, mc.x, mc.s);
    c.gap = std::abs(c.estimate.mean - c.v_quadrature);
    c.tolerance = 3.0 * c.estimate.std_error + 2e-3;
    c.pass = c.gap <= c.tolerance;
    return c;
}

/// Writes <prefix>_v.json, <prefix>_mc.json and <prefix>_hist.csv.
inline int run_mc(const RunConfig& rc, const RunOptions& opts = {})
{
    return guarded(opts, [&] {
        const auto cmp = compare_mc(rc, opts.threads);
        const auto& hc = rc.mc.hist;
        const auto hist =
            hitting_time_histogram(hc.level, hc.horizon, hc.dt, hc.n_paths, rc.mc.seed, hc.bins, opts.threads);
        const double expected = hitting_probability(hc.level, hc.horizon);
        const double binomial_se = std::sqrt(expected * (1.0 - expected) / static_cast<double>(hc.n_paths));

        nlohmann::json doc;
        doc["estimate"] = to_json(cmp.estimate);
        doc["v_quadrature"] = cmp.v_quadrature;
        doc["abs_gap"] = cmp.gap;
        doc["tolerance"] = cmp.tolerance;
        doc["verdict"] = cmp.pass ? "PASS" : "FAIL";
        doc["histogram"] = {{"level", hc.level},
                            {"horizon", hc.horizon},
                            {"dt", hc.dt},
                            {"n_paths", hc.n_paths},
                            {"hit_fraction", hist.hit_fraction()},
                            {"expected_fraction", expected},
                            {"binomial_std_error", binomial_se}};

        write_text(rc.output + "_v.json", to_json(cmp.estimate).dump(2) + "\n");
        write_text(rc.output + "_mc.json", doc.dump(2) + "\n");
        write_text(rc.output + "_hist.csv", histogram_csv(hist));

        auto& out = *opts.out;
        out << "v_mc = " << format_double(cmp.estimate.mean) << " +- " << format_double(cmp.estimate.std_error)
            << " (" << cmp.estimate.n_paths << " paths)\n";
        out << "v_quadrature = " << format_double(cmp.v_quadrature) << '\n';
        out << "|v_mc - v_quadrature| = " << format_double(cmp.gap) << " (tolerance " << format_double(cmp.tolerance)
            << ")\n";
        out << "hit fraction = " << format_double(hist.hit_fraction()) << " (reflection principle "
            << format_double(expected) << ")\n";
        out << "verdict: " << (cmp.pass ? "PASS" : "FAIL") << '\n';
        return cmp.pass ? static_cast<int>(kPass) : static_cast<int>(kVerificationFailure);
    });
}

/// Sets one scalar problem key: lambda, s, k, b2_at_zero, mu, y or f<i>.
inline void set_sweep_key(RunConfig& rc, const std::string& key, double value)
{
    auto& p = rc.problem;
    if (key == "lambda")
        p.lambda = value;
    else if (key == "s")
        p.s = value;
    else if (key == "k")
        p.k = value;
    else if (key == "b2_at_zero")
        p.b2_at_zero = value;
    else if (key == "mu") {
        auto* e = std::get_if<ExponentialOmega>(&p.omega);
        if (!e)
            throw ConfigError("sweep key 'mu' needs an exponential omega");
        e->mu = value;
    } else if (key == "y") {
        if (auto* g = std::get_if<GaussOmega>(&p.omega))
            g->y = value;
        else if (auto* im = std::get_if<ImagesOmega>(&p.omega))
            im->y = value;
        else
            throw ConfigError("sweep key 'y' needs a gauss or images omega");
    } else if (key.size() > 1 && key[0] == 'f') {
        std::size_t idx = 0;
        try {
            idx = std::stoul(key.substr(1));
        } catch (...) {
            throw ConfigError("bad sweep key '" + key + "'");
        }
        if (p.f.size() <= idx)
            p.f.resize(idx + 1, 0.0);
        p.f[idx] = value;
    } else {
        throw ConfigError("unknown sweep key '" + key + "'");
    }
}

/// Writes <prefix>_sweep.csv in long format: param,t,x,value.
inline int run_sweep(const RunConfig& rc, const RunOptions& opts = {})
{
    return guarded(opts, [&] {
        const auto& sw = rc.sweep;
        std::string text = "param,t,x,value\n";
        for (std::size_t i = 0; i < sw.n; ++i) {
            const double value =
                sw.n == 1 ? sw.from : sw.from + (sw.to - sw.from) * static_cast<double>(i) / static_cast<double>(sw.n - 1);
            RunConfig point = rc;
            set_sweep_key(point, sw.key, value);
            const auto values = field_values(point, sw.field, opts.threads);
            const Grid& g = point.grid;
            const std::string param = format_double(value);
            for (std::size_t a = 0; a < g.nt; ++a)
                for (std::size_t b = 0; b < g.nx; ++b)
                    text += param + "," + format_double(g.t(a)) + "," + format_double(g.x(b)) + "," +
                            format_double(values[a * g.nx + b]) + "\n";
        }
        write_text(rc.output + "_sweep.csv", text);
        *opts.out << "wrote " << sw.n << " sweep points of '" << sw.field << "' over " << sw.key << " to "
                  << rc.output << "_sweep.csv\n";
        return static_cast<int>(kPass);
    });
}

} // namespace hitlab::cli
