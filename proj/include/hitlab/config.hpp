#pragma once

#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "closed_forms.hpp"
#include "montecarlo.hpp"
#include "residual.hpp"
#include "transform.hpp"

// Run configuration, parsed from a single JSON document. Every section and
// key is optional; unknown keys are rejected.
//
// {
//   "problem": {"f": [0, 0, 0.5], "s": 1, "lambda": 0, "sign_x": 1, "sign_int": 1,
//               "omega": {"kind": "images", "y": 0}, "k": 0, "b2_at_zero": 0,
//               "b2_mode": "ode", "tol": 1e-10},
//   "grid": {"t0": 0.05, "t1": 0.95, "x0": 0.15, "x1": 2.85, "nt": 41, "nx": 41},
//   "mc": {"n_paths": 100000, "n_steps": 500, "seed": 42, "t": 0, "x": 1,
//          "hist": {"level": 1, "horizon": 5, "dt": 0.001, "n_paths": 200000, "bins": 50}},
//   "sweep": {"key": "lambda", "from": 0, "to": 1, "n": 5, "field": "w"},
//   "output": "hitlab"
// }
//
// omega kinds: {"kind": "exponential", "mu": m, "sign": +-1},
//              {"kind": "gauss", "y": c}, {"kind": "images", "y": c}.

namespace hitlab {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ProblemConfig {
    std::vector<double> f = {0.0, 0.0, 0.5};
    double s = 1.0;
    double lambda = 0.0;
    int sign_x = 1;
    int sign_int = 1;
    OmegaKind omega = ImagesOmega{0.0};
    double k = 0.0;
    double b2_at_zero = 0.0;
    B2Mode b2_mode = B2Mode::Ode;
    double tol = 1e-10;
};

struct HistogramConfig {
    double level = 1.0;
    double horizon = 5.0;
    double dt = 1e-3;
    std::size_t n_paths = 200000;
    std::size_t bins = 50;
};

struct MCSection {
    std::size_t n_paths = 100000;
    std::size_t n_steps = 500;
    std::uint64_t seed = 42;
    double t = 0.0;
    double x = 1.0;
    HistogramConfig hist;
};

struct SweepConfig {
    std::string key = "lambda";
    double from = 0.0;
    double to = 1.0;
    std::size_t n = 5;
    std::string field = "w";
};

struct RunConfig {
    ProblemConfig problem;
    Grid grid = verification_window(1.0, 3.0, 41, 41);
    MCSection mc;
    SweepConfig sweep;
    std::string output = "hitlab";

    TransformConfig transform() const
    {
        TransformConfig cfg;
        const PolyBoundary f(problem.f);
        cfg.phi = PhiParams{f, problem.lambda, problem.sign_x, problem.sign_int};
        cfg.u1 = U1Params{f, problem.s, problem.omega};
        cfg.k = problem.k;
        cfg.b2_at_zero = problem.b2_at_zero;
        cfg.b2_mode = problem.b2_mode;
        cfg.quadrature.abs_tol = problem.tol;
        return cfg;
    }

    MCConfig mc_config() const
    {
        return {mc.n_paths, mc.n_steps, mc.seed, mc.t, mc.x, problem.s, PolyBoundary(problem.f)};
    }
};

namespace detail {

inline void reject_unknown(const nlohmann::json& obj, const std::string& where,
                           std::initializer_list<const char*> allowed)
{
    if (!obj.is_object())
        throw ConfigError(where + " must be a JSON object");
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* key : allowed)
            known = known || item.key() == key;
        if (!known)
            throw ConfigError("unknown key '" + item.key() + "' in " + where);
    }
}

template <typename T>
void read(const nlohmann::json& obj, const char* key, T& out, const std::string& where)
{
    if (!obj.contains(key))
        return;
    try {
        out = obj.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(where + "." + key + ": " + e.what());
    }
}

inline int read_sign(const nlohmann::json& obj, const char* key, int fallback, const std::string& where)
{
    int v = fallback;
    read(obj, key, v, where);
    if (v != 1 && v != -1)
        throw ConfigError(where + "." + key + " must be +1 or -1");
    return v;
}

inline OmegaKind parse_omega(const nlohmann::json& j)
{
    if (!j.is_object() || !j.contains("kind"))
        throw ConfigError("problem.omega needs a 'kind'");
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "exponential") {
        reject_unknown(j, "problem.omega", {"kind", "mu", "sign"});
        ExponentialOmega o;
        read(j, "mu", o.mu, "problem.omega");
        o.sign = read_sign(j, "sign", 1, "problem.omega");
        return o;
    }
    if (kind == "gauss") {
        reject_unknown(j, "problem.omega", {"kind", "y"});
        GaussOmega o;
        read(j, "y", o.y, "problem.omega");
        return o;
    }
    if (kind == "images") {
        reject_unknown(j, "problem.omega", {"kind", "y"});
        ImagesOmega o;
        read(j, "y", o.y, "problem.omega");
        return o;
    }
    throw ConfigError("unknown omega kind '" + kind + "'");
}

} // namespace detail

inline nlohmann::json omega_to_json(const OmegaKind& omega)
{
    return std::visit(
        [](const auto& k) -> nlohmann::json {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, ExponentialOmega>)
                return {{"kind", "exponential"}, {"mu", k.mu}, {"sign", k.sign}};
            else if constexpr (std::is_same_v<K, GaussOmega>)
                return {{"kind", "gauss"}, {"y", k.y}};
            else
                return {{"kind", "images"}, {"y", k.y}};
        },
        omega);
}

inline RunConfig parse_run_config(const nlohmann::json& doc)
{
    using detail::read;
    RunConfig cfg;
    detail::reject_unknown(doc, "config", {"problem", "grid", "mc", "sweep", "output"});

    if (doc.contains("problem")) {
        const auto& p = doc.at("problem");
        detail::reject_unknown(p, "problem",
                               {"f", "s", "lambda", "sign_x", "sign_int", "omega", "k", "b2_at_zero", "b2_mode", "tol"});
        auto& out = cfg.problem;
        read(p, "f", out.f, "problem");
        if (out.f.empty())
            throw ConfigError("problem.f needs at least one coefficient");
        read(p, "s", out.s, "problem");
        read(p, "lambda", out.lambda, "problem");
        out.sign_x = detail::read_sign(p, "sign_x", out.sign_x, "problem");
        out.sign_int = detail::read_sign(p, "sign_int", out.sign_int, "problem");
        if (p.contains("omega"))
            out.omega = detail::parse_omega(p.at("omega"));
        read(p, "k", out.k, "problem");
        read(p, "b2_at_zero", out.b2_at_zero, "problem");
        std::string mode = out.b2_mode == B2Mode::Ode ? "ode" : "zero";
        read(p, "b2_mode", mode, "problem");
        if (mode == "ode")
            out.b2_mode = B2Mode::Ode;
        else if (mode == "zero")
            out.b2_mode = B2Mode::Zero;
        else
            throw ConfigError("problem.b2_mode must be 'ode' or 'zero'");
        read(p, "tol", out.tol, "problem");
        if (!(out.s > 0.0))
            throw ConfigError("problem.s must be positive");
        if (!(out.tol > 0.0))
            throw ConfigError("problem.tol must be positive");
    }
    cfg.grid = verification_window(cfg.problem.s, 3.0, 41, 41);

    if (doc.contains("grid")) {
        const auto& g = doc.at("grid");
        detail::reject_unknown(g, "grid", {"t0", "t1", "x0", "x1", "nt", "nx"});
        read(g, "t0", cfg.grid.t0, "grid");
        read(g, "t1", cfg.grid.t1, "grid");
        read(g, "x0", cfg.grid.x0, "grid");
        read(g, "x1", cfg.grid.x1, "grid");
        read(g, "nt", cfg.grid.nt, "grid");
        read(g, "nx", cfg.grid.nx, "grid");
    }
    if (cfg.grid.nt < 3 || cfg.grid.nx < 3)
        throw ConfigError("grid too small: nt and nx must be at least 3");
    if (!(cfg.grid.t1 > cfg.grid.t0) || !(cfg.grid.x1 > cfg.grid.x0))
        throw ConfigError("grid needs t1 > t0 and x1 > x0");

    if (doc.contains("mc")) {
        const auto& m = doc.at("mc");
        detail::reject_unknown(m, "mc", {"n_paths", "n_steps", "seed", "t", "x", "hist"});
        read(m, "n_paths", cfg.mc.n_paths, "mc");
        read(m, "n_steps", cfg.mc.n_steps, "mc");
        read(m, "seed", cfg.mc.seed, "mc");
        read(m, "t", cfg.mc.t, "mc");
        read(m, "x", cfg.mc.x, "mc");
        if (m.contains("hist")) {
            const auto& h = m.at("hist");
            detail::reject_unknown(h, "mc.hist", {"level", "horizon", "dt", "n_paths", "bins"});
            read(h, "level", cfg.mc.hist.level, "mc.hist");
            read(h, "horizon", cfg.mc.hist.horizon, "mc.hist");
            read(h, "dt", cfg.mc.hist.dt, "mc.hist");
            read(h, "n_paths", cfg.mc.hist.n_paths, "mc.hist");
            read(h, "bins", cfg.mc.hist.bins, "mc.hist");
        }
    }

    if (doc.contains("sweep")) {
        const auto& s = doc.at("sweep");
        detail::reject_unknown(s, "sweep", {"key", "from", "to", "n", "field"});
        read(s, "key", cfg.sweep.key, "sweep");
        read(s, "from", cfg.sweep.from, "sweep");
        read(s, "to", cfg.sweep.to, "sweep");
        read(s, "n", cfg.sweep.n, "sweep");
        read(s, "field", cfg.sweep.field, "sweep");
        if (cfg.sweep.n < 1)
            throw ConfigError("sweep.n must be at least 1");
    }

    read(doc, "output", cfg.output, "config");
    return cfg;
}

inline RunConfig parse_run_config(const std::string& text)
{
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("invalid JSON: ") + e.what());
    }
    return parse_run_config(doc);
}

inline RunConfig load_run_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot read config " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_run_config(buffer.str());
}

} // namespace hitlab
