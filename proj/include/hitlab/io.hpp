#pragma once

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "error.hpp"
#include "montecarlo.hpp"
#include "residual.hpp"

namespace hitlab {

/// Shortest decimal string that round-trips to the same double (at most 17
/// significant digits). Non-finite values print as nan / inf / -inf.
inline std::string format_double(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& text)
{
    if (text == "nan")
        return std::nan("");
    if (text == "inf")
        return INFINITY;
    if (text == "-inf")
        return -INFINITY;
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
        throw Error(ErrorKind::InvalidArgument, "not a number: '" + text + "'");
    return v;
}

inline nlohmann::json to_json(const ResidualReport& r)
{
    nlohmann::json j;
    j["max_abs"] = r.max_abs;
    j["l2"] = r.l2;
    if (r.convergence_ratio && std::isfinite(*r.convergence_ratio))
        j["convergence_ratio"] = *r.convergence_ratio;
    else
        j["convergence_ratio"] = nullptr;
    return j;
}

inline nlohmann::json to_json(const MCEstimate& e)
{
    return {{"mean", e.mean}, {"std_error", e.std_error}, {"n_paths", e.n_paths}};
}

/// Field samples as CSV with header t,x,value, row-major (t outer).
inline std::string field_csv(const Grid& g, const std::vector<double>& values)
{
    std::ostringstream out;
    out << "t,x,value\n";
    for (std::size_t i = 0; i < g.nt; ++i)
        for (std::size_t j = 0; j < g.nx; ++j)
            out << format_double(g.t(i)) << ',' << format_double(g.x(j)) << ','
                << format_double(values[i * g.nx + j]) << '\n';
    return out.str();
}

/// Reads the value column of a t,x,value CSV written by field_csv.
inline std::vector<double> read_field_csv_values(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line) || line != "t,x,value")
        throw Error(ErrorKind::InvalidArgument, "expected header t,x,value");
    std::vector<double> values;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        const auto last = line.rfind(',');
        if (last == std::string::npos)
            throw Error(ErrorKind::InvalidArgument, "malformed CSV row: " + line);
        values.push_back(parse_double(line.substr(last + 1)));
    }
    return values;
}

inline std::string histogram_csv(const HittingHistogram& hist)
{
    std::ostringstream out;
    out << "bin_left,bin_right,density\n";
    for (std::size_t b = 0; b < hist.density.size(); ++b)
        out << format_double(hist.edges[b]) << ',' << format_double(hist.edges[b + 1]) << ','
            << format_double(hist.density[b]) << '\n';
    return out.str();
}

inline void write_text(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(ErrorKind::InvalidArgument, "cannot open " + path + " for writing");
    out << text;
    if (!out)
        throw Error(ErrorKind::InvalidArgument, "failed writing " + path);
}

} // namespace hitlab
