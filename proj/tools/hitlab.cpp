#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "hitlab/cli.hpp"

namespace {

struct CommonFlags {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
};

void add_common(CLI::App* cmd, CommonFlags& flags)
{
    cmd->add_option("--config", flags.config_path, "JSON run configuration (defaults when omitted)");
    cmd->add_option("--seed", flags.seed, "override mc.seed");
    cmd->add_option("--out", flags.out, "output path prefix");
}

} // namespace

int main(int argc, char** argv)
{
    using namespace hitlab;

    CLI::App app{"hitlab: transformed solutions and hitting densities"};
    app.require_subcommand(1);
    CommonFlags flags;
    auto* eval = app.add_subcommand("eval", "evaluate phi, u1, w, h, v on the grid to CSV");
    auto* verify = app.add_subcommand("verify", "run the residual and bound checks, JSON report");
    auto* mc = app.add_subcommand("mc", "Monte Carlo cross-check and hitting-time histogram");
    auto* sweep = app.add_subcommand("sweep", "vary one scalar key and emit long-format CSV");
    for (auto* cmd : {eval, verify, mc, sweep})
        add_common(cmd, flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : cli::kConfigError;
    }

    RunConfig rc;
    try {
        rc = flags.config_path.empty() ? parse_run_config(std::string("{}")) : load_run_config(flags.config_path);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return cli::kConfigError;
    }
    if (flags.seed)
        rc.mc.seed = *flags.seed;
    if (flags.out)
        rc.output = *flags.out;

    const cli::RunOptions opts{default_thread_count(), &std::cout, &std::cerr};
    if (eval->parsed())
        return cli::run_eval(rc, opts);
    if (verify->parsed())
        return cli::run_verify(rc, opts);
    if (mc->parsed())
        return cli::run_mc(rc, opts);
    return cli::run_sweep(rc, opts);
}
