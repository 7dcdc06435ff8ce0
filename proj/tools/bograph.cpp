// Command-line front end: generate / expect / oracle / mc / compare.

#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "bograph/cli.hpp"

namespace {

void add_common(CLI::App* sub, bograph::cli::RunConfig& cfg, std::string& d,
                std::string& d1, std::string& d2) {
    sub->add_option("--a", cfg.params.a, "initial attractiveness a > 0");
    sub->add_option("--k", cfg.params.k, "edges per node, k >= 1");
    sub->add_option("--seed", cfg.params.seed, "random seed");
    sub->add_option("--t", cfg.t, "number of nodes");
    sub->add_option("--d", d, "degree range, lo..hi or a single value");
    sub->add_option("--d1", d1, "first degree range, lo..hi");
    sub->add_option("--d2", d2, "second degree range, lo..hi");
    sub->add_option("--out", cfg.out, "output path (default: stdout)");
    sub->add_option("--format", cfg.format, "output format: edges|csv|json");
    sub->add_option("--mem-cap-mb", cfg.mem_cap_mb, "memory cap for tables, MiB");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Buckley-Osthus random multigraph toolkit"};
    app.require_subcommand(1);

    bograph::cli::RunConfig cfg;
    std::string d, d1, d2;

    auto* gen = app.add_subcommand("generate", "sample a graph and write its edge list");
    add_common(gen, cfg, d, d1, d2);
    gen->add_option("--n", cfg.n, "stage-one node count (alternative to --t)");

    auto* expect = app.add_subcommand("expect", "closed-form coefficient tables");
    add_common(expect, cfg, d, d1, d2);

    auto* oracle = app.add_subcommand("oracle", "exact expectation tables");
    add_common(oracle, cfg, d, d1, d2);
    oracle->add_option("--stat", cfg.stat, "table to emit: r|r2|ex");
    oracle->add_flag("--exact-enum", cfg.exact_enum,
                     "use the exact rational enumeration (tiny t only)");

    auto* mc = app.add_subcommand("mc", "Monte Carlo campaign report");
    add_common(mc, cfg, d, d1, d2);
    mc->add_option("--replicas", cfg.replicas, "number of replicas (>= 2)");
    mc->add_option("--workers", cfg.workers, "worker threads (0 = hardware)");

    auto* compare = app.add_subcommand("compare",
                                       "join Monte Carlo, oracle and closed form");
    add_common(compare, cfg, d, d1, d2);
    compare->add_option("--replicas", cfg.replicas, "number of replicas (>= 2)");
    compare->add_option("--workers", cfg.workers, "worker threads (0 = hardware)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? bograph::cli::exit_ok : bograph::cli::exit_usage;
    }

    cfg.subcommand = app.get_subcommands().front()->get_name();
    try {
        if (!d.empty()) cfg.d = bograph::cli::parse_range(d);
        if (!d1.empty()) cfg.d1 = bograph::cli::parse_range(d1);
        if (!d2.empty()) cfg.d2 = bograph::cli::parse_range(d2);
        return bograph::cli::run(cfg);
    } catch (const bograph::resource_error& e) {
        std::cerr << "resource error: " << e.what() << '\n';
        return bograph::cli::exit_resource;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return bograph::cli::exit_usage;
    } catch (const std::domain_error& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return bograph::cli::exit_usage;
    } catch (const std::overflow_error& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return bograph::cli::exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return bograph::cli::exit_resource;
    }
}
