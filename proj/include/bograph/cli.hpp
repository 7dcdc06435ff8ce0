#pragma once

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>

#include "bograph/analytics.hpp"
#include "bograph/calibration.hpp"
#include "bograph/io.hpp"
#include "bograph/model.hpp"
#include "bograph/montecarlo.hpp"
#include "bograph/oracle.hpp"

namespace bograph::cli {

// Exit codes shared by every subcommand.
inline constexpr int exit_ok = 0;
inline constexpr int exit_gate_failure = 1;
inline constexpr int exit_usage = 2;
inline constexpr int exit_resource = 3;

struct Range {
    std::int64_t lo = 0, hi = 0;
    bool set = false;
};

/// Parse "lo..hi" or a single value "v" (=> v..v).
inline Range parse_range(const std::string& text) {
    Range r;
    const auto pos = text.find("..");
    try {
        if (pos == std::string::npos) {
            r.lo = r.hi = std::stoll(text);
        } else {
            r.lo = std::stoll(text.substr(0, pos));
            r.hi = std::stoll(text.substr(pos + 2));
        }
    } catch (const std::exception&) {
        throw std::invalid_argument("bad range: " + text);
    }
    if (r.lo > r.hi) throw std::invalid_argument("empty range: " + text);
    r.set = true;
    return r;
}

struct RunConfig {
    std::string subcommand;
    ModelParams params;
    std::uint64_t t = 0;       // collapsed node count
    std::uint64_t n = 0;       // stage-one node count (generate only, optional)
    std::uint64_t replicas = 0;
    unsigned workers = 0;
    Range d, d1, d2;
    std::string stat = "r";    // oracle table: r | r2 | ex
    std::string out;           // empty -> stdout
    std::string format;        // edges | csv | json
    std::uint64_t mem_cap_mb = 1024;
    bool exact_enum = false;

    std::size_t mem_cap_bytes() const { return std::size_t(mem_cap_mb) << 20; }
};

namespace detail {

inline std::ofstream open_out(const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw resource_error("cannot open for writing: " + path);
    return os;
}

// Writes to the file when a path is set, to stdout otherwise.
template <typename Fn>
inline void with_output(const RunConfig& cfg, Fn&& fn) {
    if (cfg.out.empty()) {
        fn(std::cout);
    } else {
        auto os = open_out(cfg.out);
        fn(os);
        os.flush();
        if (!os) throw resource_error("write failed: " + cfg.out);
    }
}

} // namespace detail

/// generate: sample the model, write the edge-list file (or the degree
/// histogram as d,count CSV with --format csv), print a summary.
inline int cmd_generate(const RunConfig& cfg) {
    cfg.params.validate();
    if (!cfg.format.empty() && cfg.format != "edges" && cfg.format != "csv")
        throw std::invalid_argument("generate supports --format edges|csv");
    std::uint64_t t = cfg.t;
    if (t == 0) {
        if (cfg.n == 0) throw std::invalid_argument("generate requires --t (or --n)");
        if (cfg.n % cfg.params.k != 0)
            throw std::invalid_argument("--n must be divisible by k");
        t = cfg.n / cfg.params.k;
    }

    const auto t0 = std::chrono::steady_clock::now();
    const MultiGraph g = generate(cfg.params, t);
    const auto t1 = std::chrono::steady_clock::now();
    detail::with_output(cfg, [&](std::ostream& os) {
        if (cfg.format == "csv") {
            os << "d,count\n";
            for (const auto& [d, count] : degree_counts(g))
                os << d << ',' << count << '\n';
        } else {
            write_edge_list(os, g, cfg.params, t);
        }
    });
    const auto t2 = std::chrono::steady_clock::now();

    std::uint32_t max_degree = 0;
    for (NodeId s = 1; s <= g.node_count; ++s)
        max_degree = std::max(max_degree, g.degrees[s]);
    const double gen_s = std::chrono::duration<double>(t1 - t0).count();
    const double write_s = std::chrono::duration<double>(t2 - t1).count();
    std::cerr << "t=" << g.node_count << " edges=" << g.edges.size()
              << " max_degree=" << max_degree << " gen_seconds=" << gen_s
              << " edges_per_second="
              << (gen_s > 0 ? double(g.edges.size()) / gen_s : 0.0)
              << " write_seconds=" << write_s << '\n';
    return exit_ok;
}

/// expect: closed-form coefficient tables.
///   degree mode:  d,c_d,c_d_asym,r_main
///   pair mode:    d1,d2,c_X,c_X_asym,lower,upper
inline int cmd_expect(const RunConfig& cfg) {
    cfg.params.validate();
    if (cfg.d1.set != cfg.d2.set)
        throw std::invalid_argument("--d1 and --d2 must be given together");
    if (cfg.d1.set) {
        const std::int64_t hi = std::max(cfg.d1.hi, cfg.d2.hi);
        if (cfg.d1.lo < cfg.params.k || cfg.d2.lo < cfg.params.k)
            throw std::invalid_argument("degrees must be >= k");
        const EdgeCoeffTable cx(cfg.params, std::uint32_t(hi));
        detail::with_output(cfg, [&](std::ostream& os) {
            os << "d1,d2,c_X,c_X_asym,lower,upper\n";
            for (std::int64_t a = cfg.d1.lo; a <= cfg.d1.hi; ++a)
                for (std::int64_t b = cfg.d2.lo; b <= cfg.d2.hi; ++b) {
                    const auto [lo_b, hi_b] = edge_coeff_bounds(a, b, cfg.params);
                    os << a << ',' << b << ',' << format_double(cx.at(a, b)) << ','
                       << format_double(edge_coeff_asymptotic(a, b, cfg.params)) << ','
                       << format_double(lo_b) << ',' << format_double(hi_b) << '\n';
                }
        });
        return exit_ok;
    }
    if (!cfg.d.set) throw std::invalid_argument("expect requires --d or --d1/--d2");
    if (cfg.d.lo < cfg.params.k)
        throw std::invalid_argument("degrees must be >= k");
    const std::uint64_t t = cfg.t > 0 ? cfg.t : 1;
    detail::with_output(cfg, [&](std::ostream& os) {
        os << "d,c_d,c_d_asym,r_main\n";
        for (std::int64_t d = cfg.d.lo; d <= cfg.d.hi; ++d)
            os << d << ',' << format_double(degree_coeff(d, cfg.params)) << ','
               << format_double(degree_coeff_asymptotic(d, cfg.params)) << ','
               << format_double(expected_degree_count_main(d, t, cfg.params)) << '\n';
    });
    return exit_ok;
}

/// oracle: exact expectation tables.
///   --stat r  -> t,d,r           --stat r2 -> d1,d2,r2
///   --stat ex -> d1,d2,EX        --exact-enum uses the rational enumeration
inline int cmd_oracle(const RunConfig& cfg) {
    cfg.params.validate();
    if (cfg.t < 1) throw std::invalid_argument("oracle requires --t >= 1");
    const std::uint32_t k = cfg.params.k;

    if (cfg.stat == "r") {
        const Range d = cfg.d.set
                            ? cfg.d
                            : Range{k, std::int64_t(k) * std::int64_t(cfg.t) + k, true};
        if (cfg.exact_enum) {
            const auto en = enumerate_exact(cfg.params, std::uint32_t(cfg.t), true);
            const auto row = en.degree_expectation(std::uint32_t(d.hi));
            detail::with_output(cfg, [&](std::ostream& os) {
                os << "t,d,r\n";
                for (std::int64_t dd = d.lo; dd <= d.hi; ++dd)
                    os << cfg.t << ',' << dd << ',' << format_double(row[dd]) << '\n';
            });
            return exit_ok;
        }
        const DegreeExpectationTable table(
            cfg.params, cfg.t, {.keep_history = true, .mem_cap_bytes = cfg.mem_cap_bytes()});
        detail::with_output(cfg, [&](std::ostream& os) {
            os << "t,d,r\n";
            for (std::uint64_t tt = 1; tt <= cfg.t; ++tt)
                for (std::int64_t dd = d.lo; dd <= d.hi; ++dd)
                    os << tt << ',' << dd << ',' << format_double(table.value(dd, tt))
                       << '\n';
        });
        return exit_ok;
    }

    if (cfg.stat != "r2" && cfg.stat != "ex")
        throw std::invalid_argument("--stat must be one of r, r2, ex");
    const Range d1 = cfg.d1.set ? cfg.d1 : Range{k, 2 * std::int64_t(k), true};
    const Range d2 = cfg.d2.set ? cfg.d2 : d1;
    const std::int64_t hi = std::max(d1.hi, d2.hi);

    if (cfg.exact_enum) {
        const auto en = enumerate_exact(cfg.params, std::uint32_t(cfg.t), true);
        const auto grid = cfg.stat == "r2" ? en.joint_expectation(std::uint32_t(hi))
                                           : en.edge_expectation(std::uint32_t(hi));
        detail::with_output(cfg, [&](std::ostream& os) {
            os << (cfg.stat == "r2" ? "d1,d2,r2\n" : "d1,d2,EX\n");
            for (std::int64_t a = d1.lo; a <= d1.hi; ++a)
                for (std::int64_t b = d2.lo; b <= d2.hi; ++b)
                    os << a << ',' << b << ',' << format_double(grid[a][b]) << '\n';
        });
        return exit_ok;
    }

    const std::uint32_t cap = std::uint32_t(std::max<std::int64_t>(hi, 2 * k));
    const PairExpectationTables tables(cfg.params, cfg.t, cap, cfg.mem_cap_bytes());
    detail::with_output(cfg, [&](std::ostream& os) {
        os << (cfg.stat == "r2" ? "d1,d2,r2\n" : "d1,d2,EX\n");
        for (std::int64_t a = d1.lo; a <= d1.hi; ++a)
            for (std::int64_t b = d2.lo; b <= d2.hi; ++b)
                os << a << ',' << b << ','
                   << format_double(cfg.stat == "r2" ? tables.joint(a, b)
                                                     : tables.edge_expectation(a, b))
                   << '\n';
    });
    return exit_ok;
}

/// mc: run a campaign and emit the report (JSON by default, CSV tables with
/// --format csv). Exit code 1 if the built-in audit or a tail gate fails.
inline int cmd_mc(const RunConfig& cfg) {
    cfg.params.validate();
    if (cfg.t < 1) throw std::invalid_argument("mc requires --t >= 1");
    if (cfg.replicas < 2) throw std::invalid_argument("mc requires --replicas >= 2");

    McConfig mc;
    mc.params = cfg.params;
    mc.t = cfg.t;
    mc.replicas = cfg.replicas;
    mc.workers = cfg.workers;
    const std::uint32_t k = cfg.params.k;
    mc.degree_max = cfg.d.set ? std::uint32_t(cfg.d.hi) : 2 * k;
    if (cfg.d1.set && cfg.d2.set)
        mc.edge_degree_max = std::uint32_t(std::max(cfg.d1.hi, cfg.d2.hi));
    if (double(mc.t) * double(mc.replicas) > 2e9)
        throw resource_error("t * replicas too large; reduce one of them");

    McReport report;
    if (cfg.d1.set && cfg.d2.set && cfg.d1.lo == cfg.d1.hi && cfg.d2.lo == cfg.d2.hi) {
        // Single edge cell requested: attach the deviation tail table.
        report = edge_tail_campaign(cfg.params, std::uint32_t(cfg.d1.lo),
                                    std::uint32_t(cfg.d2.lo), cfg.t, cfg.replicas,
                                    {1.0, 2.0, 4.0, 6.0}, cfg.workers);
    } else {
        report = run_campaign(mc);
    }
    detail::with_output(cfg, [&](std::ostream& os) {
        if (cfg.format == "csv") {
            if (!report.degree_mean.empty()) report.write_degree_csv(os);
            if (!report.x_mean.empty()) report.write_x_csv(os);
            if (!report.tail.empty()) report.write_tail_csv(os);
        } else {
            os << report.to_json().dump(2) << '\n';
        }
    });
    const bool ok = report.audit_failures == 0 && check_tail_table(report);
    return ok ? exit_ok : exit_gate_failure;
}

/// compare: join Monte Carlo means with oracle and closed-form values per
/// cell, with z-scores. Degree mode gates sample means against the oracle at
/// 4 SE; pair mode also reports the ratio X/(c_X t), ungated.
inline int cmd_compare(const RunConfig& cfg) {
    cfg.params.validate();
    if (cfg.t < 1) throw std::invalid_argument("compare requires --t >= 1");
    if (cfg.replicas < 2) throw std::invalid_argument("compare requires --replicas >= 2");
    const std::uint32_t k = cfg.params.k;

    const bool pair_mode = cfg.d1.set && cfg.d2.set;
    McConfig mc;
    mc.params = cfg.params;
    mc.t = cfg.t;
    mc.replicas = cfg.replicas;
    mc.workers = cfg.workers;

    if (!pair_mode) {
        const Range d = cfg.d.set ? cfg.d : Range{k, 2 * std::int64_t(k), true};
        mc.degree_max = std::uint32_t(d.hi);
        const McReport report = run_campaign(mc);
        const DegreeExpectationTable oracle(
            cfg.params, cfg.t,
            {.keep_history = false, .mem_cap_bytes = cfg.mem_cap_bytes()});
        const auto gate =
            check_degree_expectation(report, oracle, std::uint32_t(d.hi));
        detail::with_output(cfg, [&](std::ostream& os) {
            os << "d,mc_mean,mc_se,oracle_r,closed_r,z,pass\n";
            for (const auto& cell : gate.cells) {
                if (cell.d1 < d.lo) continue;
                os << cell.d1 << ',' << format_double(cell.sample) << ','
                   << format_double(cell.se) << ',' << format_double(cell.target) << ','
                   << format_double(expected_degree_count_main(cell.d1, cfg.t, cfg.params))
                   << ',' << format_double(cell.z) << ',' << (cell.pass ? 1 : 0) << '\n';
            }
        });
        std::cerr << "cells=" << gate.cells.size() << " failures=" << gate.failures
                  << " allowed=" << gate.allowed_failures << '\n';
        return gate.pass && report.audit_failures == 0 ? exit_ok : exit_gate_failure;
    }

    const std::int64_t hi = std::max(cfg.d1.hi, cfg.d2.hi);
    if (cfg.d1.lo < k || cfg.d2.lo < k)
        throw std::invalid_argument("degrees must be >= k");
    mc.edge_degree_max = std::uint32_t(hi);
    const McReport report = run_campaign(mc);
    const std::uint32_t cap = std::uint32_t(std::max<std::int64_t>(hi, 2 * k));
    const PairExpectationTables oracle(cfg.params, cfg.t, cap, cfg.mem_cap_bytes());
    const EdgeCoeffTable cx(cfg.params, std::uint32_t(hi));

    std::uint64_t failures = 0, cells = 0;
    detail::with_output(cfg, [&](std::ostream& os) {
        os << "d1,d2,mc_mean,mc_se,oracle_ex,closed_ex,ratio,z,pass\n";
        for (std::int64_t a = cfg.d1.lo; a <= cfg.d1.hi; ++a)
            for (std::int64_t b = cfg.d2.lo; b <= cfg.d2.hi; ++b) {
                const double mean = report.x_mean[a - k][b - k];
                const double var = report.x_var[a - k][b - k];
                const double se = std::sqrt(var / double(cfg.replicas));
                const double target = oracle.edge_expectation(a, b);
                const double closed = cx.at(a, b) * double(cfg.t);
                const double ratio = closed > 0 ? mean / closed : 0.0;
                const double dist = std::abs(mean - target);
                const double z = se > 0 ? dist / se : (dist == 0 ? 0.0 : 1e308);
                const bool pass = z <= 4.0;
                cells += 1;
                if (!pass) failures += 1;
                os << a << ',' << b << ',' << format_double(mean) << ','
                   << format_double(se) << ',' << format_double(target) << ','
                   << format_double(closed) << ',' << format_double(ratio) << ','
                   << format_double(z) << ',' << (pass ? 1 : 0) << '\n';
            }
    });
    const double allowed = failure_budget_uniform(cells, gaussian_tail(4.0));
    std::cerr << "cells=" << cells << " failures=" << failures << " allowed=" << allowed
              << '\n';
    return double(failures) <= allowed && report.audit_failures == 0
               ? exit_ok
               : exit_gate_failure;
}

inline int run(const RunConfig& cfg) {
    if (cfg.subcommand == "generate") return cmd_generate(cfg);
    if (cfg.subcommand == "expect") return cmd_expect(cfg);
    if (cfg.subcommand == "oracle") return cmd_oracle(cfg);
    if (cfg.subcommand == "mc") return cmd_mc(cfg);
    if (cfg.subcommand == "compare") return cmd_compare(cfg);
    throw std::invalid_argument("unknown subcommand: " + cfg.subcommand);
}

} // namespace bograph::cli
