#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "bograph/analytics.hpp"
#include "bograph/io.hpp"
#include "bograph/model.hpp"
#include "bograph/oracle.hpp"

namespace bograph {

/// Campaign request. Statistics are opt-in: a degree-count panel up to
/// degree_max, the covariance grid over [k, degree_max], the edge-count
/// panel up to edge_degree_max, and a tail table for one (d1, d2) cell.
struct McConfig {
    ModelParams params;
    std::uint64_t t = 1;
    std::uint64_t replicas = 2;
    unsigned workers = 0; // 0 -> hardware concurrency

    std::uint32_t degree_max = 0;
    bool covariance = false;
    std::uint32_t edge_degree_max = 0;

    struct TailSpec {
        bool enabled = false;
        std::uint32_t d1 = 0, d2 = 0;
        double expectation = 0.0; // EX target the deviation is measured from
        std::vector<double> c_grid;
    } tail;

    void validate() const {
        params.validate();
        if (t < 1) throw std::invalid_argument("t must be >= 1");
        if (replicas < 2) throw std::invalid_argument("replicas must be >= 2");
        if (covariance && degree_max < params.k)
            throw std::invalid_argument("covariance needs degree_max >= k");
        if (tail.enabled &&
            (edge_degree_max < tail.d1 || edge_degree_max < tail.d2))
            throw std::invalid_argument("tail cell must lie within edge_degree_max");
    }
};

/// Campaign result. Everything is reduced from per-replica integer
/// statistics in replica order, so reports are bit-identical for any worker
/// count.
struct McReport {
    std::string schema = "bograph.mc-report/1";
    ModelParams params;
    std::uint64_t t = 0;
    std::uint64_t replicas = 0;
    std::vector<std::string> statistics;

    std::uint32_t degree_max = 0;
    std::vector<double> degree_mean, degree_var; // index d = 0..degree_max

    std::uint32_t cov_lo = 0; // first degree of the covariance grid (= k)
    std::vector<std::vector<double>> cov, cov_se; // [d1-cov_lo][d2-cov_lo]

    std::uint32_t edge_degree_lo = 0, edge_degree_max = 0;
    std::vector<std::vector<double>> x_mean, x_var; // [d1-lo][d2-lo]

    struct TailRow {
        double c = 0, threshold = 0, freq = 0, bound = 0;
    };
    std::uint32_t tail_d1 = 0, tail_d2 = 0;
    double tail_expectation = 0;
    std::string tail_source; // "oracle" or "sample_mean"
    std::vector<TailRow> tail;

    std::uint64_t audited = 0;
    std::uint64_t audit_failures = 0;

    double degree_se(std::uint32_t d) const {
        return std::sqrt(degree_var[d] / double(replicas));
    }

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        j["schema"] = schema;
        j["params"] = {{"a", params.a}, {"k", params.k}, {"seed", params.seed}};
        j["t"] = t;
        j["replicas"] = replicas;
        j["statistics"] = statistics;
        if (degree_max > 0) {
            j["degree_max"] = degree_max;
            j["degree_mean"] = degree_mean;
            j["degree_var"] = degree_var;
            std::vector<double> se(degree_max + 1);
            for (std::uint32_t d = 0; d <= degree_max; ++d) se[d] = degree_se(d);
            j["degree_se"] = se;
        }
        if (!cov.empty()) {
            j["cov_lo"] = cov_lo;
            j["cov"] = cov;
            j["cov_se"] = cov_se;
        }
        if (!x_mean.empty()) {
            j["edge_degree_lo"] = edge_degree_lo;
            j["edge_degree_max"] = edge_degree_max;
            j["x_mean"] = x_mean;
            j["x_var"] = x_var;
        }
        if (!tail.empty()) {
            j["tail_d1"] = tail_d1;
            j["tail_d2"] = tail_d2;
            j["tail_expectation"] = tail_expectation;
            if (!tail_source.empty()) j["tail_source"] = tail_source;
            auto rows = nlohmann::ordered_json::array();
            for (const auto& row : tail)
                rows.push_back({{"c", row.c},
                                {"threshold", row.threshold},
                                {"freq", row.freq},
                                {"bound", row.bound}});
            j["tail"] = rows;
        }
        j["audited"] = audited;
        j["audit_failures"] = audit_failures;
        return j;
    }

    void write_degree_csv(std::ostream& os) const {
        os << "d,mean,var,se\n";
        for (std::uint32_t d = 0; d <= degree_max; ++d)
            os << d << ',' << format_double(degree_mean[d]) << ','
               << format_double(degree_var[d]) << ',' << format_double(degree_se(d))
               << '\n';
    }

    void write_cov_csv(std::ostream& os) const {
        os << "d1,d2,cov,se\n";
        for (std::size_t i = 0; i < cov.size(); ++i)
            for (std::size_t j = 0; j < cov.size(); ++j)
                os << cov_lo + i << ',' << cov_lo + j << ','
                   << format_double(cov[i][j]) << ',' << format_double(cov_se[i][j])
                   << '\n';
    }

    void write_x_csv(std::ostream& os) const {
        os << "d1,d2,mean,var\n";
        for (std::size_t i = 0; i < x_mean.size(); ++i)
            for (std::size_t j = 0; j < x_mean.size(); ++j)
                os << edge_degree_lo + i << ',' << edge_degree_lo + j << ','
                   << format_double(x_mean[i][j]) << ',' << format_double(x_var[i][j])
                   << '\n';
    }

    void write_tail_csv(std::ostream& os) const {
        os << "c,threshold,freq,bound\n";
        for (const auto& row : tail)
            os << format_double(row.c) << ',' << format_double(row.threshold) << ','
               << format_double(row.freq) << ',' << format_double(row.bound) << '\n';
    }
};

namespace detail {

// Per-block integer accumulators. Counts and their products are exact in
// 64/128-bit integers, so the final reduction is order-insensitive by
// construction; blocks are still merged in index order.
struct McBlock {
    std::vector<std::uint64_t> deg_sum, deg_sumsq;
    std::vector<unsigned __int128> cross_xy, cross_x2y, cross_xy2, cross_x2y2;
    std::vector<std::uint64_t> x_sum, x_sumsq;
    std::vector<std::uint64_t> tail_count;
    std::uint64_t audited = 0, audit_failures = 0;
};

inline void audit_graph(const MultiGraph& g, const ModelParams& p, std::uint64_t t,
                        McBlock& blk) {
    blk.audited += 1;
    bool ok = g.node_count == t && g.edges.size() == std::uint64_t(p.k) * t;
    if (ok) {
        std::uint64_t sum = 0;
        std::uint32_t dmin = ~0u;
        for (NodeId s = 1; s <= g.node_count; ++s) {
            sum += g.degrees[s];
            dmin = std::min(dmin, g.degrees[s]);
        }
        ok = sum == 2 * std::uint64_t(p.k) * t && dmin >= p.k;
    }
    if (!ok) blk.audit_failures += 1;
}

} // namespace detail

/// Run `replicas` independent generations of the model at size t and reduce
/// the requested statistics. Replica r uses substream_seed(seed, r); work is
/// dealt out in fixed 1024-replica blocks, accumulated in exact integer
/// sums, and merged in block order, so the report does not depend on the
/// worker count or the scheduling.
inline McReport run_campaign(const McConfig& cfg) {
    cfg.validate();
    const std::uint64_t N = cfg.replicas;
    const std::uint32_t k = cfg.params.k;
    const std::uint32_t dmax = cfg.degree_max;
    const std::size_t cov_n = cfg.covariance ? std::size_t(dmax) - k + 1 : 0;
    const std::uint32_t xmax = cfg.edge_degree_max;
    const std::size_t x_n = xmax >= k ? std::size_t(xmax) - k + 1 : 0;

    std::vector<double> tail_thresholds;
    if (cfg.tail.enabled)
        for (double c : cfg.tail.c_grid)
            tail_thresholds.push_back(c * double(cfg.tail.d1 + cfg.tail.d2) *
                                      std::sqrt(double(k) * double(cfg.t)));

    constexpr std::uint64_t block_size = 1024;
    const std::uint64_t num_blocks = (N + block_size - 1) / block_size;
    std::vector<detail::McBlock> blocks(num_blocks);

    std::atomic<std::uint64_t> next_block{0};
    const auto worker = [&]() {
        for (;;) {
            const std::uint64_t b = next_block.fetch_add(1);
            if (b >= num_blocks) return;
            detail::McBlock& blk = blocks[b];
            if (dmax > 0) {
                blk.deg_sum.assign(dmax + 1, 0);
                blk.deg_sumsq.assign(dmax + 1, 0);
            }
            if (cov_n > 0) {
                blk.cross_xy.assign(cov_n * cov_n, 0);
                blk.cross_x2y.assign(cov_n * cov_n, 0);
                blk.cross_xy2.assign(cov_n * cov_n, 0);
                blk.cross_x2y2.assign(cov_n * cov_n, 0);
            }
            if (x_n > 0) {
                blk.x_sum.assign(x_n * x_n, 0);
                blk.x_sumsq.assign(x_n * x_n, 0);
            }
            blk.tail_count.assign(tail_thresholds.size(), 0);

            std::vector<std::uint32_t> cnt(dmax + 1);
            std::vector<std::uint32_t> xm(x_n * x_n);
            const std::uint64_t lo = b * block_size;
            const std::uint64_t hi = std::min(N, lo + block_size);
            for (std::uint64_t rep = lo; rep < hi; ++rep) {
                ModelParams rp = cfg.params;
                rp.seed = substream_seed(cfg.params.seed, rep);
                const MultiGraph g = generate(rp, cfg.t);
                if (rep % 100 == 0) detail::audit_graph(g, cfg.params, cfg.t, blk);

                if (dmax > 0) {
                    std::fill(cnt.begin(), cnt.end(), 0);
                    for (NodeId s = 1; s <= g.node_count; ++s)
                        if (g.degrees[s] <= dmax) cnt[g.degrees[s]] += 1;
                    for (std::uint32_t d = 0; d <= dmax; ++d) {
                        const std::uint64_t x = cnt[d];
                        blk.deg_sum[d] += x;
                        blk.deg_sumsq[d] += x * x;
                    }
                    if (cov_n > 0) {
                        for (std::size_t i = 0; i < cov_n; ++i) {
                            const std::uint64_t x = cnt[k + i];
                            const std::uint64_t xx = x * x;
                            for (std::size_t j = 0; j < cov_n; ++j) {
                                const std::uint64_t y = cnt[k + j];
                                const std::size_t c = i * cov_n + j;
                                blk.cross_xy[c] += x * y;
                                blk.cross_x2y[c] += static_cast<unsigned __int128>(xx) * y;
                                blk.cross_xy2[c] += static_cast<unsigned __int128>(x) * (y * y);
                                blk.cross_x2y2[c] += static_cast<unsigned __int128>(xx) * (y * y);
                            }
                        }
                    }
                }
                if (x_n > 0) {
                    std::fill(xm.begin(), xm.end(), 0);
                    for (const Edge& e : g.edges) {
                        if (e.u == e.v) continue;
                        const std::uint32_t du = g.degrees[e.u];
                        const std::uint32_t dv = g.degrees[e.v];
                        if (du >= k && du <= xmax && dv >= k && dv <= xmax) {
                            xm[(du - k) * x_n + (dv - k)] += 1;
                            xm[(dv - k) * x_n + (du - k)] += 1;
                        }
                    }
                    for (std::size_t c = 0; c < x_n * x_n; ++c) {
                        const std::uint64_t x = xm[c];
                        blk.x_sum[c] += x;
                        blk.x_sumsq[c] += x * x;
                    }
                    if (cfg.tail.enabled) {
                        const double x = double(
                            xm[(cfg.tail.d1 - k) * x_n + (cfg.tail.d2 - k)]);
                        const double dev = std::abs(x - cfg.tail.expectation);
                        for (std::size_t ci = 0; ci < tail_thresholds.size(); ++ci)
                            if (dev >= tail_thresholds[ci]) blk.tail_count[ci] += 1;
                    }
                }
            }
        }
    };

    unsigned workers = cfg.workers != 0 ? cfg.workers
                                        : std::max(1u, std::thread::hardware_concurrency());
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    // Reduce in block order.
    detail::McBlock total;
    total.deg_sum.assign(dmax + 1, 0);
    total.deg_sumsq.assign(dmax + 1, 0);
    total.cross_xy.assign(cov_n * cov_n, 0);
    total.cross_x2y.assign(cov_n * cov_n, 0);
    total.cross_xy2.assign(cov_n * cov_n, 0);
    total.cross_x2y2.assign(cov_n * cov_n, 0);
    total.x_sum.assign(x_n * x_n, 0);
    total.x_sumsq.assign(x_n * x_n, 0);
    total.tail_count.assign(tail_thresholds.size(), 0);
    for (const auto& blk : blocks) {
        for (std::size_t i = 0; i < blk.deg_sum.size(); ++i) {
            total.deg_sum[i] += blk.deg_sum[i];
            total.deg_sumsq[i] += blk.deg_sumsq[i];
        }
        for (std::size_t i = 0; i < blk.cross_xy.size(); ++i) {
            total.cross_xy[i] += blk.cross_xy[i];
            total.cross_x2y[i] += blk.cross_x2y[i];
            total.cross_xy2[i] += blk.cross_xy2[i];
            total.cross_x2y2[i] += blk.cross_x2y2[i];
        }
        for (std::size_t i = 0; i < blk.x_sum.size(); ++i) {
            total.x_sum[i] += blk.x_sum[i];
            total.x_sumsq[i] += blk.x_sumsq[i];
        }
        for (std::size_t i = 0; i < blk.tail_count.size(); ++i)
            total.tail_count[i] += blk.tail_count[i];
        total.audited += blk.audited;
        total.audit_failures += blk.audit_failures;
    }

    McReport rep;
    rep.params = cfg.params;
    rep.t = cfg.t;
    rep.replicas = N;
    rep.audited = total.audited;
    rep.audit_failures = total.audit_failures;
    const double n = double(N);

    if (dmax > 0) {
        rep.statistics.push_back("degree_counts");
        rep.degree_max = dmax;
        rep.degree_mean.resize(dmax + 1);
        rep.degree_var.resize(dmax + 1);
        for (std::uint32_t d = 0; d <= dmax; ++d) {
            const double s1 = double(total.deg_sum[d]);
            const double s2 = double(total.deg_sumsq[d]);
            rep.degree_mean[d] = s1 / n;
            rep.degree_var[d] = std::max(0.0, (s2 - s1 * s1 / n) / (n - 1.0));
        }
    }
    if (cov_n > 0) {
        rep.statistics.push_back("degree_covariance");
        rep.cov_lo = k;
        rep.cov.assign(cov_n, std::vector<double>(cov_n, 0.0));
        rep.cov_se.assign(cov_n, std::vector<double>(cov_n, 0.0));
        for (std::size_t i = 0; i < cov_n; ++i) {
            for (std::size_t j = 0; j < cov_n; ++j) {
                const std::size_t c = i * cov_n + j;
                const double ex = rep.degree_mean[k + i];
                const double ey = rep.degree_mean[k + j];
                const double exy = double(total.cross_xy[c]) / n;
                const double ex2 = double(total.deg_sumsq[k + i]) / n;
                const double ey2 = double(total.deg_sumsq[k + j]) / n;
                const double ex2y = double(total.cross_x2y[c]) / n;
                const double exy2 = double(total.cross_xy2[c]) / n;
                const double ex2y2 = double(total.cross_x2y2[c]) / n;
                const double cov = (exy - ex * ey) * n / (n - 1.0);
                // E[(X-ex)^2 (Y-ey)^2], expanded in raw moments.
                const double m22 = ex2y2 - 2.0 * ey * ex2y - 2.0 * ex * exy2 +
                                   ey * ey * ex2 + ex * ex * ey2 +
                                   4.0 * ex * ey * exy - 3.0 * ex * ex * ey * ey;
                rep.cov[i][j] = cov;
                rep.cov_se[i][j] = std::sqrt(std::max(0.0, m22 - cov * cov) / n);
            }
        }
    }
    if (x_n > 0) {
        rep.statistics.push_back("edge_counts");
        rep.edge_degree_lo = k;
        rep.edge_degree_max = xmax;
        rep.x_mean.assign(x_n, std::vector<double>(x_n, 0.0));
        rep.x_var.assign(x_n, std::vector<double>(x_n, 0.0));
        for (std::size_t i = 0; i < x_n; ++i)
            for (std::size_t j = 0; j < x_n; ++j) {
                const std::size_t c = i * x_n + j;
                const double s1 = double(total.x_sum[c]);
                const double s2 = double(total.x_sumsq[c]);
                rep.x_mean[i][j] = s1 / n;
                rep.x_var[i][j] = std::max(0.0, (s2 - s1 * s1 / n) / (n - 1.0));
            }
    }
    if (cfg.tail.enabled) {
        rep.statistics.push_back("tail_frequencies");
        rep.tail_d1 = cfg.tail.d1;
        rep.tail_d2 = cfg.tail.d2;
        rep.tail_expectation = cfg.tail.expectation;
        for (std::size_t ci = 0; ci < tail_thresholds.size(); ++ci) {
            McReport::TailRow row;
            row.c = cfg.tail.c_grid[ci];
            row.threshold = tail_thresholds[ci];
            row.freq = double(total.tail_count[ci]) / n;
            row.bound = azuma_tail_bound(row.c);
            rep.tail.push_back(row);
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Gated comparisons

struct GateCell {
    std::int64_t d1 = 0, d2 = 0; // d2 unused for one-dimensional panels
    double sample = 0, se = 0, target = 0, z = 0;
    bool pass = true;
};

struct GateReport {
    std::vector<GateCell> cells;
    std::uint64_t failures = 0;
    double allowed_failures = 0;
    double pass_rate = 1.0;
    bool pass = true;
};

/// Two-sided Gaussian tail beyond z standard errors.
inline double gaussian_tail(double z) { return std::erfc(z / std::sqrt(2.0)); }

/// Failure budget for m independent cells each failing with probability
/// alpha: mean + 4 sigma of the binomial count.
inline double failure_budget(double alpha_sum, double alpha_var_sum) {
    return alpha_sum + 4.0 * std::sqrt(std::max(0.0, alpha_var_sum));
}

inline double failure_budget_uniform(std::uint64_t m, double alpha) {
    return failure_budget(double(m) * alpha, double(m) * alpha * (1.0 - alpha));
}

/// Per-cell probability that a frequency estimate from n draws at success
/// probability p lands more than `gate` standard errors from p. Uses the
/// Poisson law when np is small, where the Gaussian tail is badly off.
inline double frequency_gate_alpha(double p, double n, double gate = 4.0) {
    if (!(p > 0.0)) return 0.0;
    const double lambda = n * p;
    if (lambda >= 50.0 && n * (1.0 - p) >= 50.0) return gaussian_tail(gate);
    const double radius = gate * std::sqrt(lambda * (1.0 - p));
    // Poisson mass outside [lambda - radius, lambda + radius].
    double alpha = 0.0;
    double logpmf = -lambda; // j = 0
    for (std::uint64_t j = 0;; ++j) {
        const double dj = double(j);
        if (std::abs(dj - lambda) > radius) alpha += std::exp(logpmf);
        if (dj > lambda + radius && (logpmf < -45.0 || dj > lambda + radius + 200.0))
            break;
        logpmf += std::log(lambda) - std::log(dj + 1.0);
    }
    return std::min(alpha, 1.0);
}

/// Compare a panel of sample means against targets at `gate` standard
/// errors. An optional per-cell half-width band widens each target to an
/// interval (distance to the interval is what the gate tests). A cell whose
/// sample never varied (se = 0) is judged by a Poisson zero-observation
/// rule instead: the unobserved mass replicas * dist must be small enough
/// to clear the same false-alarm level as the z gate.
inline GateReport check_mean_panel(const std::vector<double>& mean,
                                   const std::vector<double>& se,
                                   const std::vector<double>& target,
                                   const std::vector<double>& band, double gate,
                                   std::int64_t d_offset, std::uint64_t replicas) {
    GateReport rep;
    const double zero_mass_cap = -std::log(gaussian_tail(gate)); // 9.67 at gate 4
    for (std::size_t i = 0; i < mean.size(); ++i) {
        GateCell cell;
        cell.d1 = d_offset + std::int64_t(i);
        cell.sample = mean[i];
        cell.se = se[i];
        cell.target = target[i];
        const double half = band.empty() ? 0.0 : band[i];
        const double dist = std::max(0.0, std::abs(mean[i] - target[i]) - half);
        if (se[i] > 0.0) {
            cell.z = dist / se[i];
            cell.pass = cell.z <= gate;
        } else {
            cell.z = dist == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
            cell.pass = double(replicas) * dist <= zero_mass_cap;
        }
        if (!cell.pass) rep.failures += 1;
        rep.cells.push_back(cell);
    }
    rep.allowed_failures =
        failure_budget_uniform(rep.cells.size(), gaussian_tail(gate));
    rep.pass_rate = rep.cells.empty()
                        ? 1.0
                        : 1.0 - double(rep.failures) / double(rep.cells.size());
    rep.pass = double(rep.failures) <= rep.allowed_failures;
    return rep;
}

namespace detail {

inline void require_matching(const ModelParams& a, std::uint64_t ta,
                             const ModelParams& b, std::uint64_t tb) {
    if (a.a != b.a || a.k != b.k || ta != tb)
        throw std::invalid_argument("oracle table does not match the campaign");
}

} // namespace detail

/// Sample means of R(d,t) vs. the exact oracle values r(d,t) for d = k..d_hi.
/// Also reports |r(d,t) - c(d) t| per cell (the closed-form defect).
inline GateReport check_degree_expectation(const McReport& mc,
                                           const DegreeExpectationTable& oracle,
                                           std::uint32_t d_hi, double gate = 4.0) {
    detail::require_matching(mc.params, mc.t, oracle.params(), oracle.t_max());
    const std::uint32_t k = mc.params.k;
    std::vector<double> mean, se, target;
    for (std::uint32_t d = k; d <= d_hi; ++d) {
        mean.push_back(mc.degree_mean[d]);
        se.push_back(mc.degree_se(d));
        target.push_back(oracle.value(d, mc.t));
    }
    return check_mean_panel(mean, se, target, {}, gate, k, mc.replicas);
}

/// Per-degree closed-form defect |r(d,t) - c(d) t| alongside the oracle row.
inline std::vector<double> closed_form_defect(const DegreeExpectationTable& oracle,
                                              std::uint32_t d_hi) {
    std::vector<double> out;
    for (std::uint32_t d = oracle.params().k; d <= d_hi; ++d)
        out.push_back(std::abs(oracle.value(d, oracle.t_max()) -
                               degree_coeff(d, oracle.params()) *
                                   double(oracle.t_max())));
    return out;
}

/// Empirical covariance grid vs. oracle covariances, plus the envelope
/// check |cov| <= covariance_bound(d1,d2,t,scale) recorded per cell.
struct CovarianceCheck {
    GateReport z_gate;
    std::uint64_t bound_violations = 0;
    double max_bound_ratio = 0.0;
};

inline CovarianceCheck check_degree_covariance(const McReport& mc,
                                               const PairExpectationTables& oracle,
                                               double bound_scale, double gate = 4.0) {
    detail::require_matching(mc.params, mc.t, oracle.params(), oracle.t());
    CovarianceCheck out;
    const std::uint32_t lo = mc.cov_lo;
    for (std::size_t i = 0; i < mc.cov.size(); ++i) {
        for (std::size_t j = 0; j < mc.cov.size(); ++j) {
            GateCell cell;
            cell.d1 = std::int64_t(lo + i);
            cell.d2 = std::int64_t(lo + j);
            cell.sample = mc.cov[i][j];
            cell.se = mc.cov_se[i][j];
            cell.target = oracle.covariance(cell.d1, cell.d2);
            const double dist = std::abs(cell.sample - cell.target);
            cell.z = cell.se > 0.0
                         ? dist / cell.se
                         : (dist == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
            cell.pass = cell.z <= gate;
            if (!cell.pass) out.z_gate.failures += 1;
            out.z_gate.cells.push_back(cell);

            const double bound =
                covariance_bound(cell.d1, cell.d2, mc.t, mc.params, bound_scale);
            const double ratio = std::abs(cell.sample) / bound;
            out.max_bound_ratio = std::max(out.max_bound_ratio, ratio);
            if (ratio > 1.0) out.bound_violations += 1;
        }
    }
    out.z_gate.allowed_failures =
        failure_budget_uniform(out.z_gate.cells.size(), gaussian_tail(gate));
    out.z_gate.pass_rate =
        1.0 - double(out.z_gate.failures) / double(out.z_gate.cells.size());
    out.z_gate.pass = double(out.z_gate.failures) <= out.z_gate.allowed_failures;
    return out;
}

/// Tail table gate: every empirical frequency must sit at or below
/// bound + 4 sqrt(freq (1-freq) / N).
inline bool check_tail_table(const McReport& mc, double gate = 4.0) {
    for (const auto& row : mc.tail) {
        const double se = std::sqrt(row.freq * (1.0 - row.freq) / double(mc.replicas));
        if (row.freq > row.bound + gate * se) return false;
    }
    return true;
}

/// Campaign measuring how often |X(d1,d2,t) - EX| exceeds c (d1+d2) sqrt(kt)
/// for each c in the grid. EX comes from the exact DP oracle when t is small
/// enough; beyond that a first pass over the same substreams supplies the
/// sample mean (the report's tail_source says which).
inline McReport edge_tail_campaign(const ModelParams& p, std::uint32_t d1,
                                   std::uint32_t d2, std::uint64_t t, std::uint64_t N,
                                   std::vector<double> c_grid, unsigned workers = 0,
                                   std::uint64_t oracle_t_limit = 4000) {
    McConfig cfg;
    cfg.params = p;
    cfg.t = t;
    cfg.replicas = N;
    cfg.workers = workers;
    cfg.edge_degree_max = std::max(std::max(d1, d2), p.k);

    double ex;
    std::string source;
    if (t <= oracle_t_limit) {
        const std::uint32_t cap = std::max(cfg.edge_degree_max, 2 * p.k);
        ex = PairExpectationTables(p, t, cap).edge_expectation(d1, d2);
        source = "oracle";
    } else {
        const McReport pre = run_campaign(cfg);
        ex = pre.x_mean[d1 - p.k][d2 - p.k];
        source = "sample_mean";
    }
    cfg.tail = {true, d1, d2, ex, std::move(c_grid)};
    McReport rep = run_campaign(cfg);
    rep.tail_source = source;
    return rep;
}

/// Fraction of replicas violating the concentration inequality
/// |R(d,t) - c(d) t| <= window(d, t, psi).
inline double concentration_violation_fraction(const ModelParams& p, std::uint64_t t,
                                               std::uint32_t d, std::uint64_t replicas,
                                               double psi) {
    const double center = expected_degree_count_main(d, t, p);
    const double window = concentration_window(d, t, psi, p);
    std::uint64_t violations = 0;
    for (std::uint64_t rep = 0; rep < replicas; ++rep) {
        ModelParams rp = p;
        rp.seed = substream_seed(p.seed, rep);
        const MultiGraph g = generate(rp, t);
        std::uint64_t count = 0;
        for (NodeId s = 1; s <= g.node_count; ++s)
            if (g.degrees[s] == d) ++count;
        if (std::abs(double(count) - center) > window) ++violations;
    }
    return double(violations) / double(replicas);
}

/// For every degree d >= d_cut observed, the fraction of replicas with at
/// least one degree-d node; returns the maximum fraction.
inline double max_presence_fraction_above(const ModelParams& p, std::uint64_t t,
                                          std::uint32_t d_cut, std::uint64_t replicas) {
    std::map<std::uint32_t, std::uint64_t> present;
    for (std::uint64_t rep = 0; rep < replicas; ++rep) {
        ModelParams rp = p;
        rp.seed = substream_seed(p.seed, rep);
        const MultiGraph g = generate(rp, t);
        std::map<std::uint32_t, bool> seen;
        for (NodeId s = 1; s <= g.node_count; ++s)
            if (g.degrees[s] >= d_cut) seen[g.degrees[s]] = true;
        for (const auto& [d, _] : seen) present[d] += 1;
    }
    double worst = 0.0;
    for (const auto& [d, cnt] : present)
        worst = std::max(worst, double(cnt) / double(replicas));
    return worst;
}

} // namespace bograph
