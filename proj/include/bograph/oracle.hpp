#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "bograph/model.hpp"

namespace bograph {

/// Distribution of the degree a new node ends up with after its k edges are
/// placed, when t nodes already exist. Index l corresponds to degree k + l
/// (l = number of the k edges that came out as loops). The DP state is the
/// loop count; before step i the new node's degree is (i-1) + l and its
/// attachment weight works out to i*a + l.
inline std::vector<double> new_node_degree_dist(const ModelParams& p, std::uint64_t t) {
    p.validate();
    if (t < 1) throw std::invalid_argument("t must be >= 1");
    const double a = p.a;
    std::vector<double> state(p.k + 1, 0.0);
    state[0] = 1.0;
    for (std::uint32_t i = 1; i <= p.k; ++i) {
        const double T = (a + 1.0) * (double(p.k) * double(t) + double(i)) - 1.0;
        for (std::uint32_t l = i; l-- > 0;) {
            const double q = (double(i) * a + double(l)) / T;
            state[l + 1] += state[l] * q;
            state[l] *= (1.0 - q);
        }
    }
    return state;
}

namespace detail {

// One attachment substep applied to a row of expected degree counts over the
// existing nodes:
//   row[d] <- row[d-1] w(d-1) + row[d] (1 - w(d)),  w(x) = (x + k(a-1)) / T,
// with T = (a+1)(kt+i) - 1. Swept descending so sources are pre-step values.
inline void degree_row_substep(std::vector<double>& row, const ModelParams& p,
                               std::uint64_t t, std::uint32_t i, std::size_t d_hi) {
    const double ka1 = double(p.k) * (p.a - 1.0);
    const double T = (p.a + 1.0) * (double(p.k) * double(t) + double(i)) - 1.0;
    d_hi = std::min(d_hi, row.size() - 1);
    for (std::size_t d = d_hi; d >= 1; --d) {
        const double w_in = (double(d - 1) + ka1) / T;
        const double w_out = (double(d) + ka1) / T;
        row[d] = row[d - 1] * w_in + row[d] * (1.0 - w_out);
    }
}

} // namespace detail

/// Exact expected degree counts r(d,t) = E R(d,t), built by dynamic
/// programming over the k attachment substeps of each transition. With
/// history kept, every t in 1..t_max is retained; otherwise only the final
/// row. O(k^2 t_max^2) time.
class DegreeExpectationTable {
public:
    struct Options {
        bool keep_history = true;
        std::size_t mem_cap_bytes = std::size_t(1) << 30;
    };

    DegreeExpectationTable(const ModelParams& p, std::uint64_t t_max)
        : DegreeExpectationTable(p, t_max, Options{}) {}

    DegreeExpectationTable(const ModelParams& p, std::uint64_t t_max, Options opt)
        : params_(p), t_max_(t_max), keep_history_(opt.keep_history) {
        p.validate();
        if (t_max < 1) throw std::invalid_argument("t_max must be >= 1");
        const std::uint64_t final_size = std::uint64_t(p.k) * t_max + p.k + 1;
        std::uint64_t bytes = final_size * sizeof(double);
        if (keep_history_) {
            bytes = 0;
            for (std::uint64_t t = 1; t <= t_max; ++t)
                bytes += (std::uint64_t(p.k) * t + p.k + 1) * sizeof(double);
        }
        if (bytes > opt.mem_cap_bytes)
            throw resource_error(
                "degree expectation table exceeds the memory cap; reduce t or raise the cap");

        std::vector<double> work(final_size, 0.0);
        work[2 * p.k] = 1.0; // the first node carries k loops
        if (keep_history_) rows_.push_back({work.begin(), work.begin() + 2 * p.k + 1});

        for (std::uint64_t t = 1; t < t_max; ++t) {
            for (std::uint32_t i = 1; i <= p.k; ++i)
                detail::degree_row_substep(work, p, t, i,
                                           std::size_t(p.k * t + p.k + i));
            const auto nn = new_node_degree_dist(p, t);
            for (std::uint32_t l = 0; l <= p.k; ++l) work[p.k + l] += nn[l];
            if (keep_history_) {
                const std::size_t sz = std::size_t(p.k * (t + 1) + p.k + 1);
                rows_.push_back({work.begin(), work.begin() + sz});
            }
        }
        if (!keep_history_) rows_.push_back(std::move(work));
    }

    /// r(d,t); reads outside the stored support return 0.
    double value(std::int64_t d, std::uint64_t t) const {
        const auto& r = row(t);
        if (d < 0 || std::size_t(d) >= r.size()) return 0.0;
        return r[std::size_t(d)];
    }

    const std::vector<double>& row(std::uint64_t t) const {
        if (t < 1 || t > t_max_) throw std::invalid_argument("t out of range");
        if (!keep_history_) {
            if (t != t_max_)
                throw std::invalid_argument("history not kept; only t_max available");
            return rows_.front();
        }
        return rows_[t - 1];
    }

    const std::vector<double>& final_row() const { return rows_.back(); }
    std::uint64_t t_max() const { return t_max_; }
    const ModelParams& params() const { return params_; }

private:
    ModelParams params_;
    std::uint64_t t_max_;
    bool keep_history_;
    std::vector<std::vector<double>> rows_;
};

/// Row r(., t, i): expected degree counts over the first t nodes before
/// substep i (i in 1..k+1) of the transition out of time t.
inline std::vector<double> degree_expectation_substep(const ModelParams& p,
                                                      std::uint64_t t, std::uint32_t i) {
    p.validate();
    if (i < 1 || i > p.k + 1) throw std::invalid_argument("substep out of range");
    std::vector<double> work(std::size_t(p.k) * t + 2 * p.k + 2, 0.0);
    work[2 * p.k] = 1.0;
    for (std::uint64_t tt = 1; tt < t; ++tt) {
        for (std::uint32_t j = 1; j <= p.k; ++j)
            detail::degree_row_substep(work, p, tt, j, std::size_t(p.k * tt + p.k + j));
        const auto nn = new_node_degree_dist(p, tt);
        for (std::uint32_t l = 0; l <= p.k; ++l) work[p.k + l] += nn[l];
    }
    for (std::uint32_t j = 1; j < i; ++j)
        detail::degree_row_substep(work, p, t, j, std::size_t(p.k * t + p.k + j));
    return work;
}

namespace detail {

// Joint dynamic program carrying, for the transition out of time t:
//   r   — expected degree counts of old nodes (capped at d_cap),
//   r2  — expected ordered-pair counts r2(d1,d2,t,i),
//   f   — expected degree-labelled edge mass f(d1,d2,t,i),
//   rp  — sum over old nodes s of Pr(deg s = d1, deg new = e),
//   g   — expected edge mass between the new node (degree e) and old
//         degree-d1 nodes.
// rp and g live on a (d_cap+1) x (2k+1) strip; the new node's degree is at
// most 2 per substep, so e never exceeds 2k. All dependencies point to
// smaller degrees, which makes truncation at d_cap exact for cells <= d_cap.
struct PairDP {
    ModelParams p;
    std::size_t cap;
    std::uint64_t t = 1;
    std::uint32_t i = 1;
    std::vector<double> r;
    std::vector<double> r2, f;  // (cap+1)^2, row-major
    std::vector<double> rp, g;  // (cap+1) x (2k+1), row-major

    PairDP(const ModelParams& params, std::uint32_t d_cap) : p(params), cap(d_cap) {
        p.validate();
        if (d_cap < 2 * p.k) throw std::invalid_argument("d_cap must be >= 2k");
        r.assign(cap + 1, 0.0);
        r2.assign((cap + 1) * (cap + 1), 0.0);
        f.assign((cap + 1) * (cap + 1), 0.0);
        rp.assign((cap + 1) * (2 * p.k + 1), 0.0);
        g.assign((cap + 1) * (2 * p.k + 1), 0.0);
        r[2 * p.k] = 1.0;
        rp[2 * p.k * (2 * p.k + 1) + 0] = 1.0; // rp(d1, 0) = r(d1, 1)
    }

    double& pair_at(std::vector<double>& m, std::size_t d1, std::size_t d2) {
        return m[d1 * (cap + 1) + d2];
    }
    double pair_at(const std::vector<double>& m, std::size_t d1, std::size_t d2) const {
        return m[d1 * (cap + 1) + d2];
    }
    double& strip_at(std::vector<double>& m, std::size_t d1, std::size_t e) {
        return m[d1 * (2 * p.k + 1) + e];
    }
    double strip_at(const std::vector<double>& m, std::size_t d1, std::size_t e) const {
        return m[d1 * (2 * p.k + 1) + e];
    }

    // Apply substep i (requires i <= k): one edge is attached, heads at the
    // new node. Old-node pick weight w(x) = (x + k(a-1))/T; new-node pick
    // weight wn(x) = (x + (i-1)(a-1) + a)/T.
    void substep() {
        if (i > p.k) throw std::logic_error("substep past k");
        const double a = p.a;
        const double T = (a + 1.0) * (double(p.k) * double(t) + double(i)) - 1.0;
        const double ka1 = double(p.k) * (a - 1.0);
        const double na1 = double(i - 1) * (a - 1.0) + a;
        const std::size_t C = cap;
        const std::size_t E = 2 * p.k;

        std::vector<double> w(C + 2), wn(E + 2);
        for (std::size_t x = 0; x <= C + 1; ++x) w[x] = (double(x) + ka1) / T;
        for (std::size_t x = 0; x <= E + 1; ++x) wn[x] = (double(x) + na1) / T;

        // Pair grids: both obey the same two-source update.
        for (std::vector<double>* grid : {&r2, &f}) {
            std::vector<double>& m = *grid;
            for (std::size_t d1 = C; d1 >= 1; --d1) {
                double* row = &m[d1 * (C + 1)];
                const double* below = &m[(d1 - 1) * (C + 1)];
                const double w1_in = w[d1 - 1];
                const double stay1 = 1.0 - w[d1];
                for (std::size_t d2 = C; d2 >= 1; --d2)
                    row[d2] = below[d2] * w1_in + row[d2 - 1] * w[d2 - 1] +
                              row[d2] * (stay1 - w[d2]);
            }
        }

        // g first (it consumes pre-step rp), then rp.
        for (std::size_t d1 = C; d1 >= 1; --d1) {
            double* row = &g[d1 * (E + 1)];
            const double* below = &g[(d1 - 1) * (E + 1)];
            const double* rp_below = &rp[(d1 - 1) * (E + 1)];
            for (std::size_t e = E; e >= 1; --e)
                row[e] = (below[e - 1] + rp_below[e - 1]) * w[d1 - 1] +
                         (e >= 2 ? row[e - 2] * wn[e - 2] : 0.0) +
                         row[e - 1] * (1.0 - w[d1] - wn[e - 1]);
            // g(d1, 0) stays 0: the new node has positive degree after any step.
        }
        for (std::size_t d1 = C; d1 >= 1; --d1) {
            double* row = &rp[d1 * (E + 1)];
            const double* below = &rp[(d1 - 1) * (E + 1)];
            for (std::size_t e = E; e >= 1; --e)
                row[e] = below[e - 1] * w[d1 - 1] +
                         (e >= 2 ? row[e - 2] * wn[e - 2] : 0.0) +
                         row[e - 1] * (1.0 - w[d1] - wn[e - 1]);
            row[0] = 0.0;
        }

        degree_row_substep(r, p, t, i, C);
        ++i;
    }

    // Close the transition (requires i == k+1): fold the new node into the
    // pair tables, add its degree distribution to the count row, and reseed
    // the new-node strips for the next transition.
    void finish_transition() {
        if (i != p.k + 1) throw std::logic_error("transition not complete");
        const std::size_t C = cap;
        const std::size_t E = 2 * p.k;
        for (std::size_t d1 = 0; d1 <= C; ++d1) {
            for (std::size_t d2 = 0; d2 <= C; ++d2) {
                double add2 = 0.0, addf = 0.0;
                if (d2 <= E) {
                    add2 += strip_at(rp, d1, d2);
                    addf += strip_at(g, d1, d2);
                }
                if (d1 <= E) {
                    add2 += strip_at(rp, d2, d1);
                    addf += strip_at(g, d2, d1);
                }
                pair_at(r2, d1, d2) += add2;
                pair_at(f, d1, d2) += addf;
            }
        }
        const auto nn = new_node_degree_dist(p, t);
        for (std::uint32_t l = 0; l <= p.k; ++l)
            if (p.k + l <= C) r[p.k + l] += nn[l];
        for (std::size_t d1 = 0; d1 <= C; ++d1) {
            strip_at(rp, d1, 0) = r[d1];
            for (std::size_t e = 1; e <= E; ++e) strip_at(rp, d1, e) = 0.0;
        }
        std::fill(g.begin(), g.end(), 0.0);
        t += 1;
        i = 1;
    }

    void advance_to(std::uint64_t t_target) {
        while (t < t_target) {
            for (std::uint32_t j = 1; j <= p.k; ++j) substep();
            finish_transition();
        }
    }
};

} // namespace detail

/// Exact pair expectations at a fixed time t:
///   joint(d1,d2)            r2(d1,d2,t), ordered pairs of distinct nodes
///   edge_expectation(d1,d2) E X(d1,d2,t)
///   degree_expectation(d)   r(d,t)
///   covariance(d1,d2)       cov(R(d1,t), R(d2,t))
/// Cells up to d_cap are exact regardless of the cap; grid totals only make
/// sense when d_cap >= kt + 3k (beyond which everything is identically 0).
/// O(k t d_cap^2) time.
class PairExpectationTables {
public:
    PairExpectationTables(const ModelParams& p, std::uint64_t t, std::uint32_t d_cap,
                          std::size_t mem_cap_bytes = std::size_t(1) << 30)
        : dp_(checked(p, d_cap, mem_cap_bytes), d_cap) {
        dp_.advance_to(t);
    }

    double joint(std::int64_t d1, std::int64_t d2) const {
        return pair(dp_.r2, d1, d2);
    }
    double edge_expectation(std::int64_t d1, std::int64_t d2) const {
        return pair(dp_.f, d1, d2);
    }
    double degree_expectation(std::int64_t d) const {
        if (d < 0 || std::size_t(d) > dp_.cap) return 0.0;
        return dp_.r[std::size_t(d)];
    }
    double covariance(std::int64_t d1, std::int64_t d2) const {
        const double same = d1 == d2 ? degree_expectation(d1) : 0.0;
        return joint(d1, d2) + same -
               degree_expectation(d1) * degree_expectation(d2);
    }

    std::uint32_t d_cap() const { return std::uint32_t(dp_.cap); }
    std::uint64_t t() const { return dp_.t; }
    const ModelParams& params() const { return dp_.p; }

private:
    // Runs before dp_ allocates anything.
    static const ModelParams& checked(const ModelParams& p, std::uint32_t d_cap,
                                      std::size_t mem_cap_bytes) {
        const std::uint64_t cells =
            (std::uint64_t(d_cap) + 1) * (std::uint64_t(d_cap) + 1);
        if (cells * 2 * sizeof(double) > mem_cap_bytes)
            throw resource_error(
                "pair expectation tables exceed the memory cap; reduce d_cap or raise the cap");
        return p;
    }

    double pair(const std::vector<double>& m, std::int64_t d1, std::int64_t d2) const {
        if (d1 < 0 || d2 < 0) return 0.0;
        if (std::size_t(d1) > dp_.cap || std::size_t(d2) > dp_.cap)
            throw std::out_of_range("degree beyond d_cap");
        return dp_.pair_at(m, std::size_t(d1), std::size_t(d2));
    }

    detail::PairDP dp_;
};

/// Joint law strip of the transition out of time t before substep i:
/// entry [d1][e] is the sum over old nodes s of Pr(deg s = d1, deg new = e).
/// e never exceeds 2k; at i = 1 the strip is [e = 0] r(d1, t).
inline std::vector<std::vector<double>> new_node_joint_strip(const ModelParams& p,
                                                             std::uint64_t t,
                                                             std::uint32_t i,
                                                             std::uint32_t d_cap) {
    if (i < 1 || i > p.k + 1) throw std::invalid_argument("substep out of range");
    detail::PairDP dp(p, d_cap);
    dp.advance_to(t);
    for (std::uint32_t j = 1; j < i; ++j) dp.substep();
    std::vector<std::vector<double>> out(d_cap + 1,
                                         std::vector<double>(2 * p.k + 1, 0.0));
    for (std::size_t d1 = 0; d1 <= d_cap; ++d1)
        for (std::size_t e = 0; e <= 2 * p.k; ++e)
            out[d1][e] = dp.strip_at(dp.rp, d1, e);
    return out;
}

/// Full outcome distribution of the model at tiny sizes, by enumerating
/// every target sequence of the single-edge construction and collapsing.
/// Outcomes are keyed by the collapsed edge list in creation order.
struct EnumerationResult {
    ModelParams params;
    std::uint32_t t = 0;
    bool exact_rational = false;
    std::map<std::vector<Edge>, double> outcomes;

    double total_probability() const {
        double s = 0.0;
        for (const auto& [key, prob] : outcomes) s += prob;
        return s;
    }

    static std::vector<std::uint32_t> degrees_of(const std::vector<Edge>& edges,
                                                 std::uint32_t node_count) {
        std::vector<std::uint32_t> deg(node_count + 1, 0);
        for (const Edge& e : edges) {
            deg[e.u] += 1;
            deg[e.v] += 1;
        }
        return deg;
    }

    /// E R(d,t) for d = 0..d_max.
    std::vector<double> degree_expectation(std::uint32_t d_max) const {
        std::vector<double> out(d_max + 1, 0.0);
        for (const auto& [edges, prob] : outcomes) {
            const auto deg = degrees_of(edges, t);
            for (NodeId s = 1; s <= t; ++s)
                if (deg[s] <= d_max) out[deg[s]] += prob;
        }
        return out;
    }

    /// r2(d1,d2,t) for d1,d2 = 0..d_max (ordered pairs of distinct nodes).
    std::vector<std::vector<double>> joint_expectation(std::uint32_t d_max) const {
        std::vector<std::vector<double>> out(d_max + 1,
                                             std::vector<double>(d_max + 1, 0.0));
        for (const auto& [edges, prob] : outcomes) {
            const auto deg = degrees_of(edges, t);
            std::vector<std::uint64_t> cnt(d_max + 1, 0);
            for (NodeId s = 1; s <= t; ++s)
                if (deg[s] <= d_max) cnt[deg[s]] += 1;
            for (std::uint32_t d1 = 0; d1 <= d_max; ++d1)
                for (std::uint32_t d2 = 0; d2 <= d_max; ++d2) {
                    const double pairs = double(cnt[d1]) * double(cnt[d2]) -
                                         (d1 == d2 ? double(cnt[d1]) : 0.0);
                    out[d1][d2] += prob * pairs;
                }
        }
        return out;
    }

    /// E X(d1,d2,t) for d1,d2 = 0..d_max.
    std::vector<std::vector<double>> edge_expectation(std::uint32_t d_max) const {
        std::vector<std::vector<double>> out(d_max + 1,
                                             std::vector<double>(d_max + 1, 0.0));
        for (const auto& [edges, prob] : outcomes) {
            const auto deg = degrees_of(edges, t);
            for (const Edge& e : edges) {
                if (e.u == e.v) continue;
                const auto du = deg[e.u], dv = deg[e.v];
                if (du <= d_max && dv <= d_max) {
                    out[du][dv] += prob;
                    out[dv][du] += prob;
                }
            }
        }
        return out;
    }

    /// Distribution of the last node's degree; index l maps to degree k + l.
    std::vector<double> last_node_degree_dist() const {
        std::vector<double> out(params.k + 1, 0.0);
        for (const auto& [edges, prob] : outcomes) {
            const auto deg = degrees_of(edges, t);
            out.at(deg[t] - params.k) += prob;
        }
        return out;
    }
};

namespace detail {

// a as an exact small fraction num/den, den <= 64. Needed for the
// exact-rational enumeration mode.
inline std::pair<std::uint64_t, std::uint64_t> small_rational(double a) {
    for (std::uint64_t den = 1; den <= 64; ++den) {
        const double scaled = a * double(den);
        const double rounded = std::round(scaled);
        if (std::abs(scaled - rounded) < 1e-9 && rounded >= 1.0)
            return {std::uint64_t(rounded), den};
    }
    throw std::invalid_argument("a is not a small rational; exact mode unavailable");
}

} // namespace detail

/// Enumerate every outcome of the model on n nodes. k*n is capped at 9
/// ((kn)! target sequences are walked). With exact_rational set and a a
/// small fraction, every probability is an exact integer ratio, rounded to
/// double once at the end.
inline EnumerationResult enumerate_exact(const ModelParams& p, std::uint32_t n,
                                         bool exact_rational = false) {
    p.validate();
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    const std::uint64_t kn = std::uint64_t(p.k) * n;
    if (kn > 9)
        throw resource_error("enumeration is limited to k*n <= 9");

    EnumerationResult result;
    result.params = p;
    result.t = n;
    result.exact_rational = exact_rational;

    std::uint64_t a_num = 0, a_den = 0;
    unsigned __int128 common_den = 1;
    if (exact_rational) {
        std::tie(a_num, a_den) = detail::small_rational(p.a);
        for (std::uint64_t m = 2; m <= kn; ++m)
            common_den *= (a_num + a_den) * m - a_den;
        if (common_den > (static_cast<unsigned __int128>(1) << 52))
            throw resource_error("exact-rational denominators exceed 2^52");
    }

    std::vector<std::uint32_t> deg(kn + 1, 0);
    deg[1] = 2;
    std::vector<NodeId> targets(kn + 1, 0);
    std::map<std::vector<Edge>, std::uint64_t> numerators;

    const auto emit = [&](double prob, std::uint64_t numerator) {
        std::vector<Edge> collapsed;
        collapsed.reserve(kn);
        collapsed.push_back({1, 1});
        for (std::uint64_t m = 2; m <= kn; ++m)
            collapsed.push_back({NodeId((m + p.k - 1) / p.k),
                                 NodeId((targets[m] + p.k - 1) / p.k)});
        if (exact_rational)
            numerators[collapsed] += numerator;
        else
            result.outcomes[collapsed] += prob;
    };

    // Depth-first walk over the target choices of steps m = 2..kn.
    const auto walk = [&](auto&& self, std::uint64_t m, double prob,
                          std::uint64_t numerator) -> void {
        if (m > kn) {
            emit(prob, numerator);
            return;
        }
        const double mass = (p.a + 1.0) * double(m) - 1.0;
        for (NodeId s = 1; s <= m; ++s) {
            double weight;
            std::uint64_t wnum = 0;
            if (s < m) {
                weight = double(deg[s]) - 1.0 + p.a;
                if (exact_rational) wnum = a_den * (deg[s] - 1) + a_num;
            } else {
                weight = p.a;
                if (exact_rational) wnum = a_num;
            }
            targets[m] = s;
            deg[m] += 1;
            deg[s] += 1;
            self(self, m + 1, prob * (weight / mass), numerator * wnum);
            deg[s] -= 1;
            deg[m] -= 1;
        }
    };
    walk(walk, 2, 1.0, 1);

    if (exact_rational) {
        const double den = double(std::uint64_t(common_den));
        for (const auto& [key, num] : numerators)
            result.outcomes[key] = double(num) / den;
    }
    return result;
}

} // namespace bograph
