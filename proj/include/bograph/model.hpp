#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "bograph/rng.hpp"

namespace bograph {

/// Thrown when a computation would exceed a configured memory or size cap.
class resource_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Node index, 1-based (node labels are 1..t).
using NodeId = std::uint32_t;

/// Model parameters: initial attractiveness a > 0, edges-per-node k >= 1,
/// and the seed all randomness flows from.
struct ModelParams {
    double a = 1.0;
    std::uint32_t k = 1;
    std::uint64_t seed = 0;

    void validate() const {
        if (!(a > 0.0) || !std::isfinite(a))
            throw std::invalid_argument("model parameter a must be finite and > 0");
        if (k < 1)
            throw std::invalid_argument("model parameter k must be >= 1");
    }
};

struct Edge {
    NodeId u = 0; // head (the node that created the edge)
    NodeId v = 0; // chosen target; u == v marks a loop
    auto operator<=>(const Edge&) const = default;
};

/// Undirected multigraph in creation order. Loops and multi-edges are kept;
/// a loop contributes 2 to its node's degree.
struct MultiGraph {
    std::uint32_t node_count = 0;
    std::vector<Edge> edges;
    std::vector<std::uint32_t> degrees; // size node_count + 1, slot 0 unused

    std::uint32_t degree(NodeId s) const { return degrees[s]; }

    std::uint64_t degree_sum() const {
        std::uint64_t sum = 0;
        for (NodeId s = 1; s <= node_count; ++s) sum += degrees[s];
        return sum;
    }
};

/// Repeated-entry node list: node s appears exactly degree(s) - 1 times.
/// Realizes the (deg - 1) part of the attachment weight, so a uniform pick
/// from the entries is a weighted pick in O(1).
struct ExcessRoster {
    std::vector<NodeId> entries;
};

/// Roster rebuilt from scratch (audits the incremental one in tests).
inline ExcessRoster make_roster(const MultiGraph& g) {
    ExcessRoster r;
    r.entries.reserve(g.edges.size());
    for (NodeId s = 1; s <= g.node_count; ++s)
        for (std::uint32_t i = 1; i < g.degrees[s]; ++i) r.entries.push_back(s);
    return r;
}

namespace detail {
// Mass of the single-edge attachment law at node count m must stay exactly
// representable: (a+1)m - 1 <= 2^53, and node ids must fit NodeId.
inline void check_stage1_capacity(const ModelParams& p, std::uint64_t n) {
    if (n > 0xffffffffULL)
        throw std::overflow_error("node count exceeds 32-bit node index range");
    if (double(n) >= 9007199254740992.0 / (p.a + 1.0))
        throw std::overflow_error("attachment mass (a+1)t-1 exceeds exact double range");
}
} // namespace detail

/// Probability that the next edge's target is drawn from the uniform leg
/// (weight a per node) rather than the roster leg (weight deg-1 per node),
/// when node m is being added: a*m / ((a+1)m - 1).
inline double stage1_uniform_leg_prob(const ModelParams& p, std::uint64_t m) {
    return p.a * double(m) / ((p.a + 1.0) * double(m) - 1.0);
}

/// The one-node, one-loop seed graph (k plays no role at this stage).
inline MultiGraph new_seed_graph(const ModelParams& p) {
    p.validate();
    MultiGraph g;
    g.node_count = 1;
    g.edges.push_back({1, 1});
    g.degrees = {0, 2};
    return g;
}

/// Adds node m = node_count + 1 and one edge (m, gamma) where
///   Pr(gamma = s) = (deg(s) - 1 + a) / ((a+1)m - 1)  for s < m,
///   Pr(gamma = m) = a / ((a+1)m - 1).
/// Sampling decomposes each weight into a (uniform leg over all m nodes)
/// plus deg-1 (uniform pick from the roster); both legs are exact for any
/// real a > 0. Exactly one roster entry is appended per step.
inline void stage1_step(MultiGraph& g, ExcessRoster& roster, const ModelParams& p,
                        SplitMix64& rng) {
    const std::uint64_t m = std::uint64_t(g.node_count) + 1;
    detail::check_stage1_capacity(p, m);

    // One double rounding per step, in the branch threshold only.
    NodeId target;
    if (rng.next_unit() < stage1_uniform_leg_prob(p, m)) {
        target = NodeId(1 + rng.next_below(m));
    } else {
        target = roster.entries[rng.next_below(roster.entries.size())];
    }

    g.node_count = std::uint32_t(m);
    g.degrees.push_back(1); // head endpoint of the new edge
    g.degrees[target] += 1; // target == m turns the edge into a loop (degree 2)
    g.edges.push_back({NodeId(m), target});
    roster.entries.push_back(target);
}

/// Sample from the single-edge-per-node space on n nodes. Deterministic
/// given (params.seed, n); O(n) time and memory.
inline MultiGraph generate_stage1(const ModelParams& p, std::uint64_t n) {
    p.validate();
    if (n < 1) throw std::invalid_argument("node count must be >= 1");
    detail::check_stage1_capacity(p, n);

    MultiGraph g = new_seed_graph(p);
    g.edges.reserve(n);
    g.degrees.reserve(n + 1);
    ExcessRoster roster;
    roster.entries.reserve(n);
    roster.entries.push_back(1);

    SplitMix64 rng(p.seed);
    for (std::uint64_t m = 2; m <= n; ++m) stage1_step(g, roster, p, rng);
    return g;
}

/// Merge nodes (j-1)k+1 .. jk into node j, keeping every edge. Multi-edges
/// and loops are preserved; edge (u,v) maps to (ceil(u/k), ceil(v/k)).
inline MultiGraph collapse(const MultiGraph& g, std::uint32_t k) {
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    if (g.node_count % k != 0)
        throw std::invalid_argument("node count not divisible by k");
    if (k == 1) return g;

    MultiGraph out;
    out.node_count = g.node_count / k;
    out.edges.reserve(g.edges.size());
    out.degrees.assign(out.node_count + 1, 0);
    for (const Edge& e : g.edges) {
        const NodeId u = (e.u + k - 1) / k;
        const NodeId v = (e.v + k - 1) / k;
        out.edges.push_back({u, v});
        out.degrees[u] += 1;
        out.degrees[v] += 1;
    }
    return out;
}

/// Sample from the k-edges-per-node space on t nodes: generate the
/// single-edge graph on kt nodes and collapse.
inline MultiGraph generate(const ModelParams& p, std::uint64_t t) {
    p.validate();
    if (t < 1) throw std::invalid_argument("node count must be >= 1");
    if (t > 0xffffffffULL / p.k)
        throw std::overflow_error("k*t exceeds 32-bit node index range");
    MultiGraph stage1 = generate_stage1(p, t * p.k);
    if (p.k == 1) return stage1;
    return collapse(stage1, p.k);
}

/// R(d,t): number of nodes with degree exactly d, as a map d -> count.
inline std::map<std::uint32_t, std::uint64_t> degree_counts(const MultiGraph& g) {
    std::map<std::uint32_t, std::uint64_t> counts;
    for (NodeId s = 1; s <= g.node_count; ++s) counts[g.degrees[s]] += 1;
    return counts;
}

/// X(d1,d2,t): total multiplicity of non-loop edges joining a degree-d1 node
/// to a degree-d2 node; every qualifying edge counts once for (d1,d2) and
/// once for (d2,d1), hence twice when d1 = d2. Loops never count.
inline std::uint64_t count_X(const MultiGraph& g, std::uint32_t d1, std::uint32_t d2) {
    std::uint64_t n = 0;
    for (const Edge& e : g.edges) {
        if (e.u == e.v) continue;
        const std::uint32_t du = g.degrees[e.u];
        const std::uint32_t dv = g.degrees[e.v];
        if (du == d1 && dv == d2) ++n;
        if (du == d2 && dv == d1) ++n;
    }
    return n;
}

} // namespace bograph
