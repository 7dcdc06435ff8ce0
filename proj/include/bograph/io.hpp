#pragma once

#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>

#include "bograph/model.hpp"

namespace bograph {

/// Shortest round-trip decimal form of a double ("1" for 1.0, "0.5", ...).
inline std::string format_double(double x) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, ptr);
}

/// Edge-list file: a header line
///   # bograph a=<a> k=<k> t=<t> seed=<seed>
/// then one "u v" pair per line in creation order, 1-based, loops as "u u".
inline void write_edge_list(std::ostream& os, const MultiGraph& g, const ModelParams& p,
                            std::uint64_t t) {
    os << "# bograph a=" << format_double(p.a) << " k=" << p.k << " t=" << t
       << " seed=" << p.seed << '\n';
    // Bulk-format into a buffer; edge lists get large.
    std::string buf;
    buf.reserve(1 << 20);
    char num[32];
    for (const Edge& e : g.edges) {
        auto [p1, ec1] = std::to_chars(num, num + sizeof num, e.u);
        buf.append(num, p1);
        buf.push_back(' ');
        auto [p2, ec2] = std::to_chars(num, num + sizeof num, e.v);
        buf.append(num, p2);
        buf.push_back('\n');
        if (buf.size() > (1 << 20) - 64) {
            os.write(buf.data(), std::streamsize(buf.size()));
            buf.clear();
        }
    }
    os.write(buf.data(), std::streamsize(buf.size()));
}

inline void write_edge_list_file(const std::string& path, const MultiGraph& g,
                                 const ModelParams& p, std::uint64_t t) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw resource_error("cannot open for writing: " + path);
    write_edge_list(os, g, p, t);
    os.flush();
    if (!os) throw resource_error("write failed: " + path);
}

struct EdgeListFile {
    ModelParams params;
    std::uint64_t t = 0;
    MultiGraph graph;
};

/// Parse an edge-list file written by write_edge_list.
inline EdgeListFile read_edge_list_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw resource_error("cannot open for reading: " + path);
    EdgeListFile out;
    std::string header;
    std::getline(is, header);
    std::istringstream hs(header);
    std::string tok;
    hs >> tok; // '#'
    hs >> tok; // 'bograph'
    if (tok != "bograph") throw std::invalid_argument("not an edge-list file: " + path);
    while (hs >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = tok.substr(0, eq);
        const std::string val = tok.substr(eq + 1);
        if (key == "a") out.params.a = std::stod(val);
        else if (key == "k") out.params.k = std::uint32_t(std::stoul(val));
        else if (key == "t") out.t = std::stoull(val);
        else if (key == "seed") out.params.seed = std::stoull(val);
    }
    out.params.validate();
    if (out.t == 0 || out.t > 0xffffffffULL)
        throw std::invalid_argument("bad node count in header: " + path);

    MultiGraph& g = out.graph;
    g.node_count = std::uint32_t(out.t);
    g.degrees.assign(out.t + 1, 0);
    NodeId u, v;
    while (is >> u >> v) {
        g.edges.push_back({u, v});
        g.degrees[u] += 1;
        g.degrees[v] += 1;
    }
    if (g.edges.empty()) throw std::invalid_argument("empty edge list: " + path);
    return out;
}

} // namespace bograph
