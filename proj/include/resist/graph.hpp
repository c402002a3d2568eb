#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace resist {

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = static_cast<NodeId>(-1);

struct EdgeRecord {
    std::uint64_t u;
    std::uint64_t v;
    double weight = 1.0;
};

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct MalformedLine : ParseError {
    std::size_t line;
    explicit MalformedLine(std::size_t line)
        : ParseError("malformed line " + std::to_string(line)), line(line) {}
};
struct NegativeWeight : ParseError {
    std::size_t line;
    explicit NegativeWeight(std::size_t line)
        : ParseError("non-positive weight at line " + std::to_string(line)), line(line) {}
};
struct MissingProblemLine : ParseError {
    MissingProblemLine() : ParseError("no 'p sp' problem line found") {}
};
struct ArcBeforeProblemLine : ParseError {
    ArcBeforeProblemLine() : ParseError("arc line before 'p sp' problem line") {}
};
struct IdOutOfRange : ParseError {
    std::size_t line;
    explicit IdOutOfRange(std::size_t line)
        : ParseError("node id out of range at line " + std::to_string(line)), line(line) {}
};
struct EmptyGraph : std::runtime_error {
    EmptyGraph() : std::runtime_error("graph has no usable edges") {}
};

struct ParseReport {
    std::size_t self_loops_dropped = 0;
    std::size_t parallel_edges_merged = 0;
};

enum class WeightMode { Conductance, Resistance, Unweighted };

struct Neighbor {
    NodeId node;
    double conductance;
    double length;  // original input weight; 1 when unweighted

    bool operator<(const Neighbor& o) const { return node < o.node; }
};

// Normalized undirected weighted graph with dense internal ids.
// Immutable after build_graph; safe for concurrent reads.
class Graph {
public:
    std::size_t node_count() const { return adj_.size(); }
    const std::vector<Neighbor>& neighbors(NodeId u) const { return adj_[u]; }
    bool weighted() const { return weighted_; }
    std::uint32_t component_of(NodeId u) const { return component_[u]; }
    std::uint32_t component_count() const { return component_count_; }
    std::uint64_t external_id(NodeId u) const { return external_[u]; }
    const std::vector<std::uint64_t>& external_ids() const { return external_; }
    std::size_t edge_count() const { return edge_count_; }

    NodeId internal_id(std::uint64_t ext) const {
        auto it = to_internal_.find(ext);
        if (it == to_internal_.end())
            throw std::out_of_range("unknown external node id " + std::to_string(ext));
        return it->second;
    }
    bool has_external_id(std::uint64_t ext) const { return to_internal_.count(ext) != 0; }

    double weighted_degree(NodeId u) const {
        double d = 0;
        for (const auto& nb : adj_[u]) d += nb.conductance;
        return d;
    }

    std::size_t max_degree() const {
        std::size_t d = 0;
        for (const auto& a : adj_) d = std::max(d, a.size());
        return d;
    }

    friend Graph build_graph(const std::vector<EdgeRecord>&, WeightMode, ParseReport*);

private:
    std::vector<std::vector<Neighbor>> adj_;
    std::vector<std::uint64_t> external_;
    std::unordered_map<std::uint64_t, NodeId> to_internal_;
    std::vector<std::uint32_t> component_;
    std::uint32_t component_count_ = 0;
    std::size_t edge_count_ = 0;
    bool weighted_ = false;
};

// Lines are "u v" or "u v w"; '#' starts a comment line.
inline std::vector<EdgeRecord> parse_edge_list(std::istream& in) {
    std::vector<EdgeRecord> edges;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream ls(line);
        EdgeRecord rec;
        if (!(ls >> rec.u >> rec.v)) throw MalformedLine(lineno);
        if (!(ls >> rec.weight)) {
            rec.weight = 1.0;
        } else if (rec.weight <= 0) {
            throw NegativeWeight(lineno);
        }
        std::string trailing;
        if (ls >> trailing) throw MalformedLine(lineno);
        edges.push_back(rec);
    }
    return edges;
}

// 9th-DIMACS shortest path format: "c" comments, "p sp n m", "a u v w" arcs.
// Opposite-direction duplicate arcs collapse to one undirected edge keeping
// the smaller weight.
inline std::vector<EdgeRecord> parse_dimacs_gr(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    bool have_problem = false;
    std::uint64_t n = 0;
    std::map<std::pair<std::uint64_t, std::uint64_t>, double> best;
    std::vector<std::pair<std::uint64_t, std::uint64_t>> order;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == 'c') continue;
        std::istringstream ls(line);
        char tag;
        ls >> tag;
        if (tag == 'p') {
            std::string kind;
            std::uint64_t m = 0;
            if (!(ls >> kind >> n >> m) || kind != "sp") throw MalformedLine(lineno);
            have_problem = true;
        } else if (tag == 'a') {
            if (!have_problem) throw ArcBeforeProblemLine();
            std::uint64_t u, v;
            double w;
            if (!(ls >> u >> v >> w)) throw MalformedLine(lineno);
            if (u < 1 || u > n || v < 1 || v > n) throw IdOutOfRange(lineno);
            if (w <= 0) throw NegativeWeight(lineno);
            auto key = std::minmax(u, v);
            auto [it, inserted] = best.emplace(key, w);
            if (inserted)
                order.push_back(key);
            else
                it->second = std::min(it->second, w);
        }
        // other tags ignored
    }
    if (!have_problem) throw MissingProblemLine();
    std::vector<EdgeRecord> edges;
    edges.reserve(order.size());
    for (const auto& key : order) edges.push_back({key.first, key.second, best.at(key)});
    return edges;
}

// Normalizes the edge list: external ids mapped in first-appearance order,
// self-loops dropped, parallel edges merged by summing conductances,
// components labeled by BFS.
inline Graph build_graph(const std::vector<EdgeRecord>& edges, WeightMode mode,
                         ParseReport* report = nullptr) {
    if (edges.empty()) throw EmptyGraph();
    Graph g;
    g.weighted_ = (mode != WeightMode::Unweighted);
    auto intern = [&](std::uint64_t ext) -> NodeId {
        auto it = g.to_internal_.find(ext);
        if (it != g.to_internal_.end()) return it->second;
        NodeId id = static_cast<NodeId>(g.external_.size());
        g.to_internal_.emplace(ext, id);
        g.external_.push_back(ext);
        return id;
    };
    struct RawEdge {
        NodeId u, v;
        double cond, len;
    };
    std::vector<RawEdge> raw;
    ParseReport rep;
    for (const auto& e : edges) {
        if (e.u == e.v) {
            ++rep.self_loops_dropped;
            continue;
        }
        if (e.weight <= 0) throw std::invalid_argument("non-positive edge weight");
        NodeId u = intern(e.u), v = intern(e.v);
        double cond, len;
        switch (mode) {
            case WeightMode::Conductance: cond = e.weight; len = e.weight; break;
            case WeightMode::Resistance: cond = 1.0 / e.weight; len = e.weight; break;
            case WeightMode::Unweighted: cond = 1.0; len = 1.0; break;
        }
        raw.push_back({u, v, cond, len});
    }
    if (raw.empty()) throw EmptyGraph();

    std::size_t n = g.external_.size();
    // merge parallel edges: sum conductances, keep min length
    std::map<std::pair<NodeId, NodeId>, std::pair<double, double>> merged;
    for (const auto& e : raw) {
        auto key = std::minmax(e.u, e.v);
        auto [it, inserted] = merged.emplace(key, std::make_pair(e.cond, e.len));
        if (!inserted) {
            it->second.first += e.cond;
            it->second.second = std::min(it->second.second, e.len);
            ++rep.parallel_edges_merged;
        }
    }
    g.adj_.assign(n, {});
    for (const auto& [key, cl] : merged) {
        g.adj_[key.first].push_back({key.second, cl.first, cl.second});
        g.adj_[key.second].push_back({key.first, cl.first, cl.second});
    }
    for (auto& a : g.adj_) std::sort(a.begin(), a.end());
    g.edge_count_ = merged.size();

    // component labels via BFS
    g.component_.assign(n, static_cast<std::uint32_t>(-1));
    std::vector<NodeId> queue;
    std::uint32_t comp = 0;
    for (NodeId s = 0; s < n; ++s) {
        if (g.component_[s] != static_cast<std::uint32_t>(-1)) continue;
        g.component_[s] = comp;
        queue.assign(1, s);
        while (!queue.empty()) {
            NodeId u = queue.back();
            queue.pop_back();
            for (const auto& nb : g.adj_[u]) {
                if (g.component_[nb.node] == static_cast<std::uint32_t>(-1)) {
                    g.component_[nb.node] = comp;
                    queue.push_back(nb.node);
                }
            }
        }
        ++comp;
    }
    g.component_count_ = comp;
    if (report) *report = rep;
    return g;
}

// One Laplacian row: diagonal = weighted degree, off-diagonals = -conductance.
inline std::vector<std::pair<NodeId, double>> laplacian_row(const Graph& g, NodeId u) {
    std::vector<std::pair<NodeId, double>> row;
    row.reserve(g.neighbors(u).size() + 1);
    row.emplace_back(u, g.weighted_degree(u));
    for (const auto& nb : g.neighbors(u)) row.emplace_back(nb.node, -nb.conductance);
    std::sort(row.begin(), row.end());
    return row;
}

}  // namespace resist
