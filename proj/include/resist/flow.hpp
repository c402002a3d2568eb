#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "resist/graph.hpp"
#include "resist/query.hpp"
#include "resist/rng.hpp"

namespace resist {

struct NoPath : std::runtime_error {
    NoPath() : std::runtime_error("no positive-flow path remains") {}
};

// Signed per-edge electrical flow for a unit s->t current. Edges oriented
// from the lower internal id; positive flow runs low -> high.
struct FlowAssignment {
    NodeId s, t;
    std::vector<NodeId> edge_u, edge_v;  // edge_u[i] < edge_v[i]
    std::vector<double> flow;

    std::size_t edge_count() const { return flow.size(); }
};

struct RouteMetrics {
    double length_ratio;
    double diversity;
    double robustness;
};

struct RoutePlan {
    std::vector<std::vector<NodeId>> paths;
    RouteMetrics metrics;
    std::uint64_t seed;
};

inline FlowAssignment electrical_flow(const LabelIndex& idx, const Graph& g, NodeId s,
                                      NodeId t) {
    check_id(idx, s);
    check_id(idx, t);
    if (idx.component[s] != idx.component[t]) throw DifferentComponents(s, t);
    FlowAssignment fa;
    fa.s = s;
    fa.t = t;
    std::vector<double> x(g.node_count(), 0.0);
    if (s != t) {
        SourceResult cs = query_source(idx, s);
        SourceResult ct = query_source(idx, t);
        for (NodeId u = 0; u < g.node_count(); ++u) x[u] = cs.column[u] - ct.column[u];
    }
    for (NodeId u = 0; u < g.node_count(); ++u)
        for (const auto& nb : g.neighbors(u)) {
            if (nb.node < u) continue;
            fa.edge_u.push_back(u);
            fa.edge_v.push_back(nb.node);
            fa.flow.push_back((x[u] - x[nb.node]) * nb.conductance);
        }
    return fa;
}

inline constexpr double kResidualFloor = 1e-12;

namespace detail {

// widest-path label: maximize bottleneck, break ties by fewer hops, then by
// lexicographically smaller predecessor
struct WideLabel {
    double bottleneck = -1.0;
    std::uint32_t hops = 0;
    NodeId pred = kNoNode;
};

inline bool improves(const WideLabel& cand, const WideLabel& cur) {
    if (cand.bottleneck != cur.bottleneck) return cand.bottleneck > cur.bottleneck;
    if (cand.hops != cur.hops) return cand.hops < cur.hops;
    return cand.pred < cur.pred;
}

}  // namespace detail

// Repeatedly extract the max-bottleneck s->t path from the directed residual
// flow and subtract its bottleneck. Stops early when no positive-flow path
// remains.
inline std::vector<std::vector<NodeId>> alternative_paths(const FlowAssignment& f,
                                                          const Graph& g, std::size_t k) {
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    if (f.s == f.t) throw NoPath();
    const std::size_t n = g.node_count();

    // adjacency over edges carrying residual flow, directed by sign
    std::vector<double> residual = f.flow;
    std::vector<std::vector<std::pair<NodeId, std::size_t>>> out(n);  // (head, edge idx)
    auto rebuild = [&] {
        for (auto& o : out) o.clear();
        for (std::size_t e = 0; e < residual.size(); ++e) {
            if (residual[e] > kResidualFloor)
                out[f.edge_u[e]].emplace_back(f.edge_v[e], e);
            else if (residual[e] < -kResidualFloor)
                out[f.edge_v[e]].emplace_back(f.edge_u[e], e);
        }
        for (auto& o : out) std::sort(o.begin(), o.end());
    };

    std::vector<std::vector<NodeId>> paths;
    std::vector<detail::WideLabel> label(n);
    std::vector<std::size_t> via_edge(n);
    for (std::size_t round = 0; round < k; ++round) {
        rebuild();
        for (auto& l : label) l = {};
        label[f.s] = {std::numeric_limits<double>::infinity(), 0, f.s};
        using QEntry = std::pair<double, NodeId>;  // (bottleneck, node)
        std::priority_queue<QEntry> pq;
        pq.emplace(label[f.s].bottleneck, f.s);
        std::vector<char> done(n, 0);
        while (!pq.empty()) {
            auto [b, u] = pq.top();
            pq.pop();
            if (done[u] || b < label[u].bottleneck) continue;
            done[u] = 1;
            for (auto [v, e] : out[u]) {
                if (done[v]) continue;
                detail::WideLabel cand{std::min(label[u].bottleneck, std::abs(residual[e])),
                                       label[u].hops + 1, u};
                if (detail::improves(cand, label[v])) {
                    label[v] = cand;
                    via_edge[v] = e;
                    pq.emplace(cand.bottleneck, v);
                }
            }
        }
        if (label[f.t].bottleneck <= kResidualFloor) {
            if (paths.empty()) throw NoPath();
            break;
        }
        std::vector<NodeId> path;
        for (NodeId u = f.t; u != f.s; u = label[u].pred) path.push_back(u);
        path.push_back(f.s);
        std::reverse(path.begin(), path.end());
        const double bottleneck = label[f.t].bottleneck;
        for (NodeId u = f.t; u != f.s; u = label[u].pred) {
            const std::size_t e = via_edge[u];
            residual[e] -= (residual[e] > 0 ? bottleneck : -bottleneck);
        }
        paths.push_back(std::move(path));
    }
    return paths;
}

namespace detail {

inline double path_length(const std::vector<NodeId>& path, const Graph& g) {
    double len = 0;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        bool found = false;
        for (const auto& nb : g.neighbors(path[i]))
            if (nb.node == path[i + 1]) {
                len += nb.length;
                found = true;
                break;
            }
        if (!found) throw std::logic_error("path uses a non-existent edge");
    }
    return len;
}

inline std::vector<std::pair<NodeId, NodeId>> path_edges(const std::vector<NodeId>& path) {
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (std::size_t i = 0; i + 1 < path.size(); ++i)
        edges.push_back(std::minmax(path[i], path[i + 1]));
    std::sort(edges.begin(), edges.end());
    return edges;
}

}  // namespace detail

// Shortest-path length between s and t over edge lengths (Dijkstra);
// independent of the labelling, used as the Length baseline.
inline double shortest_path_length(const Graph& g, NodeId s, NodeId t) {
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(g.node_count(), inf);
    dist[s] = 0;
    using QEntry = std::pair<double, NodeId>;
    std::priority_queue<QEntry, std::vector<QEntry>, std::greater<QEntry>> pq;
    pq.emplace(0.0, s);
    while (!pq.empty()) {
        auto [d, u] = pq.top();
        pq.pop();
        if (d > dist[u]) continue;
        if (u == t) break;
        for (const auto& nb : g.neighbors(u)) {
            const double nd = d + nb.length;
            if (nd < dist[nb.node]) {
                dist[nb.node] = nd;
                pq.emplace(nd, nb.node);
            }
        }
    }
    return dist[t];
}

// Length / Diversity / Robustness over a set of alternative paths.
// Robustness is a seeded Monte-Carlo estimate of P(s,t stay connected in the
// union of the paths after independent edge removal).
inline RouteMetrics route_metrics(const std::vector<std::vector<NodeId>>& paths,
                                  const Graph& g, double shortest_len, double removal_prob,
                                  std::size_t trials, std::uint64_t seed) {
    RouteMetrics m{0, 1.0, 1.0};
    if (paths.empty()) return m;

    double total_ratio = 0;
    for (const auto& p : paths) total_ratio += detail::path_length(p, g) / shortest_len;
    m.length_ratio = total_ratio / static_cast<double>(paths.size());

    std::vector<std::vector<std::pair<NodeId, NodeId>>> edge_sets;
    edge_sets.reserve(paths.size());
    for (const auto& p : paths) edge_sets.push_back(detail::path_edges(p));

    if (paths.size() > 1) {
        double sim_sum = 0;
        std::size_t pairs = 0;
        for (std::size_t i = 0; i < edge_sets.size(); ++i)
            for (std::size_t j = i + 1; j < edge_sets.size(); ++j) {
                std::vector<std::pair<NodeId, NodeId>> inter, uni;
                std::set_intersection(edge_sets[i].begin(), edge_sets[i].end(),
                                      edge_sets[j].begin(), edge_sets[j].end(),
                                      std::back_inserter(inter));
                std::set_union(edge_sets[i].begin(), edge_sets[i].end(),
                               edge_sets[j].begin(), edge_sets[j].end(),
                               std::back_inserter(uni));
                sim_sum += uni.empty() ? 0.0
                                       : static_cast<double>(inter.size()) /
                                             static_cast<double>(uni.size());
                ++pairs;
            }
        m.diversity = 1.0 - sim_sum / static_cast<double>(pairs);
    }

    // union graph of all path edges
    std::vector<std::pair<NodeId, NodeId>> union_edges;
    for (const auto& es : edge_sets) union_edges.insert(union_edges.end(), es.begin(), es.end());
    std::sort(union_edges.begin(), union_edges.end());
    union_edges.erase(std::unique(union_edges.begin(), union_edges.end()), union_edges.end());
    const NodeId s = paths[0].front();
    const NodeId t = paths[0].back();

    std::size_t connected_count = 0;
    std::vector<char> alive(union_edges.size());
    std::unordered_map<NodeId, std::vector<NodeId>> adj;
    for (std::size_t trial = 0; trial < trials; ++trial) {
        Xoshiro256StarStar rng(seed + trial);  // per-trial derived seed
        for (std::size_t e = 0; e < union_edges.size(); ++e)
            alive[e] = rng.unit() >= removal_prob;
        adj.clear();
        for (std::size_t e = 0; e < union_edges.size(); ++e)
            if (alive[e]) {
                adj[union_edges[e].first].push_back(union_edges[e].second);
                adj[union_edges[e].second].push_back(union_edges[e].first);
            }
        // BFS s -> t
        std::unordered_set<NodeId> seen{s};
        std::vector<NodeId> stack{s};
        bool reached = (s == t);
        while (!stack.empty() && !reached) {
            NodeId u = stack.back();
            stack.pop_back();
            for (NodeId v : adj[u]) {
                if (v == t) {
                    reached = true;
                    break;
                }
                if (seen.insert(v).second) stack.push_back(v);
            }
        }
        if (reached) ++connected_count;
    }
    if (trials > 0)
        m.robustness = static_cast<double>(connected_count) / static_cast<double>(trials);
    return m;
}

}  // namespace resist
