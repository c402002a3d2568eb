#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "resist/labelling.hpp"

namespace resist {

struct InvalidId : std::out_of_range {
    explicit InvalidId(std::uint64_t id)
        : std::out_of_range("invalid node id " + std::to_string(id)) {}
};
struct DifferentComponents : std::runtime_error {
    DifferentComponents(NodeId s, NodeId t)
        : std::runtime_error("nodes " + std::to_string(s) + " and " + std::to_string(t) +
                             " are in different components") {}
};

struct PairResult {
    NodeId s, t;
    double resistance;  // +inf when disconnected
    bool connected;
    std::uint64_t labels_touched;
};

struct SourceResult {
    NodeId s;
    std::vector<double> resistance;  // +inf for other components
    std::vector<double> column;      // (L_root^{-1})[s,u], reused by the flow module
    std::uint64_t work;              // n + sum of subtree sizes on the walk
};

inline void check_id(const LabelIndex& idx, NodeId u) {
    if (u >= idx.node_count()) throw InvalidId(u);
}

// depth-lockstep LCA, O(h)
inline NodeId lca(const LabelIndex& idx, NodeId s, NodeId t) {
    check_id(idx, s);
    check_id(idx, t);
    if (idx.component[s] != idx.component[t]) throw DifferentComponents(s, t);
    const auto& tree = idx.tree;
    NodeId a = s, b = t;
    while (tree.depth[a] > tree.depth[b]) a = tree.parent[a];
    while (tree.depth[b] > tree.depth[a]) b = tree.parent[b];
    while (a != b) {
        a = tree.parent[a];
        b = tree.parent[b];
    }
    return a;
}

// Single-pair query: three path sums over the labelling.
inline PairResult query_pair(const LabelIndex& idx, NodeId s, NodeId t) {
    check_id(idx, s);
    check_id(idx, t);
    if (idx.component[s] != idx.component[t])
        return {s, t, std::numeric_limits<double>::infinity(), false, 0};
    if (s == t) return {s, t, 0.0, true, 0};

    // evaluate on the ordered pair so r(s,t) is bitwise equal to r(t,s)
    const NodeId a = std::min(s, t), b = std::max(s, t);
    const auto& tree = idx.tree;
    const NodeId meet = lca(idx, a, b);
    double r = 0.0;
    std::uint64_t touched = 0;

    for (NodeId w = a; w != meet; w = tree.parent[w], ++touched) {
        const double av = idx.label_at(w, a);
        r += av * av / idx.values[idx.offsets[w]];
    }
    for (NodeId w = b; w != meet; w = tree.parent[w], ++touched) {
        const double bv = idx.label_at(w, b);
        r += bv * bv / idx.values[idx.offsets[w]];
    }
    for (NodeId w = meet; !tree.is_root(w); w = tree.parent[w], ++touched) {
        const double d = idx.label_at(w, a) - idx.label_at(w, b);
        r += d * d / idx.values[idx.offsets[w]];
    }
    return {s, t, r, true, touched};
}

// Single-source query: one subtree-accumulating walk from s to the root,
// then r(s,u) = Diagonal[s] + Diagonal[u] - 2 Col[u].
inline SourceResult query_source(const LabelIndex& idx, NodeId s) {
    check_id(idx, s);
    const auto& tree = idx.tree;
    const std::size_t n = idx.node_count();
    SourceResult res;
    res.s = s;
    res.column.assign(n, 0.0);
    res.resistance.assign(n, std::numeric_limits<double>::infinity());
    res.work = n;

    std::vector<double> col_dfs(n, 0.0);
    for (NodeId w = s; !tree.is_root(w); w = tree.parent[w]) {
        const std::uint32_t w_dfs = tree.dfs_order[w];
        const double* lab = &idx.values[idx.offsets[w]];
        const double ratio = lab[tree.dfs_order[s] - w_dfs] / lab[0];
        const std::uint32_t sz = tree.subtree_size[w];
        for (std::uint32_t k = 0; k < sz; ++k) col_dfs[w_dfs + k] += lab[k] * ratio;
        res.work += sz;
    }
    const std::uint32_t my_comp = idx.component[s];
    for (NodeId u = 0; u < n; ++u) {
        res.column[u] = col_dfs[tree.dfs_order[u]];
        if (idx.component[u] == my_comp)
            res.resistance[u] =
                idx.diagonal[s] + idx.diagonal[u] - 2.0 * res.column[u];
    }
    res.resistance[s] = 0.0;
    return res;
}

}  // namespace resist
