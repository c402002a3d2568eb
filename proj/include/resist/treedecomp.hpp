#pragma once

#include <cstdint>
#include <queue>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "resist/graph.hpp"

namespace resist {

struct CycleDetected : std::runtime_error {
    CycleDetected() : std::runtime_error("parent array contains a cycle") {}
};

// Minimum-degree-elimination tree decomposition plus DFS annotation.
// Disconnected inputs yield a forest: one root per component, all arrays
// stored together.
struct TreeDecomposition {
    std::vector<NodeId> elimination_order;  // v_1 eliminated first
    std::vector<std::uint32_t> elim_index;  // inverse of elimination_order
    std::vector<std::vector<NodeId>> bag;   // {v} ∪ N(v) at elimination time, sorted
    std::vector<NodeId> parent;             // kNoNode for roots
    std::vector<std::uint32_t> depth;       // root depth 0
    std::vector<std::uint32_t> dfs_order;
    std::vector<NodeId> dfs_to_node;        // inverse of dfs_order
    std::vector<std::uint32_t> subtree_size;
    std::vector<NodeId> roots;              // one per component, in finish order
    std::uint32_t width = 0;                // max |bag| - 1

    std::size_t node_count() const { return parent.size(); }

    bool is_root(NodeId v) const { return parent[v] == kNoNode; }

    // ancestor-or-self via DFS interval containment
    bool is_ancestor(NodeId a, NodeId u) const {
        return dfs_order[a] <= dfs_order[u] &&
               dfs_order[u] < dfs_order[a] + subtree_size[a];
    }

    // tree height in nodes (max depth + 1), per component root
    std::uint32_t height_of_root(NodeId root) const {
        std::uint32_t h = 0;
        for (std::size_t u = 0; u < depth.size(); ++u)
            if (is_ancestor(root, static_cast<NodeId>(u)))
                h = std::max(h, depth[u] + 1);
        return h;
    }

    std::uint32_t height() const {
        std::uint32_t h = 0;
        for (auto d : depth) h = std::max(h, d + 1);
        return h;
    }
};

namespace detail {

// lazy min-degree priority queue entry; ties broken by the original
// (external) node label so results don't depend on input edge order
struct DegEntry {
    std::uint32_t degree;
    std::uint64_t ext;
    NodeId node;
    bool operator>(const DegEntry& o) const {
        return degree != o.degree ? degree > o.degree : ext > o.ext;
    }
};

}  // namespace detail

// Minimum-degree elimination. Ties broken by smallest node id. Each
// elimination records bag = {v} ∪ current neighbors and adds clique
// fill-in among the neighbors.
inline TreeDecomposition mde_decompose(const Graph& g) {
    const std::size_t n = g.node_count();
    TreeDecomposition t;
    t.elimination_order.reserve(n);
    t.elim_index.assign(n, 0);
    t.bag.assign(n, {});
    t.parent.assign(n, kNoNode);

    std::vector<std::unordered_set<NodeId>> work(n);
    for (NodeId u = 0; u < n; ++u)
        for (const auto& nb : g.neighbors(u)) work[u].insert(nb.node);

    std::priority_queue<detail::DegEntry, std::vector<detail::DegEntry>,
                        std::greater<detail::DegEntry>>
        pq;
    for (NodeId u = 0; u < n; ++u)
        pq.push({static_cast<std::uint32_t>(work[u].size()), g.external_id(u), u});

    std::vector<char> eliminated(n, 0);
    while (!pq.empty()) {
        auto [deg, ext, v] = pq.top();
        pq.pop();
        if (eliminated[v] || work[v].size() != deg) continue;  // stale entry
        eliminated[v] = 1;
        std::uint32_t idx = static_cast<std::uint32_t>(t.elimination_order.size());
        t.elim_index[v] = idx;
        t.elimination_order.push_back(v);
        auto& bag = t.bag[v];
        bag.assign(work[v].begin(), work[v].end());
        bag.push_back(v);
        std::sort(bag.begin(), bag.end());
        t.width = std::max<std::uint32_t>(t.width,
                                          static_cast<std::uint32_t>(bag.size()) - 1);
        // clique fill-in among neighbors, then detach v
        std::vector<NodeId> nbrs(work[v].begin(), work[v].end());
        for (NodeId a : nbrs) {
            work[a].erase(v);
            for (NodeId b : nbrs)
                if (a != b) work[a].insert(b);
        }
        for (NodeId a : nbrs)
            pq.push({static_cast<std::uint32_t>(work[a].size()), g.external_id(a), a});
        work[v].clear();
    }

    // parent = bag member with the smallest elimination index greater than ours
    for (NodeId v = 0; v < n; ++v) {
        NodeId best = kNoNode;
        for (NodeId w : t.bag[v]) {
            if (w == v) continue;
            if (t.elim_index[w] > t.elim_index[v] &&
                (best == kNoNode || t.elim_index[w] < t.elim_index[best]))
                best = w;
        }
        t.parent[v] = best;
        if (best == kNoNode) t.roots.push_back(v);
    }
    return t;
}

// Fills dfs_order/depth/subtree_size by iterative DFS from each root,
// children visited in increasing node-id order.
inline void dfs_annotate(TreeDecomposition& t) {
    const std::size_t n = t.node_count();
    std::vector<std::vector<NodeId>> children(n);
    for (NodeId v = 0; v < n; ++v)
        if (t.parent[v] != kNoNode) children[t.parent[v]].push_back(v);
    for (auto& c : children) std::sort(c.begin(), c.end());

    t.depth.assign(n, 0);
    t.dfs_order.assign(n, 0);
    t.dfs_to_node.assign(n, kNoNode);
    t.subtree_size.assign(n, 1);

    std::uint32_t counter = 0;
    std::size_t visited = 0;
    std::vector<std::pair<NodeId, std::size_t>> stack;  // (node, next child idx)
    for (NodeId root : t.roots) {
        stack.clear();
        t.depth[root] = 0;
        t.dfs_order[root] = counter++;
        ++visited;
        stack.emplace_back(root, 0);
        while (!stack.empty()) {
            auto& [v, ci] = stack.back();
            if (ci < children[v].size()) {
                NodeId c = children[v][ci++];
                t.depth[c] = t.depth[v] + 1;
                t.dfs_order[c] = counter++;
                ++visited;
                stack.emplace_back(c, 0);
            } else {
                NodeId done = v;
                stack.pop_back();
                if (!stack.empty())
                    t.subtree_size[stack.back().first] += t.subtree_size[done];
            }
        }
    }
    if (visited != n) throw CycleDetected();
    for (NodeId v = 0; v < n; ++v) t.dfs_to_node[t.dfs_order[v]] = v;
}

inline TreeDecomposition decompose(const Graph& g) {
    TreeDecomposition t = mde_decompose(g);
    dfs_annotate(t);
    return t;
}

}  // namespace resist
