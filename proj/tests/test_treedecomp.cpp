#include <catch2/catch_amalgamated.hpp>

#include "test_util.hpp"

using namespace resist;

namespace {

// brute-force ancestor set via parent chain
std::vector<NodeId> ancestors_of(const TreeDecomposition& t, NodeId u) {
    std::vector<NodeId> out;
    for (NodeId w = t.parent[u]; w != kNoNode; w = t.parent[w]) out.push_back(w);
    return out;
}

}  // namespace

TEST_CASE("mde on a star") {
    Graph g = build_graph({{0, 1, 1}, {0, 2, 1}, {0, 3, 1}}, WeightMode::Unweighted);
    auto t = decompose(g);
    // leaves 1 and 2 go first; then the hub ties with leaf 3 at degree 1
    // and the smaller id (the hub) is eliminated before it
    CHECK(t.elimination_order == std::vector<NodeId>{1, 2, 0, 3});
    CHECK(t.roots == std::vector<NodeId>{3});
    CHECK(t.height() == 3);
    CHECK(t.width == 1);
}

TEST_CASE("mde on a path has width 1 and starts at an endpoint") {
    auto g = testutil::path_graph(3);
    auto t = decompose(g);
    CHECK(t.width == 1);
    NodeId first = t.elimination_order.front();
    CHECK(g.neighbors(first).size() == 1);
}

TEST_CASE("mde on the canonical graph: width 2, height 6") {
    auto g = testutil::canonical_graph();
    auto t = decompose(g);
    CHECK(t.width == 2);
    CHECK(t.height() == 6);
}

TEST_CASE("dfs annotation invariants") {
    auto check_tree = [](const Graph& g, const TreeDecomposition& t) {
        const std::size_t n = t.node_count();
        std::uint64_t subtree_total = 0, depth_total = 0;
        for (NodeId v = 0; v < n; ++v) {
            subtree_total += t.subtree_size[v];
            depth_total += t.depth[v] + 1;
            if (!t.is_root(v)) {
                NodeId p = t.parent[v];
                CHECK(t.dfs_order[p] < t.dfs_order[v]);
                CHECK(std::find(t.bag[v].begin(), t.bag[v].end(), p) != t.bag[v].end());
                // every bag member other than v is an ancestor of v
                for (NodeId w : t.bag[v]) {
                    if (w == v) continue;
                    CHECK(t.is_ancestor(w, v));
                }
            }
            // subtree occupies a contiguous dfs range
            for (std::uint32_t k = 0; k < t.subtree_size[v]; ++k) {
                NodeId u = t.dfs_to_node[t.dfs_order[v] + k];
                CHECK(t.is_ancestor(v, u));
            }
        }
        CHECK(subtree_total == depth_total);
        // elimination order is a permutation
        std::vector<char> seen(n, 0);
        for (NodeId v : t.elimination_order) {
            CHECK(!seen[v]);
            seen[v] = 1;
        }
        // every original edge connects an ancestor-descendant pair
        for (NodeId u = 0; u < g.node_count(); ++u)
            for (const auto& nb : g.neighbors(u))
                CHECK((t.is_ancestor(u, nb.node) || t.is_ancestor(nb.node, u)));
    };
    check_tree(testutil::canonical_graph(), decompose(testutil::canonical_graph()));
    for (std::uint64_t seed : {7ull, 8ull, 9ull}) {
        auto g = testutil::random_connected_graph(60, 0.08, seed);
        check_tree(g, decompose(g));
    }
}

TEST_CASE("dfs on degenerate trees") {
    // single node: graph with one self-edge is rejected, so use a 2-chain
    Graph chain = build_graph({{0, 1, 1}, {1, 2, 1}}, WeightMode::Unweighted);
    auto t = decompose(chain);
    NodeId root = t.roots[0];
    CHECK(t.dfs_order[root] == 0);
    CHECK(t.depth[root] == 0);
    CHECK(t.subtree_size[root] == 3);
    std::vector<std::uint32_t> depths(t.depth.begin(), t.depth.end());
    std::sort(depths.begin(), depths.end());
    CHECK(depths == std::vector<std::uint32_t>{0, 1, 2});
}

TEST_CASE("is_ancestor") {
    auto g = testutil::canonical_graph();
    auto t = decompose(g);
    NodeId root = t.roots[0];
    for (NodeId u = 0; u < g.node_count(); ++u) {
        CHECK(t.is_ancestor(root, u));
        CHECK(t.is_ancestor(u, u));
    }
    // v8 is an ancestor of v4 (the path from v4 to the root passes v8)
    NodeId v4 = g.internal_id(4), v8 = g.internal_id(8);
    CHECK(t.is_ancestor(v8, v4));
    CHECK_FALSE(t.is_ancestor(v4, v8));
}

TEST_CASE("ancestors of LCA form a vertex cut") {
    // removing LCA(s,t) and its ancestors disconnects s from t
    for (std::uint64_t seed : {11ull, 12ull, 13ull, 14ull}) {
        auto g = testutil::random_connected_graph(50, 0.06, seed);
        auto t = decompose(g);
        auto idx = build_labels(g, t);
        Xoshiro256StarStar rng(seed * 31);
        for (int trial = 0; trial < 20; ++trial) {
            NodeId s = static_cast<NodeId>(rng.below(g.node_count()));
            NodeId u = static_cast<NodeId>(rng.below(g.node_count()));
            NodeId meet = lca(idx, s, u);
            if (meet == s || meet == u) continue;  // cut includes an endpoint
            std::vector<char> removed(g.node_count(), 0);
            for (NodeId w = meet; w != kNoNode; w = t.parent[w]) removed[w] = 1;
            // BFS from s avoiding removed nodes
            std::vector<char> seen(g.node_count(), 0);
            seen[s] = 1;
            std::vector<NodeId> stack{s};
            while (!stack.empty()) {
                NodeId a = stack.back();
                stack.pop_back();
                for (const auto& nb : g.neighbors(a))
                    if (!seen[nb.node] && !removed[nb.node]) {
                        seen[nb.node] = 1;
                        stack.push_back(nb.node);
                    }
            }
            CHECK_FALSE(seen[u]);
        }
    }
}

TEST_CASE("disconnected input yields one root per component") {
    Graph g = build_graph({{0, 1, 1}, {1, 2, 1}, {5, 6, 1}}, WeightMode::Unweighted);
    auto t = decompose(g);
    CHECK(t.roots.size() == 2);
    std::uint32_t total = 0;
    for (NodeId r : t.roots) total += t.subtree_size[r];
    CHECK(total == g.node_count());
}
