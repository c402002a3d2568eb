#include <catch2/catch_amalgamated.hpp>

#include "test_util.hpp"

using namespace resist;

namespace {

double signed_flow(const FlowAssignment& f, const Graph& g, std::uint64_t a,
                   std::uint64_t b) {
    NodeId ia = g.internal_id(a), ib = g.internal_id(b);
    for (std::size_t e = 0; e < f.flow.size(); ++e)
        if (f.edge_u[e] == std::min(ia, ib) && f.edge_v[e] == std::max(ia, ib))
            return ia < ib ? f.flow[e] : -f.flow[e];
    FAIL("edge not found");
    return 0.0;
}

void check_conservation(const FlowAssignment& f, const Graph& g) {
    std::vector<double> net(g.node_count(), 0.0);
    for (std::size_t e = 0; e < f.flow.size(); ++e) {
        net[f.edge_u[e]] -= f.flow[e];
        net[f.edge_v[e]] += f.flow[e];
    }
    for (NodeId u = 0; u < g.node_count(); ++u) {
        double want = 0.0;
        if (u == f.s) want = -1.0;
        if (u == f.t) want = 1.0;
        CHECK(std::abs(net[u] - want) <= 1e-9);
    }
}

}  // namespace

TEST_CASE("canonical electrical flow values") {
    auto g = testutil::canonical_graph();
    auto idx = testutil::build_index(g);
    auto f = electrical_flow(idx, g, g.internal_id(2), g.internal_id(4));
    CHECK(signed_flow(f, g, 2, 9) == Catch::Approx(0.59).margin(0.005));
    CHECK(signed_flow(f, g, 9, 8) == Catch::Approx(0.36).margin(0.005));
    CHECK(signed_flow(f, g, 8, 4) == Catch::Approx(0.66).margin(0.005));
    check_conservation(f, g);
}

TEST_CASE("flow matches the dense reference on random graphs") {
    for (std::uint64_t seed : {81ull, 82ull, 83ull}) {
        auto g = testutil::random_connected_graph(25, 0.15, seed, seed % 2);
        auto idx = testutil::build_index(g);
        Xoshiro256StarStar rng(seed);
        NodeId s = static_cast<NodeId>(rng.below(g.node_count()));
        NodeId t = static_cast<NodeId>(rng.below(g.node_count()));
        if (s == t) t = (t + 1) % g.node_count();
        auto f = electrical_flow(idx, g, s, t);
        auto ref = oracle::electrical_flow_reference(g, s, t);
        REQUIRE(f.flow.size() == ref.flow.size());
        for (std::size_t e = 0; e < f.flow.size(); ++e) {
            CHECK(f.edge_u[e] == ref.edge_u[e]);
            CHECK(f.edge_v[e] == ref.edge_v[e]);
            CHECK(std::abs(f.flow[e] - ref.flow[e]) <= 1e-9);
        }
        check_conservation(f, g);
    }
}

TEST_CASE("potential drop along any s-t walk equals the resistance") {
    // Kirchhoff voltage law: sum of flow/conductance along a simple s->t path
    auto g = testutil::canonical_graph();
    auto idx = testutil::build_index(g);
    NodeId s = g.internal_id(2), t = g.internal_id(4);
    double r = query_pair(idx, s, t).resistance;
    auto f = electrical_flow(idx, g, s, t);
    // walk v2 -> v9 -> v8 -> v4 (all unit conductance)
    double drop = signed_flow(f, g, 2, 9) + signed_flow(f, g, 9, 8) + signed_flow(f, g, 8, 4);
    CHECK(drop == Catch::Approx(r).margin(1e-9));
    // a second, longer walk gives the same drop
    double drop2 = signed_flow(f, g, 2, 3) + signed_flow(f, g, 3, 7) +
                   signed_flow(f, g, 7, 8) + signed_flow(f, g, 8, 4);
    CHECK(drop2 == Catch::Approx(r).margin(1e-9));
}

TEST_CASE("two parallel paths split the current evenly") {
    Graph g = build_graph({{0, 1, 1}, {1, 3, 1}, {0, 2, 1}, {2, 3, 1}},
                          WeightMode::Unweighted);
    auto idx = testutil::build_index(g);
    auto f = electrical_flow(idx, g, 0, g.internal_id(3));
    for (std::size_t e = 0; e < f.flow.size(); ++e)
        CHECK(std::abs(f.flow[e]) == Catch::Approx(0.5).margin(1e-9));

    auto paths = alternative_paths(f, g, 2);
    REQUIRE(paths.size() == 2);
    // node-disjoint apart from the endpoints
    CHECK(paths[0].size() == 3);
    CHECK(paths[1].size() == 3);
    CHECK(paths[0][1] != paths[1][1]);
    for (const auto& p : paths) {
        CHECK(p.front() == f.s);
        CHECK(p.back() == f.t);
    }
}

TEST_CASE("a series path yields exactly one alternative") {
    auto g = testutil::path_graph(4);
    auto idx = testutil::build_index(g);
    auto f = electrical_flow(idx, g, 0, 4);
    auto paths = alternative_paths(f, g, 3);  // ask for more than exist
    REQUIRE(paths.size() == 1);
    CHECK(paths[0] == std::vector<NodeId>{0, 1, 2, 3, 4});
}

TEST_CASE("zero flow has no path") {
    auto g = testutil::path_graph(2);
    auto idx = testutil::build_index(g);
    auto f = electrical_flow(idx, g, 1, 1);
    for (double x : f.flow) CHECK(x == 0.0);
    CHECK_THROWS_AS(alternative_paths(f, g, 1), NoPath);
    CHECK_THROWS_AS(alternative_paths(f, g, 0), std::invalid_argument);
}

TEST_CASE("extracted paths on the canonical graph follow the flow") {
    auto g = testutil::canonical_graph();
    auto idx = testutil::build_index(g);
    auto f = electrical_flow(idx, g, g.internal_id(2), g.internal_id(4));
    auto paths = alternative_paths(f, g, 3);
    REQUIRE(!paths.empty());
    // first path is the widest: v2 v9 v8 v4 carries bottleneck 0.36
    std::vector<NodeId> widest{g.internal_id(2), g.internal_id(9), g.internal_id(8),
                               g.internal_id(4)};
    CHECK(paths[0] == widest);
    for (const auto& p : paths) {
        CHECK(p.front() == f.s);
        CHECK(p.back() == f.t);
        // consecutive nodes are adjacent in the graph
        for (std::size_t i = 0; i + 1 < p.size(); ++i) {
            bool adjacent = false;
            for (const auto& nb : g.neighbors(p[i])) adjacent |= nb.node == p[i + 1];
            CHECK(adjacent);
        }
    }
}

TEST_CASE("shortest_path_length") {
    auto g = testutil::canonical_graph();
    CHECK(shortest_path_length(g, g.internal_id(2), g.internal_id(4)) ==
          Catch::Approx(3.0).margin(1e-12));
    CHECK(shortest_path_length(g, 0, 0) == 0.0);
    Graph two = build_graph({{0, 1, 1}, {5, 6, 1}}, WeightMode::Unweighted);
    CHECK(std::isinf(shortest_path_length(two, 0, two.internal_id(5))));
}

TEST_CASE("route metrics on hand-checkable inputs") {
    Graph g = build_graph({{0, 1, 1}, {1, 3, 1}, {0, 2, 1}, {2, 3, 1}},
                          WeightMode::Unweighted);
    NodeId t = g.internal_id(3);
    std::vector<std::vector<NodeId>> paths{{0, g.internal_id(1), t},
                                           {0, g.internal_id(2), t}};
    double shortest = shortest_path_length(g, 0, t);

    SECTION("disjoint paths of shortest length") {
        auto m = route_metrics(paths, g, shortest, 0.0, 100, 1);
        CHECK(m.length_ratio == Catch::Approx(1.0).margin(1e-12));
        CHECK(m.diversity == Catch::Approx(1.0).margin(1e-12));
        CHECK(m.robustness == 1.0);  // nothing is ever removed
    }
    SECTION("identical paths have zero diversity") {
        std::vector<std::vector<NodeId>> same{paths[0], paths[0]};
        auto m = route_metrics(same, g, shortest, 0.0, 10, 1);
        CHECK(m.diversity == Catch::Approx(0.0).margin(1e-12));
    }
    SECTION("a single path is fully diverse by convention") {
        std::vector<std::vector<NodeId>> one{paths[0]};
        auto m = route_metrics(one, g, shortest, 0.0, 10, 1);
        CHECK(m.diversity == 1.0);
    }
    SECTION("single-path robustness approaches (1-p)^edges") {
        std::vector<std::vector<NodeId>> one{paths[0]};  // 2 edges
        const double p = 0.1;
        auto m = route_metrics(one, g, shortest, p, 8000, 7);
        const double want = (1 - p) * (1 - p);
        CHECK(m.robustness == Catch::Approx(want).margin(0.02));  // ~4 sigma
    }
    SECTION("seeded robustness is reproducible") {
        auto a = route_metrics(paths, g, shortest, 0.3, 500, 99);
        auto b = route_metrics(paths, g, shortest, 0.3, 500, 99);
        CHECK(a.robustness == b.robustness);
    }
}

TEST_CASE("flow input validation") {
    Graph g = build_graph({{0, 1, 1}, {5, 6, 1}}, WeightMode::Unweighted);
    auto idx = testutil::build_index(g);
    CHECK_THROWS_AS(electrical_flow(idx, g, 0, g.internal_id(5)), DifferentComponents);
    CHECK_THROWS_AS(electrical_flow(idx, g, 0, 99), InvalidId);
}
