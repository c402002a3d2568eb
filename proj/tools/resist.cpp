// resist: exact resistance-distance index tool.
//
// Subcommands: build, query pair, query source, flow, route, stats,
// verify, bench. Exit codes: 0 ok, 1 input error, 2 build error,
// 3 verification failure.

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>
#include <thread>
#include <unordered_map>

#include <CLI11.hpp>
#include <json.hpp>

#include "resist/flow.hpp"
#include "resist/graph.hpp"
#include "resist/labelling.hpp"
#include "resist/oracle.hpp"
#include "resist/query.hpp"
#include "resist/rng.hpp"
#include "resist/treedecomp.hpp"

using json = nlohmann::json;
using namespace resist;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitBuild = 2;
constexpr int kExitVerify = 3;

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::uint64_t now_ns() {
    return std::chrono::duration_cast<std::chrono::nanoseconds>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

WeightMode parse_weight_mode(const std::string& s) {
    if (s == "conductance") return WeightMode::Conductance;
    if (s == "resistance") return WeightMode::Resistance;
    if (s == "unweighted") return WeightMode::Unweighted;
    throw InputError("unknown weight mode: " + s);
}

Graph load_graph(const std::string& path, const std::string& format, WeightMode mode,
                 ParseReport* report = nullptr) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open input file: " + path);
    std::vector<EdgeRecord> edges;
    if (format == "edgelist")
        edges = parse_edge_list(in);
    else if (format == "dimacs")
        edges = parse_dimacs_gr(in);
    else
        throw InputError("unknown format: " + format);
    return build_graph(edges, mode, report);
}

LabelIndex load_index(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open index file: " + path);
    return deserialize(in);
}

// maps external ids as given on the command line to internal ids
NodeId resolve_id(const std::vector<std::uint64_t>& external_ids, std::uint64_t ext) {
    for (NodeId u = 0; u < external_ids.size(); ++u)
        if (external_ids[u] == ext) return u;
    throw InputError("node id " + std::to_string(ext) + " not in the index");
}

json height_stats(const TreeDecomposition& t) {
    json heights = json::array();
    for (NodeId r : t.roots) heights.push_back(t.height_of_root(r));
    return heights;
}

int cmd_build(const std::string& input, const std::string& format,
              const std::string& weights, const std::string& output) {
    const auto t0 = now_ns();
    ParseReport rep;
    Graph g = load_graph(input, format, parse_weight_mode(weights), &rep);
    auto tree = decompose(g);
    auto idx = build_labels(g, tree);
    {
        std::ofstream out(output, std::ios::binary);
        if (!out) throw InputError("cannot open output file: " + output);
        serialize(idx, out);
        if (!out) throw InputError("write failed: " + output);
    }
    json stats{{"n", g.node_count()},
               {"m", g.edge_count()},
               {"components", g.component_count()},
               {"height", height_stats(tree)},
               {"width", tree.width},
               {"max_degree", g.max_degree()},
               {"labels", idx.label_count()},
               {"self_loops_dropped", rep.self_loops_dropped},
               {"parallel_edges_merged", rep.parallel_edges_merged},
               {"wall_time_ns", now_ns() - t0}};
    std::cout << stats.dump() << "\n";
    return kExitOk;
}

int cmd_stats(const std::string& input, const std::string& format,
              const std::string& weights) {
    Graph g = load_graph(input, format, parse_weight_mode(weights));
    auto tree = decompose(g);
    json stats{{"n", g.node_count()},
               {"m", g.edge_count()},
               {"components", g.component_count()},
               {"height", height_stats(tree)},
               {"width", tree.width},
               {"max_degree", g.max_degree()},
               {"weighted", g.weighted()}};
    std::cout << stats.dump() << "\n";
    return kExitOk;
}

int cmd_query_pair(const std::string& index_path, std::uint64_t s_ext,
                   std::uint64_t t_ext) {
    LabelIndex idx = load_index(index_path);
    NodeId s = resolve_id(idx.external_ids, s_ext);
    NodeId t = resolve_id(idx.external_ids, t_ext);
    const auto t0 = now_ns();
    PairResult r = query_pair(idx, s, t);
    const auto elapsed = now_ns() - t0;
    json out{{"s", s_ext},
             {"t", t_ext},
             {"r", r.connected ? json(r.resistance) : json(nullptr)},
             {"connected", r.connected},
             {"labels_touched", r.labels_touched},
             {"time_ns", elapsed}};
    std::cout << out.dump() << "\n";
    return kExitOk;
}

int cmd_query_source(const std::string& index_path, std::uint64_t s_ext,
                     const std::string& output, bool binary) {
    LabelIndex idx = load_index(index_path);
    NodeId s = resolve_id(idx.external_ids, s_ext);
    const auto t0 = now_ns();
    SourceResult res = query_source(idx, s);
    const auto elapsed = now_ns() - t0;

    std::size_t reachable = 0;
    if (binary) {
        std::ofstream out(output, std::ios::binary);
        if (!out) throw InputError("cannot open output file: " + output);
        for (double r : res.resistance) {
            out.write(reinterpret_cast<const char*>(&r), sizeof(r));
            reachable += std::isfinite(r);
        }
    } else {
        std::ofstream out(output);
        if (!out) throw InputError("cannot open output file: " + output);
        out << "external_id,r\n";
        for (NodeId u = 0; u < res.resistance.size(); ++u) {
            out << idx.external_ids[u] << ',';
            if (std::isfinite(res.resistance[u])) {
                out << res.resistance[u] << '\n';
                ++reachable;
            } else {
                out << "inf\n";
            }
        }
    }
    json summary{{"s", s_ext},
                 {"n", res.resistance.size()},
                 {"reachable", reachable},
                 {"work", res.work},
                 {"output", output},
                 {"binary", binary},
                 {"time_ns", elapsed}};
    std::cout << summary.dump() << "\n";
    return kExitOk;
}

int cmd_flow(const std::string& input, const std::string& format,
             const std::string& weights, std::uint64_t s_ext, std::uint64_t t_ext) {
    Graph g = load_graph(input, format, parse_weight_mode(weights));
    auto idx = build_labels(g, decompose(g));
    NodeId s = g.internal_id(s_ext), t = g.internal_id(t_ext);
    FlowAssignment f = electrical_flow(idx, g, s, t);
    json edges = json::array();
    for (std::size_t e = 0; e < f.flow.size(); ++e)
        edges.push_back({{"u", g.external_id(f.edge_u[e])},
                         {"v", g.external_id(f.edge_v[e])},
                         {"flow", f.flow[e]}});
    double r = query_pair(idx, s, t).resistance;
    json out{{"s", s_ext}, {"t", t_ext}, {"r", r}, {"edges", edges}};
    std::cout << out.dump() << "\n";
    return kExitOk;
}

int cmd_route(const std::string& input, const std::string& format,
              const std::string& weights, std::uint64_t s_ext, std::uint64_t t_ext,
              std::size_t k, double removal_prob, std::size_t trials,
              std::uint64_t seed) {
    Graph g = load_graph(input, format, parse_weight_mode(weights));
    auto idx = build_labels(g, decompose(g));
    NodeId s = g.internal_id(s_ext), t = g.internal_id(t_ext);
    FlowAssignment f = electrical_flow(idx, g, s, t);
    auto paths = alternative_paths(f, g, k);
    double shortest = shortest_path_length(g, s, t);
    RouteMetrics m = route_metrics(paths, g, shortest, removal_prob, trials, seed);
    json jpaths = json::array();
    for (const auto& p : paths) {
        json jp = json::array();
        for (NodeId u : p) jp.push_back(g.external_id(u));
        jpaths.push_back(jp);
    }
    json out{{"s", s_ext},
             {"t", t_ext},
             {"k", paths.size()},
             {"paths", jpaths},
             {"length_ratio", m.length_ratio},
             {"diversity", m.diversity},
             {"robustness", m.robustness},
             {"seed", seed}};
    std::cout << out.dump() << "\n";
    return kExitOk;
}

int cmd_verify(const std::string& input, const std::string& format,
               const std::string& weights, const std::string& index_path,
               std::size_t pairs, std::uint64_t seed) {
    Graph g = load_graph(input, format, parse_weight_mode(weights));
    if (g.node_count() > oracle::kSizeGuard) throw InputError("graph too large to verify");
    LabelIndex idx;
    if (index_path.empty()) {
        idx = build_labels(g, decompose(g));
    } else {
        // a prebuilt index must load cleanly and describe this graph
        try {
            idx = load_index(index_path);
        } catch (const IndexIoError& e) {
            std::cerr << "verify: index rejected: " << e.what() << "\n";
            return kExitVerify;
        }
        if (idx.node_count() != g.node_count() || idx.external_ids != g.external_ids()) {
            std::cerr << "verify: index does not match the input graph\n";
            return kExitVerify;
        }
    }

    auto L = oracle::dense_laplacian(g);
    bool ok = true;
    json report;

    // sampled pair queries vs the pseudo-inverse oracle
    Xoshiro256StarStar rng(seed);
    double max_pair_diff = 0.0;
    std::size_t cross = 0;
    for (std::size_t i = 0; i < pairs; ++i) {
        NodeId s = static_cast<NodeId>(rng.below(g.node_count()));
        NodeId t = static_cast<NodeId>(rng.below(g.node_count()));
        PairResult r = query_pair(idx, s, t);
        if (g.component_of(s) != g.component_of(t)) {
            ok &= !r.connected;
            ++cross;
            continue;
        }
        double want;
        if (g.component_count() == 1) {
            want = oracle::pseudo_inverse_resistance(L, s, t);
        } else {
            // per-component oracle: ground the component's root and drop
            // every node outside the component
            std::vector<NodeId> remove;
            for (NodeId rt : idx.tree.roots)
                if (g.component_of(rt) == g.component_of(s)) remove.push_back(rt);
            for (NodeId u = 0; u < g.node_count(); ++u)
                if (g.component_of(u) != g.component_of(s)) remove.push_back(u);
            auto inv = oracle::submatrix_inverse(L, remove);
            want = inv(s, s) + inv(t, t) - 2.0 * inv(s, t);
        }
        max_pair_diff = std::max(max_pair_diff, std::abs(r.resistance - want));
    }
    ok &= max_pair_diff <= 1e-8;
    report["pairs"] = pairs;
    report["cross_component_pairs"] = cross;
    report["max_pair_diff"] = max_pair_diff;

    // label reconstruction identity (connected graphs only; the dense
    // grounded inverse needs one ground per component)
    double max_recon_diff = 0.0;
    if (g.component_count() == 1) {
        auto grounded = oracle::submatrix_inverse(L, {idx.tree.roots[0]});
        const std::size_t n = g.node_count();
        oracle::DenseMatrix recon(n, n);
        for (NodeId v = 0; v < n; ++v) {
            if (idx.tree.is_root(v)) continue;
            const double* lab = &idx.values[idx.offsets[v]];
            const std::uint32_t base = idx.tree.dfs_order[v];
            for (std::uint32_t a = 0; a < idx.tree.subtree_size[v]; ++a)
                for (std::uint32_t b = 0; b < idx.tree.subtree_size[v]; ++b)
                    recon(idx.tree.dfs_to_node[base + a], idx.tree.dfs_to_node[base + b]) +=
                        lab[a] * lab[b] / lab[0];
        }
        max_recon_diff = recon.max_abs_diff(grounded);
        ok &= max_recon_diff <= 1e-9;

        // flow conservation on one sampled pair
        NodeId fs = static_cast<NodeId>(rng.below(g.node_count()));
        NodeId ft = static_cast<NodeId>(rng.below(g.node_count()));
        if (fs != ft) {
            auto f = electrical_flow(idx, g, fs, ft);
            auto ref = oracle::electrical_flow_reference(g, fs, ft);
            double max_flow_diff = 0.0;
            for (std::size_t e = 0; e < f.flow.size(); ++e)
                max_flow_diff = std::max(max_flow_diff, std::abs(f.flow[e] - ref.flow[e]));
            ok &= max_flow_diff <= 1e-9;
            report["max_flow_diff"] = max_flow_diff;
        }
    }
    report["max_reconstruction_diff"] = max_recon_diff;
    report["pass"] = ok;
    std::cout << report.dump() << "\n";
    return ok ? kExitOk : kExitVerify;
}

struct LatencyStats {
    double mean_ns = 0, median_ns = 0, p99_ns = 0;
};

LatencyStats summarize(std::vector<std::uint64_t>& lat) {
    LatencyStats s;
    if (lat.empty()) return s;
    std::sort(lat.begin(), lat.end());
    double sum = 0;
    for (auto x : lat) sum += static_cast<double>(x);
    s.mean_ns = sum / static_cast<double>(lat.size());
    s.median_ns = static_cast<double>(lat[lat.size() / 2]);
    s.p99_ns = static_cast<double>(lat[lat.size() * 99 / 100]);
    return s;
}

int cmd_bench(const std::string& index_path, std::size_t pairs, std::size_t sources,
              std::uint64_t seed, std::size_t threads) {
    LabelIndex idx = load_index(index_path);
    const std::size_t n = idx.node_count();
    if (threads < 1) threads = 1;

    // sample the whole query set up front from one seed
    Xoshiro256StarStar rng(seed);
    std::vector<std::pair<NodeId, NodeId>> pair_set(pairs);
    for (auto& [s, t] : pair_set) {
        s = static_cast<NodeId>(rng.below(n));
        t = static_cast<NodeId>(rng.below(n));
    }
    std::vector<NodeId> source_set(sources);
    for (auto& s : source_set) s = static_cast<NodeId>(rng.below(n));

    std::vector<std::uint64_t> pair_lat(pairs), touched(pairs);
    auto pair_worker = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            const auto t0 = now_ns();
            PairResult r = query_pair(idx, pair_set[i].first, pair_set[i].second);
            pair_lat[i] = now_ns() - t0;
            touched[i] = r.labels_touched;
        }
    };
    if (threads == 1 || pairs < 2) {
        pair_worker(0, pairs);
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (pairs + threads - 1) / threads;
        for (std::size_t w = 0; w < threads; ++w) {
            std::size_t lo = w * chunk, hi = std::min(pairs, lo + chunk);
            if (lo < hi) pool.emplace_back(pair_worker, lo, hi);
        }
        for (auto& th : pool) th.join();
    }

    std::vector<std::uint64_t> source_lat(sources);
    for (std::size_t i = 0; i < sources; ++i) {
        const auto t0 = now_ns();
        volatile double sink = query_source(idx, source_set[i]).resistance[0];
        (void)sink;
        source_lat[i] = now_ns() - t0;
    }

    std::uint64_t max_touched = 0;
    double mean_touched = 0;
    for (auto x : touched) {
        max_touched = std::max(max_touched, x);
        mean_touched += static_cast<double>(x);
    }
    if (pairs) mean_touched /= static_cast<double>(pairs);

    LatencyStats ps = summarize(pair_lat), ss = summarize(source_lat);
    json out{{"pairs", pairs},
             {"sources", sources},
             {"threads", threads},
             {"seed", seed},
             {"pair_mean_ns", ps.mean_ns},
             {"pair_median_ns", ps.median_ns},
             {"pair_p99_ns", ps.p99_ns},
             {"source_mean_ns", ss.mean_ns},
             {"source_median_ns", ss.median_ns},
             {"source_p99_ns", ss.p99_ns},
             {"labels_touched_mean", mean_touched},
             {"labels_touched_max", max_touched}};
    std::cout << out.dump() << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact resistance-distance index engine"};
    app.require_subcommand(1);

    std::string input, index_path, output, format = "edgelist", weights = "unweighted";
    std::uint64_t s_ext = 0, t_ext = 0, seed = 42;
    std::size_t k = 3, pairs = 100, sources = 10, trials = 1000, threads = 1;
    double removal_prob = 0.001;
    bool binary = false;

    auto* build = app.add_subcommand("build", "build an index from a graph file");
    build->add_option("input", input)->required();
    build->add_option("-o,--output", output)->required();
    build->add_option("--format", format)->check(CLI::IsMember({"edgelist", "dimacs"}));
    build->add_option("--weights", weights)
        ->check(CLI::IsMember({"conductance", "resistance", "unweighted"}));

    auto* query = app.add_subcommand("query", "query a built index");
    query->require_subcommand(1);
    auto* qpair = query->add_subcommand("pair", "single-pair resistance");
    qpair->add_option("--index", index_path)->required();
    qpair->add_option("s", s_ext)->required();
    qpair->add_option("t", t_ext)->required();
    auto* qsource = query->add_subcommand("source", "single-source resistance vector");
    qsource->add_option("--index", index_path)->required();
    qsource->add_option("s", s_ext)->required();
    qsource->add_option("-o,--output", output)->required();
    qsource->add_flag("--binary", binary, "raw little-endian f64 instead of CSV");

    auto* flow = app.add_subcommand("flow", "unit s->t electrical flow");
    flow->add_option("input", input)->required();
    flow->add_option("s", s_ext)->required();
    flow->add_option("t", t_ext)->required();
    flow->add_option("--format", format)->check(CLI::IsMember({"edgelist", "dimacs"}));
    flow->add_option("--weights", weights)
        ->check(CLI::IsMember({"conductance", "resistance", "unweighted"}));

    auto* route = app.add_subcommand("route", "alternative paths with metrics");
    route->add_option("input", input)->required();
    route->add_option("s", s_ext)->required();
    route->add_option("t", t_ext)->required();
    route->add_option("-k", k);
    route->add_option("--removal-prob", removal_prob);
    route->add_option("--trials", trials);
    route->add_option("--seed", seed);
    route->add_option("--format", format)->check(CLI::IsMember({"edgelist", "dimacs"}));
    route->add_option("--weights", weights)
        ->check(CLI::IsMember({"conductance", "resistance", "unweighted"}));

    auto* stats = app.add_subcommand("stats", "graph and decomposition statistics");
    stats->add_option("input", input)->required();
    stats->add_option("--format", format)->check(CLI::IsMember({"edgelist", "dimacs"}));
    stats->add_option("--weights", weights)
        ->check(CLI::IsMember({"conductance", "resistance", "unweighted"}));

    auto* verify = app.add_subcommand("verify", "check the index against dense references");
    verify->add_option("input", input)->required();
    verify->add_option("--index", index_path, "verify a prebuilt index file");
    verify->add_option("--pairs", pairs);
    verify->add_option("--seed", seed);
    verify->add_option("--format", format)->check(CLI::IsMember({"edgelist", "dimacs"}));
    verify->add_option("--weights", weights)
        ->check(CLI::IsMember({"conductance", "resistance", "unweighted"}));

    auto* bench = app.add_subcommand("bench", "query latency benchmark");
    bench->add_option("--index", index_path)->required();
    bench->add_option("--pairs", pairs);
    bench->add_option("--sources", sources);
    bench->add_option("--seed", seed);
    bench->add_option("--threads", threads);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*build) return cmd_build(input, format, weights, output);
        if (*qpair) return cmd_query_pair(index_path, s_ext, t_ext);
        if (*qsource) return cmd_query_source(index_path, s_ext, output, binary);
        if (*flow) return cmd_flow(input, format, weights, s_ext, t_ext);
        if (*route)
            return cmd_route(input, format, weights, s_ext, t_ext, k, removal_prob,
                             trials, seed);
        if (*stats) return cmd_stats(input, format, weights);
        if (*verify) return cmd_verify(input, format, weights, index_path, pairs, seed);
        if (*bench) return cmd_bench(index_path, pairs, sources, seed, threads);
    } catch (const BuildError& e) {
        std::cerr << "build error: " << e.what() << "\n";
        return kExitBuild;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitInput;
}
