#pragma once

#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "resist/crc32c.hpp"
#include "resist/graph.hpp"
#include "resist/treedecomp.hpp"

namespace resist {

struct BuildError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NonPositivePivot : BuildError {
    NodeId node;
    explicit NonPositivePivot(NodeId node)
        : BuildError("non-positive pivot at node " + std::to_string(node)), node(node) {}
};
struct HierarchyViolation : BuildError {
    NodeId neighbor, node;
    HierarchyViolation(NodeId neighbor, NodeId node)
        : BuildError("processed neighbor " + std::to_string(neighbor) +
                     " is not a descendant of " + std::to_string(node)),
          neighbor(neighbor), node(node) {}
};
struct NotAnAncestor : std::logic_error {
    NotAnAncestor(NodeId v, NodeId u)
        : std::logic_error("node " + std::to_string(v) + " is not an ancestor of " +
                           std::to_string(u)) {}
};

struct IndexIoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct BadMagic : IndexIoError {
    BadMagic() : IndexIoError("bad index file magic") {}
};
struct UnsupportedVersion : IndexIoError {
    explicit UnsupportedVersion(std::uint32_t v)
        : IndexIoError("unsupported index version " + std::to_string(v)) {}
};
struct TruncatedFile : IndexIoError {
    TruncatedFile() : IndexIoError("index file truncated") {}
};
struct ChecksumMismatch : IndexIoError {
    ChecksumMismatch() : IndexIoError("index checksum mismatch") {}
};

// Resistance labelling over a tree decomposition. Label array of node v has
// subtree_size(v) entries; entry k is S[v,u] for the node u with
// dfs_order(u) = dfs_order(v) + k. Roots carry no labels.
struct LabelIndex {
    TreeDecomposition tree;
    std::vector<std::uint64_t> offsets;  // n+1 prefix sums, by internal node id
    std::vector<double> values;
    std::vector<double> diagonal;            // (L_root^{-1})[u,u]
    std::vector<std::uint64_t> external_ids;  // internal id -> external label
    std::vector<std::uint32_t> component;     // internal id -> component index
    bool weighted = false;

    std::size_t node_count() const { return diagonal.size(); }
    std::uint64_t label_count() const { return values.size(); }

    double label_at(NodeId v, NodeId u) const {
        if (!tree.is_ancestor(v, u)) throw NotAnAncestor(v, u);
        return values[offsets[v] + (tree.dfs_order[u] - tree.dfs_order[v])];
    }
};

inline constexpr double kPivotFloor = 1e-12;

// Bottom-up label construction: reverse-DFS order, one rank-1 update per
// processed graph neighbor. Handles forests (each tree independent).
inline LabelIndex build_labels(const Graph& g, const TreeDecomposition& t) {
    const std::size_t n = g.node_count();
    LabelIndex idx;
    idx.tree = t;
    idx.weighted = g.weighted();
    idx.external_ids = g.external_ids();
    idx.component.resize(n);
    for (NodeId u = 0; u < n; ++u) idx.component[u] = g.component_of(u);
    idx.diagonal.assign(n, 0.0);
    idx.offsets.assign(n + 1, 0);
    for (NodeId v = 0; v < n; ++v)
        idx.offsets[v + 1] = t.is_root(v) ? 0 : t.subtree_size[v];
    for (std::size_t v = 0; v < n; ++v) idx.offsets[v + 1] += idx.offsets[v];
    idx.values.assign(idx.offsets[n], 0.0);

    // scratch accumulator indexed by dfs position
    std::vector<double> acc(n, 0.0);

    for (std::size_t pos = n; pos-- > 0;) {
        const NodeId v = t.dfs_to_node[pos];
        if (t.is_root(v)) continue;
        const std::uint32_t v_dfs = t.dfs_order[v];
        const std::uint32_t v_end = v_dfs + t.subtree_size[v];

        for (const auto& nb : g.neighbors(v)) {
            const NodeId w = nb.node;
            if (t.dfs_order[w] <= v_dfs) continue;  // not yet processed
            if (!t.is_ancestor(v, w)) throw HierarchyViolation(w, v);
            // walk w up to v, adding scaled label columns
            NodeId vk = w;
            while (vk != v) {
                if (t.is_root(vk)) throw HierarchyViolation(w, v);
                const std::uint32_t k_dfs = t.dfs_order[vk];
                const double* lab = &idx.values[idx.offsets[vk]];
                const double ratio =
                    nb.conductance * lab[t.dfs_order[w] - k_dfs] / lab[0];
                const std::uint32_t k_size = t.subtree_size[vk];
                for (std::uint32_t k = 0; k < k_size; ++k)
                    acc[k_dfs + k] += lab[k] * ratio;
                vk = t.parent[vk];
            }
        }
        // the accumulator must be complete before the degree correction:
        // a later neighbor's walk can still add to an earlier neighbor's slot
        double neighbor_term = 0.0;
        for (const auto& nb : g.neighbors(v))
            if (t.dfs_order[nb.node] > v_dfs)
                neighbor_term += nb.conductance * acc[t.dfs_order[nb.node]];
        const double denominator = g.weighted_degree(v) - neighbor_term;
        if (denominator <= kPivotFloor) throw NonPositivePivot(v);

        double* out = &idx.values[idx.offsets[v]];
        out[0] = 1.0 / denominator;
        idx.diagonal[v] += out[0];
        for (std::uint32_t k = v_dfs + 1; k < v_end; ++k) {
            const double s = acc[k] / denominator;
            out[k - v_dfs] = s;
            idx.diagonal[t.dfs_to_node[k]] += s * s * denominator;
            acc[k] = 0.0;
        }
        acc[v_dfs] = 0.0;
    }
    return idx;
}

namespace detail {

inline constexpr char kIndexMagic[4] = {'T', 'R', 'I', 'X'};
inline constexpr std::uint32_t kIndexVersion = 1;

class ChecksummingWriter {
public:
    explicit ChecksummingWriter(std::ostream& out) : out_(out) {}
    void raw(const void* data, std::size_t len) {
        out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(len));
        crc_.update(data, len);
    }
    template <typename T>
    void pod(T value) {
        raw(&value, sizeof(T));
    }
    template <typename T>
    void array(const std::vector<T>& v) {
        pod<std::uint64_t>(v.size());
        if (!v.empty()) raw(v.data(), v.size() * sizeof(T));
    }
    std::uint32_t crc() const { return crc_.value(); }

private:
    std::ostream& out_;
    Crc32c crc_;
};

class ChecksummingReader {
public:
    explicit ChecksummingReader(std::istream& in) : in_(in) {}
    void raw(void* data, std::size_t len) {
        in_.read(static_cast<char*>(data), static_cast<std::streamsize>(len));
        if (static_cast<std::size_t>(in_.gcount()) != len) throw TruncatedFile();
        crc_.update(data, len);
    }
    template <typename T>
    T pod() {
        T value;
        raw(&value, sizeof(T));
        return value;
    }
    template <typename T>
    void array(std::vector<T>& v, std::uint64_t expected_size = static_cast<std::uint64_t>(-1)) {
        std::uint64_t count = pod<std::uint64_t>();
        if (expected_size != static_cast<std::uint64_t>(-1) && count != expected_size)
            throw IndexIoError("unexpected array length in index file");
        v.resize(count);
        if (count) raw(v.data(), count * sizeof(T));
    }
    std::uint32_t crc() const { return crc_.value(); }

private:
    std::istream& in_;
    Crc32c crc_;
};

}  // namespace detail

inline void serialize(const LabelIndex& idx, std::ostream& out) {
    detail::ChecksummingWriter w(out);
    const std::uint64_t n = idx.node_count();
    w.raw(detail::kIndexMagic, 4);
    w.pod<std::uint32_t>(detail::kIndexVersion);
    w.pod<std::uint32_t>(idx.weighted ? 1u : 0u);
    w.pod<std::uint64_t>(n);
    w.pod<std::uint64_t>(idx.tree.roots.size());
    for (NodeId r : idx.tree.roots) w.pod<std::uint64_t>(r);

    std::vector<std::uint64_t> parent64(n), dfs64(n), sub64(n);
    for (std::size_t v = 0; v < n; ++v) {
        parent64[v] = idx.tree.parent[v] == kNoNode ? static_cast<std::uint64_t>(-1)
                                                    : idx.tree.parent[v];
        dfs64[v] = idx.tree.dfs_order[v];
        sub64[v] = idx.tree.subtree_size[v];
    }
    w.array(parent64);
    w.array(dfs64);
    w.array(sub64);
    w.array(idx.tree.depth);
    w.array(idx.offsets);
    w.array(idx.values);
    w.array(idx.diagonal);
    w.array(idx.external_ids);
    std::uint32_t crc = w.crc();
    out.write(reinterpret_cast<const char*>(&crc), sizeof(crc));
}

inline LabelIndex deserialize(std::istream& in) {
    detail::ChecksummingReader r(in);
    char magic[4];
    r.raw(magic, 4);
    if (std::memcmp(magic, detail::kIndexMagic, 4) != 0) throw BadMagic();
    std::uint32_t version = r.pod<std::uint32_t>();
    if (version != detail::kIndexVersion) throw UnsupportedVersion(version);
    std::uint32_t flags = r.pod<std::uint32_t>();
    std::uint64_t n = r.pod<std::uint64_t>();
    std::uint64_t comp_count = r.pod<std::uint64_t>();

    LabelIndex idx;
    idx.weighted = (flags & 1u) != 0;
    idx.tree.roots.resize(comp_count);
    for (auto& root : idx.tree.roots) root = static_cast<NodeId>(r.pod<std::uint64_t>());

    std::vector<std::uint64_t> parent64, dfs64, sub64;
    r.array(parent64, n);
    r.array(dfs64, n);
    r.array(sub64, n);
    r.array(idx.tree.depth, n);
    r.array(idx.offsets, n + 1);
    r.array(idx.values, idx.offsets.empty() ? 0 : idx.offsets.back());
    r.array(idx.diagonal, n);
    r.array(idx.external_ids, n);

    std::uint32_t expected = r.crc();
    std::uint32_t stored;
    in.read(reinterpret_cast<char*>(&stored), sizeof(stored));
    if (static_cast<std::size_t>(in.gcount()) != sizeof(stored)) throw TruncatedFile();
    if (stored != expected) throw ChecksumMismatch();

    auto& t = idx.tree;
    t.parent.resize(n);
    t.dfs_order.resize(n);
    t.subtree_size.resize(n);
    t.dfs_to_node.assign(n, kNoNode);
    for (std::size_t v = 0; v < n; ++v) {
        t.parent[v] = parent64[v] == static_cast<std::uint64_t>(-1)
                          ? kNoNode
                          : static_cast<NodeId>(parent64[v]);
        t.dfs_order[v] = static_cast<std::uint32_t>(dfs64[v]);
        t.subtree_size[v] = static_cast<std::uint32_t>(sub64[v]);
        t.dfs_to_node[t.dfs_order[v]] = static_cast<NodeId>(v);
    }

    // component labels: walk parent chains, memoized
    idx.component.assign(n, static_cast<std::uint32_t>(-1));
    for (std::uint32_t c = 0; c < t.roots.size(); ++c) idx.component[t.roots[c]] = c;
    std::vector<NodeId> chain;
    for (NodeId v = 0; v < n; ++v) {
        NodeId u = v;
        chain.clear();
        while (idx.component[u] == static_cast<std::uint32_t>(-1)) {
            chain.push_back(u);
            u = t.parent[u];
        }
        for (NodeId c : chain) idx.component[c] = idx.component[u];
    }
    return idx;
}

}  // namespace resist
