#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "resist/graph.hpp"

namespace resist::oracle {

struct TooLarge : std::runtime_error {
    TooLarge() : std::runtime_error("graph exceeds the dense oracle size guard") {}
};
struct Singular : std::runtime_error {
    Singular() : std::runtime_error("matrix is singular") {}
};
struct ZeroPivot : std::runtime_error {
    ZeroPivot() : std::runtime_error("zero pivot during elimination") {}
};

inline constexpr std::size_t kSizeGuard = 2048;

// Row-major dense matrix; correctness reference only, not tuned for speed.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

    static DenseMatrix identity(std::size_t n) {
        DenseMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    DenseMatrix operator*(const DenseMatrix& o) const {
        DenseMatrix out(rows_, o.cols_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t k = 0; k < cols_; ++k) {
                const double a = (*this)(i, k);
                if (a == 0.0) continue;
                for (std::size_t j = 0; j < o.cols_; ++j) out(i, j) += a * o(k, j);
            }
        return out;
    }

    DenseMatrix operator-(const DenseMatrix& o) const {
        DenseMatrix out = *this;
        for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] -= o.data_[i];
        return out;
    }

    double max_abs_diff(const DenseMatrix& o) const {
        double m = 0;
        for (std::size_t i = 0; i < data_.size(); ++i)
            m = std::max(m, std::abs(data_[i] - o.data_[i]));
        return m;
    }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> data_;
};

// Gauss-Jordan inverse with partial pivoting.
inline DenseMatrix invert(DenseMatrix a) {
    const std::size_t n = a.rows();
    DenseMatrix inv = DenseMatrix::identity(n);
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
        if (std::abs(a(piv, col)) < 1e-12) throw Singular();
        if (piv != col)
            for (std::size_t c = 0; c < n; ++c) {
                std::swap(a(piv, c), a(col, c));
                std::swap(inv(piv, c), inv(col, c));
            }
        const double d = a(col, col);
        for (std::size_t c = 0; c < n; ++c) {
            a(col, c) /= d;
            inv(col, c) /= d;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const double f = a(r, col);
            if (f == 0.0) continue;
            for (std::size_t c = 0; c < n; ++c) {
                a(r, c) -= f * a(col, c);
                inv(r, c) -= f * inv(col, c);
            }
        }
    }
    return inv;
}

inline DenseMatrix dense_laplacian(const Graph& g, std::size_t size_guard = kSizeGuard) {
    const std::size_t n = g.node_count();
    if (n > size_guard) throw TooLarge();
    DenseMatrix L(n, n);
    for (NodeId u = 0; u < n; ++u) {
        L(u, u) = g.weighted_degree(u);
        for (const auto& nb : g.neighbors(u)) L(u, nb.node) = -nb.conductance;
    }
    return L;
}

// Inverse of L with the rows/columns in `remove` deleted, embedded back
// with zero rows/columns at the removed positions.
inline DenseMatrix submatrix_inverse(const DenseMatrix& L, const std::vector<NodeId>& remove) {
    const std::size_t n = L.rows();
    std::vector<char> removed(n, 0);
    for (NodeId v : remove) removed[v] = 1;
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < n; ++i)
        if (!removed[i]) keep.push_back(i);
    DenseMatrix sub(keep.size(), keep.size());
    for (std::size_t i = 0; i < keep.size(); ++i)
        for (std::size_t j = 0; j < keep.size(); ++j) sub(i, j) = L(keep[i], keep[j]);
    DenseMatrix inv = invert(sub);
    DenseMatrix out(n, n);
    for (std::size_t i = 0; i < keep.size(); ++i)
        for (std::size_t j = 0; j < keep.size(); ++j) out(keep[i], keep[j]) = inv(i, j);
    return out;
}

// Schur complement onto `keep`: L_VV - L_VU L_UU^{-1} L_UV.
inline DenseMatrix schur_complement(const DenseMatrix& L, const std::vector<NodeId>& keep) {
    const std::size_t n = L.rows();
    std::vector<char> kept(n, 0);
    for (NodeId v : keep) kept[v] = 1;
    std::vector<std::size_t> vs, us;
    for (std::size_t i = 0; i < n; ++i) (kept[i] ? vs : us).push_back(i);
    if (us.empty()) {
        DenseMatrix out(vs.size(), vs.size());
        for (std::size_t i = 0; i < vs.size(); ++i)
            for (std::size_t j = 0; j < vs.size(); ++j) out(i, j) = L(vs[i], vs[j]);
        return out;
    }
    DenseMatrix lvv(vs.size(), vs.size()), lvu(vs.size(), us.size()),
        luu(us.size(), us.size()), luv(us.size(), vs.size());
    for (std::size_t i = 0; i < vs.size(); ++i)
        for (std::size_t j = 0; j < vs.size(); ++j) lvv(i, j) = L(vs[i], vs[j]);
    for (std::size_t i = 0; i < vs.size(); ++i)
        for (std::size_t j = 0; j < us.size(); ++j) lvu(i, j) = L(vs[i], us[j]);
    for (std::size_t i = 0; i < us.size(); ++i)
        for (std::size_t j = 0; j < us.size(); ++j) luu(i, j) = L(us[i], us[j]);
    for (std::size_t i = 0; i < us.size(); ++i)
        for (std::size_t j = 0; j < vs.size(); ++j) luv(i, j) = L(us[i], vs[j]);
    return lvv - lvu * invert(luu) * luv;
}

// Pseudo-inverse of a connected Laplacian: (L + J/n)^{-1} - J/n.
inline DenseMatrix laplacian_pseudo_inverse(const DenseMatrix& L) {
    const std::size_t n = L.rows();
    const double jn = 1.0 / static_cast<double>(n);
    DenseMatrix shifted = L;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) shifted(i, j) += jn;
    DenseMatrix inv = invert(shifted);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) inv(i, j) -= jn;
    return inv;
}

inline double pseudo_inverse_resistance(const DenseMatrix& L, NodeId s, NodeId t) {
    if (s == t) return 0.0;
    DenseMatrix pinv = laplacian_pseudo_inverse(L);
    return pinv(s, s) + pinv(t, t) - 2.0 * pinv(s, t);
}

// Resistance via a partition (U_i, V_i): Schur complement on V_i plus
// using p_u = u-th row of -L_UU^{-1} L_UV and (L/V_i)^dagger.
inline double partition_resistance(const DenseMatrix& L, const std::vector<NodeId>& keep_vi,
                                  NodeId s, NodeId t) {
    if (s == t) return 0.0;
    const std::size_t n = L.rows();
    std::vector<char> in_vi(n, 0);
    for (NodeId v : keep_vi) in_vi[v] = 1;
    std::vector<std::size_t> vs, us;
    std::vector<std::size_t> pos(n);  // position within own block
    for (std::size_t i = 0; i < n; ++i) {
        if (in_vi[i]) {
            pos[i] = vs.size();
            vs.push_back(i);
        } else {
            pos[i] = us.size();
            us.push_back(i);
        }
    }
    DenseMatrix schur = schur_complement(L, keep_vi);
    DenseMatrix schur_pinv = laplacian_pseudo_inverse(schur);

    if (in_vi[s] && in_vi[t]) {
        const std::size_t i = pos[s], j = pos[t];
        return schur_pinv(i, i) + schur_pinv(j, j) - 2.0 * schur_pinv(i, j);
    }

    DenseMatrix luu(us.size(), us.size()), luv(us.size(), vs.size());
    for (std::size_t i = 0; i < us.size(); ++i) {
        for (std::size_t j = 0; j < us.size(); ++j) luu(i, j) = L(us[i], us[j]);
        for (std::size_t j = 0; j < vs.size(); ++j) luv(i, j) = L(us[i], vs[j]);
    }
    DenseMatrix luu_inv = invert(luu);
    DenseMatrix p = luu_inv * luv;  // rows are -p_u up to sign
    for (std::size_t i = 0; i < us.size(); ++i)
        for (std::size_t j = 0; j < vs.size(); ++j) p(i, j) = -p(i, j);

    auto quad = [&](const std::vector<double>& x) {
        double acc = 0;
        for (std::size_t i = 0; i < vs.size(); ++i) {
            if (x[i] == 0.0) continue;
            for (std::size_t j = 0; j < vs.size(); ++j) acc += x[i] * schur_pinv(i, j) * x[j];
        }
        return acc;
    };

    if (!in_vi[s] && !in_vi[t]) {
        const std::size_t i = pos[s], j = pos[t];
        std::vector<double> d(vs.size());
        for (std::size_t c = 0; c < vs.size(); ++c) d[c] = p(i, c) - p(j, c);
        return luu_inv(i, i) + luu_inv(j, j) - 2.0 * luu_inv(i, j) + quad(d);
    }

    // mixed case; orient so u is in U_i
    const NodeId u = in_vi[s] ? t : s;
    const NodeId v = in_vi[s] ? s : t;
    const std::size_t i = pos[u];
    std::vector<double> d(vs.size());
    for (std::size_t c = 0; c < vs.size(); ++c) d[c] = p(i, c);
    d[pos[v]] -= 1.0;
    return luu_inv(i, i) + quad(d);
}

// Rank-1 Gaussian elimination of the listed nodes from an inverse matrix:
// S <- S - S[:,v] S[:,v]^T / S[v,v].
inline DenseMatrix gaussian_eliminate_inverse(DenseMatrix m, const std::vector<NodeId>& eliminate) {
    const std::size_t n = m.rows();
    for (NodeId v : eliminate) {
        const double pivot = m(v, v);
        if (std::abs(pivot) < 1e-12) throw ZeroPivot();
        std::vector<double> col(n);
        for (std::size_t i = 0; i < n; ++i) col[i] = m(i, v);
        for (std::size_t i = 0; i < n; ++i) {
            if (col[i] == 0.0) continue;
            const double f = col[i] / pivot;
            for (std::size_t j = 0; j < n; ++j) m(i, j) -= f * col[j];
        }
    }
    return m;
}

struct ReferenceFlow {
    // flows keyed by edges oriented from lower to higher internal id
    std::vector<NodeId> edge_u, edge_v;
    std::vector<double> flow;
};

// Unit s->t current: potentials from the grounded inverse, flow on each
// edge = potential drop times conductance.
inline ReferenceFlow electrical_flow_reference(const Graph& g, NodeId s, NodeId t) {
    const std::size_t n = g.node_count();
    DenseMatrix L = dense_laplacian(g);
    DenseMatrix linv = submatrix_inverse(L, {static_cast<NodeId>(n - 1)});
    std::vector<double> x(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) x[i] = linv(i, s) - linv(i, t);
    ReferenceFlow rf;
    for (NodeId u = 0; u < n; ++u)
        for (const auto& nb : g.neighbors(u)) {
            if (nb.node < u) continue;
            rf.edge_u.push_back(u);
            rf.edge_v.push_back(nb.node);
            rf.flow.push_back((x[u] - x[nb.node]) * nb.conductance);
        }
    return rf;
}

// Contraction graph: all nodes outside `keep` collapse into one super-node
// (returned as the last internal id); parallel edges merge by conductance sum.
inline Graph contraction_graph(const Graph& g, const std::vector<NodeId>& keep) {
    std::vector<char> kept(g.node_count(), 0);
    for (NodeId v : keep) kept[v] = 1;
    const std::uint64_t super = g.node_count();  // fresh external label
    std::vector<EdgeRecord> edges;
    for (NodeId u = 0; u < g.node_count(); ++u)
        for (const auto& nb : g.neighbors(u)) {
            if (nb.node < u) continue;
            const std::uint64_t a = kept[u] ? u : super;
            const std::uint64_t b = kept[nb.node] ? nb.node : super;
            if (a == b) continue;
            edges.push_back({a, b, nb.conductance});
        }
    return build_graph(edges, WeightMode::Conductance);
}

}  // namespace resist::oracle
