#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <vector>

#include "cubical.hpp"
#include "errors.hpp"
#include "gfqi.hpp"
#include "parallel.hpp"
#include "z2.hpp"

namespace gfb {

// boundary matrix in filtration order: degree-major, then value, then canonical cell order
struct FilteredBoundaryMatrix {
    std::vector<size_t> degree_offset{0};
    std::vector<double> values;
    std::vector<index_t> cell_ids; // cell index within its degree before sorting
    SparseZ2 matrix;
    int index_shift = 0;

    size_t size() const { return values.size(); }
    int top_degree() const { return static_cast<int>(degree_offset.size()) - 2; }
    int degree_of(size_t pos) const {
        return static_cast<int>(std::upper_bound(degree_offset.begin(), degree_offset.end(), pos) -
                                degree_offset.begin()) - 1;
    }

    void check_invariants() const {
        for (int k = 0; k <= top_degree(); ++k) {
            for (size_t p = degree_offset[k]; p < degree_offset[k + 1]; ++p) {
                if (p > degree_offset[k] && values[p] < values[p - 1])
                    throw NonMonotone("column order is not sorted by value");
                for (index_t r : matrix.col(static_cast<index_t>(p))) {
                    if (k == 0 || r < degree_offset[k - 1] || r >= degree_offset[k])
                        throw NonMonotone("boundary leaves the degree below");
                    if (values[r] > values[p])
                        throw NonMonotone("face value exceeds cell value at column " + std::to_string(p));
                }
            }
        }
    }

    // generic complex: per cell its degree, value and faces (indices into the same list)
    static FilteredBoundaryMatrix from_cells(const std::vector<int>& degree, const std::vector<double>& value,
                                             const std::vector<std::vector<index_t>>& faces, int shift = 0) {
        size_t n = degree.size();
        std::vector<index_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](index_t a, index_t b) {
            if (degree[a] != degree[b]) return degree[a] < degree[b];
            return value[a] < value[b];
        });
        std::vector<index_t> inv(n);
        for (size_t p = 0; p < n; ++p) inv[order[p]] = static_cast<index_t>(p);
        FilteredBoundaryMatrix F;
        F.index_shift = shift;
        int top = n ? *std::max_element(degree.begin(), degree.end()) : -1;
        F.degree_offset.assign(top + 2, 0);
        for (int d : degree) F.degree_offset[d + 1]++;
        for (int k = 0; k <= top; ++k) F.degree_offset[k + 1] += F.degree_offset[k];
        F.matrix = SparseZ2(static_cast<index_t>(n));
        std::vector<index_t> rows;
        for (size_t p = 0; p < n; ++p) {
            index_t c = order[p];
            F.values.push_back(value[c]);
            F.cell_ids.push_back(c);
            rows.clear();
            for (index_t f : faces[c]) rows.push_back(inv[f]);
            F.matrix.push_col(rows);
        }
        F.check_invariants();
        return F;
    }

    void dump(std::ostream& os) const {
        os.precision(17);
        for (size_t p = 0; p < size(); ++p)
            os << degree_of(p) << ' ' << values[p] << ' ' << cell_ids[p] << '\n';
    }

    void dump_matrix(std::ostream& os) const {
        for (index_t j = 0; j < matrix.cols(); ++j) {
            int k = degree_of(j);
            for (index_t i : matrix.col(j)) os << k << ' ' << i << ' ' << j << '\n';
        }
    }
};

// rank of lexicographic (anchor, directions) among all cells of one side
template <class Pair>
std::vector<std::vector<uint32_t>> canonical_ranks(const Pair& P, const CubicalComplex& C, bool quotient_first) {
    struct Key {
        int k;
        index_t pos;
        index_t anchor;
        uint32_t mask;
    };
    std::vector<Key> keys;
    for (int k = 0; k <= P.top(); ++k)
        for (index_t p = 0; p < P.count(k); ++p) {
            index_t c = P.cells[k][p];
            if (c == CubicalComplex::none) continue;
            keys.push_back({k, p, C.anchor[k][c], C.mask[k][c]});
        }
    // vertices are stored lexicographically, so anchor index order is coordinate order
    std::sort(keys.begin(), keys.end(), [](const Key& a, const Key& b) {
        if (a.anchor != b.anchor) return a.anchor < b.anchor;
        return a.mask < b.mask;
    });
    std::vector<std::vector<uint32_t>> rank(P.top() + 1);
    for (int k = 0; k <= P.top(); ++k) rank[k].assign(P.count(k), 0);
    uint32_t r = quotient_first ? 1 : 0;
    for (auto& key : keys) rank[key.k][key.pos] = r++;
    return rank;
}

struct FilterOptions {
    int threads = 1;
};

// vertex values on (base position incl. the collapsed class) x (all fiber vertices)
inline std::vector<double> vertex_values(const GfqiSpec& g, const BasePair& X, const FiberPair& Y, int threads) {
    size_t nb = X.count(0), nf = Y.Y.count(0);
    std::vector<double> V(nb * nf);
    parallel_for(nb, threads, [&](size_t b) {
        for (index_t f = 0; f < nf; ++f) {
            auto xi = Y.Y.coords(f);
            if (b == 0)
                V[b * nf + f] = quadratic_form(g, xi);
            else
                V[b * nf + f] = eval_gfqi(g, X.X.coords(X.cells[0][b]), xi);
        }
    });
    return V;
}

inline FilteredBoundaryMatrix filter_complex(const GfqiSpec& g, const BlockBoundary& K, FilterOptions opt = {}) {
    const BasePair& X = *K.base;
    const FiberPair& Y = *K.fiber;
    if (X.X.mesh != g.mesh() || Y.Y.mesh != g.mesh()) throw MeshMismatch("complex and samples use different meshes");
    size_t total = K.total();
    if (total >= size_t(std::numeric_limits<index_t>::max()))
        throw MemoryCap("cell count exceeds the 32-bit index range");
    const size_t nf = Y.Y.count(0);
    auto V = vertex_values(g, X, Y, opt.threads);
    auto brank = canonical_ranks(X, X.X, true);
    auto frank = canonical_ranks(Y, Y.Y, false);

    FilteredBoundaryMatrix F;
    F.index_shift = g.quad_index;
    F.degree_offset.assign(K.top() + 2, 0);
    for (int j = 0; j <= K.top(); ++j) F.degree_offset[j + 1] = F.degree_offset[j] + K.count(j);
    F.values.resize(total);
    F.cell_ids.resize(total);
    F.matrix = SparseZ2(static_cast<index_t>(total));
    size_t nnz = 0;
    for (int j = 1; j <= K.top(); ++j) nnz += K.count(j) * 2 * j;
    F.matrix.reserve(total, nnz);

    struct Rec {
        double v;
        uint32_t br, fr;
        index_t idx;
    };
    std::vector<index_t> inv_prev, inv_cur;
    std::vector<size_t> bd;
    std::vector<index_t> rows;
    for (int j = 0; j <= K.top(); ++j) {
        size_t cnt = K.count(j);
        std::vector<Rec> recs(cnt);
        parallel_for(cnt, opt.threads, [&](size_t idx) {
            auto c = K.decode(j, idx);
            int l = j - c.k;
            double v = -std::numeric_limits<double>::infinity();
            for (index_t bv : X.verts(c.k, c.b))
                for (index_t fv : Y.verts(l, c.f)) v = std::max(v, V[bv * nf + fv]);
            recs[idx] = {v, brank[c.k][c.b], frank[l][c.f], static_cast<index_t>(idx)};
        });
        std::sort(recs.begin(), recs.end(), [](const Rec& a, const Rec& b) {
            if (a.v != b.v) return a.v < b.v;
            if (a.br != b.br) return a.br < b.br;
            return a.fr < b.fr;
        });
        size_t off = F.degree_offset[j];
        inv_cur.assign(cnt, 0);
        for (size_t p = 0; p < cnt; ++p) {
            F.values[off + p] = recs[p].v;
            F.cell_ids[off + p] = recs[p].idx;
            inv_cur[recs[p].idx] = static_cast<index_t>(off + p);
        }
        recs = {};
        for (size_t p = 0; p < cnt; ++p) {
            rows.clear();
            if (j > 0) {
                K.boundary(j, K.decode(j, F.cell_ids[off + p]), bd);
                for (size_t r : bd) rows.push_back(inv_prev[r]);
            }
            F.matrix.push_col(rows);
        }
        inv_prev.swap(inv_cur);
    }
    F.check_invariants();
    return F;
}

// ranks of H_k of the sub-complex of cells with value < t, keyed by the shifted degree
inline std::map<int, long> sublevel_betti(const FilteredBoundaryMatrix& F, double t) {
    size_t n = F.size();
    std::vector<char> in(n);
    for (size_t p = 0; p < n; ++p) in[p] = F.values[p] < t;
    int top = F.top_degree();
    std::vector<long> dims(top + 2, 0), ranks(top + 2, 0);
    for (int k = 0; k <= top; ++k) {
        std::vector<char> cols(n, 0);
        for (size_t p = F.degree_offset[k]; p < F.degree_offset[k + 1]; ++p) {
            dims[k] += in[p];
            cols[p] = in[p];
        }
        if (k > 0) ranks[k] = static_cast<long>(submatrix_rank(F.matrix, in, cols));
    }
    std::map<int, long> betti;
    for (int k = 0; k <= top; ++k) betti[k - F.index_shift] = dims[k] - ranks[k] - ranks[k + 1];
    return betti;
}

} // namespace gfb
