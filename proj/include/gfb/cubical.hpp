#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <unordered_map>
#include <vector>

#include "errors.hpp"
#include "z2.hpp"

namespace gfb {

// full cubical complex on the lattice points of a ball, coordinates in units of 1/m
class CubicalComplex {
public:
    int dim = 0;
    int mesh = 1;
    std::vector<int> vertex_coords;              // dim ints per vertex, lexicographic
    std::vector<std::vector<index_t>> anchor;    // per degree: anchor vertex of each cell
    std::vector<std::vector<uint32_t>> mask;     // per degree: spanned directions
    std::vector<SparseZ2> boundary;              // boundary[k]: k-cells -> (k-1)-cells
    std::vector<std::vector<char>> in_boundary;  // topological boundary sub-complex

    size_t count(int k) const { return anchor[k].size(); }
    std::span<const int> coords(index_t v) const { return {vertex_coords.data() + size_t(v) * dim, size_t(dim)}; }

    index_t vertex_at(std::span<const int> x) const {
        size_t lin = 0;
        for (int a = 0; a < dim; ++a) {
            int k = x[a] + L_;
            if (k < 0 || k > 2 * L_) return none;
            lin = lin * side_ + k;
        }
        return box_[lin];
    }

    index_t cell_at(int k, index_t v, uint32_t msk) const {
        if (v == none) return none;
        if (k == 0) return v;
        auto it = lookup_[k].find(uint64_t(v) << dim | msk);
        return it == lookup_[k].end() ? none : it->second;
    }

    // the 2^k vertices of a k-cell
    void vertices(int k, index_t c, std::vector<index_t>& out) const {
        out.clear();
        if (k == 0) {
            out.push_back(c);
            return;
        }
        index_t v = anchor[k][c];
        uint32_t msk = mask[k][c];
        std::vector<int> x(dim);
        auto base = coords(v);
        for (uint32_t sub = msk;; sub = (sub - 1) & msk) {
            for (int a = 0; a < dim; ++a) x[a] = base[a] + ((sub >> a) & 1);
            out.push_back(vertex_at(x));
            if (sub == 0) break;
        }
        std::sort(out.begin(), out.end());
    }

    static CubicalComplex ball(int dim, int m, double radius) {
        if (dim < 1 || dim > 20) throw EmptyComplex("unsupported lattice dimension");
        CubicalComplex X;
        X.dim = dim;
        X.mesh = m;
        double rm = radius * m;
        X.L_ = static_cast<int>(std::floor(rm)) + 1;
        X.side_ = 2 * X.L_ + 1;
        double cells = std::pow(double(X.side_), dim);
        if (cells > double(1 << 28)) throw MemoryCap("vertex box too large for the lattice ball");
        X.box_.assign(static_cast<size_t>(cells), none);
        std::vector<int> x(dim, -X.L_);
        double r2 = rm * rm * (1 + 1e-12);
        index_t nv = 0;
        while (true) {
            long long s = 0;
            for (int v : x) s += (long long)v * v;
            if (double(s) <= r2) {
                X.vertex_coords.insert(X.vertex_coords.end(), x.begin(), x.end());
                size_t lin = 0;
                for (int a = 0; a < dim; ++a) lin = lin * X.side_ + (x[a] + X.L_);
                X.box_[lin] = nv++;
            }
            int a = dim - 1;
            while (a >= 0 && x[a] == X.L_) x[a--] = -X.L_;
            if (a < 0) break;
            ++x[a];
        }
        if (nv == 0) throw EmptyComplex("ball of radius " + std::to_string(radius) + " has no lattice point");
        X.enumerate_cells(nv);
        X.mark_boundary();
        return X;
    }

    static constexpr index_t none = index_t(-1);

private:
    int L_ = 0;
    int side_ = 1;
    std::vector<index_t> box_;
    std::vector<std::unordered_map<uint64_t, index_t>> lookup_;

    void enumerate_cells(index_t nv) {
        anchor.assign(dim + 1, {});
        mask.assign(dim + 1, {});
        lookup_.assign(dim + 1, {});
        boundary.assign(dim + 1, SparseZ2());
        anchor[0].resize(nv);
        mask[0].assign(nv, 0);
        for (index_t v = 0; v < nv; ++v) anchor[0][v] = v;
        std::vector<std::vector<uint32_t>> masks_of(dim + 1);
        for (uint32_t msk = 1; msk < (1u << dim); ++msk) masks_of[std::popcount(msk)].push_back(msk);
        std::vector<int> x(dim);
        for (int k = 1; k <= dim; ++k) {
            for (index_t v = 0; v < nv; ++v) {
                auto base = coords(v);
                for (uint32_t msk : masks_of[k]) {
                    bool ok = true;
                    for (uint32_t sub = msk; sub && ok; sub = (sub - 1) & msk) {
                        for (int a = 0; a < dim; ++a) x[a] = base[a] + ((sub >> a) & 1);
                        ok = vertex_at(x) != none;
                    }
                    if (!ok) continue;
                    lookup_[k][uint64_t(v) << dim | msk] = static_cast<index_t>(anchor[k].size());
                    anchor[k].push_back(v);
                    mask[k].push_back(msk);
                }
            }
            if (anchor[k].empty()) {
                anchor.resize(k);
                mask.resize(k);
                lookup_.resize(k);
                boundary.resize(k);
                break;
            }
        }
        for (size_t k = 1; k < anchor.size(); ++k) {
            SparseZ2& B = boundary[k];
            B.set_rows(static_cast<index_t>(anchor[k - 1].size()));
            B.reserve(anchor[k].size(), anchor[k].size() * 2 * k);
            std::vector<index_t> rows;
            for (index_t c = 0; c < anchor[k].size(); ++c) {
                rows.clear();
                faces(static_cast<int>(k), c, rows);
                B.push_col(rows);
            }
        }
    }

    void faces(int k, index_t c, std::vector<index_t>& rows) const {
        index_t v = anchor[k][c];
        uint32_t msk = mask[k][c];
        auto base = coords(v);
        std::vector<int> x(base.begin(), base.end());
        for (int a = 0; a < dim; ++a) {
            if (!((msk >> a) & 1)) continue;
            uint32_t fm = msk & ~(1u << a);
            rows.push_back(cell_at(k - 1, v, fm));
            x[a] += 1;
            rows.push_back(cell_at(k - 1, vertex_at(x), fm));
            x[a] -= 1;
        }
    }

    // faces not shared by two top cubes, cells in no top cube, and their closure
    void mark_boundary() {
        int top = static_cast<int>(anchor.size()) - 1;
        in_boundary.assign(top + 1, {});
        for (int k = 0; k <= top; ++k) in_boundary[k].assign(count(k), 0);
        std::vector<int> x(dim);
        auto top_at = [&](std::vector<int>& y) {
            if (top != dim) return false;
            return cell_at(dim, vertex_at(y), (1u << dim) - 1) != none;
        };
        for (int k = 0; k < top; ++k) {
            for (index_t c = 0; c < count(k); ++c) {
                auto base = coords(anchor[k][c]);
                uint32_t msk = mask[k][c];
                uint32_t free = ((1u << dim) - 1) & ~msk;
                int cofaces = 0;
                for (uint32_t sub = free;; sub = (sub - 1) & free) {
                    for (int a = 0; a < dim; ++a) x[a] = base[a] - ((sub >> a) & 1);
                    if (top_at(x)) ++cofaces;
                    if (sub == 0) break;
                }
                bool facet = k == dim - 1;
                if (cofaces == 0 || (facet && cofaces == 1)) in_boundary[k][c] = 1;
            }
        }
        for (int k = top; k >= 1; --k)
            for (index_t c = 0; c < count(k); ++c)
                if (in_boundary[k][c])
                    for (index_t f : boundary[k].col(c)) in_boundary[k - 1][f] = 1;
    }
};

// X/dX: boundary cells deleted, boundary vertices merged into position 0
struct BasePair {
    CubicalComplex X;
    std::vector<std::vector<index_t>> cells;   // cells[k][pos] = X cell, cells[0][0] is the collapsed class
    std::vector<std::vector<index_t>> pos;     // X cell -> position, none when deleted
    std::vector<SparseZ2> dbar;                // dbar[k]: positions of degree k -> k-1
    std::vector<std::vector<index_t>> vert_offsets; // per degree, into vert_lists
    std::vector<std::vector<index_t>> vert_lists;   // distinct degree-0 positions of each cell

    int top() const { return static_cast<int>(cells.size()) - 1; }
    size_t count(int k) const { return k >= 0 && k <= top() ? cells[k].size() : 0; }
    std::span<const index_t> verts(int k, index_t p) const {
        return {vert_lists[k].data() + vert_offsets[k][p], vert_lists[k].data() + vert_offsets[k][p + 1]};
    }
    bool is_quotient(int k, index_t p) const { return k == 0 && p == 0; }
};

inline BasePair build_base_pair(double Rb, int m, int n) {
    if (m < 1) throw ConfigInvalid("mesh must be >= 1");
    if (!(Rb > 0)) throw InvalidBounds("base radius must be positive");
    int D = 2 * n;
    BasePair P;
    P.X = CubicalComplex::ball(D, m, Rb + std::sqrt(double(D)) / m);
    const auto& X = P.X;
    int top = static_cast<int>(X.anchor.size()) - 1;
    P.cells.assign(top + 1, {});
    P.pos.assign(top + 1, {});
    for (int k = 0; k <= top; ++k) {
        P.pos[k].assign(X.count(k), CubicalComplex::none);
        if (k == 0) P.cells[0].push_back(CubicalComplex::none);
        for (index_t c = 0; c < X.count(k); ++c) {
            if (X.in_boundary[k][c]) {
                if (k == 0) P.pos[0][c] = 0;
                continue;
            }
            P.pos[k][c] = static_cast<index_t>(P.cells[k].size());
            P.cells[k].push_back(c);
        }
    }
    P.dbar.assign(top + 1, SparseZ2());
    std::vector<index_t> rows;
    for (int k = 1; k <= top; ++k) {
        SparseZ2& B = P.dbar[k];
        B.set_rows(static_cast<index_t>(P.cells[k - 1].size()));
        for (index_t c : P.cells[k]) {
            rows.clear();
            for (index_t f : X.boundary[k].col(c))
                if (P.pos[k - 1][f] != CubicalComplex::none) rows.push_back(P.pos[k - 1][f]);
            B.push_col(rows);
        }
    }
    P.vert_offsets.assign(top + 1, {0});
    P.vert_lists.assign(top + 1, {});
    std::vector<index_t> vs;
    for (int k = 0; k <= top; ++k) {
        for (index_t p = 0; p < P.cells[k].size(); ++p) {
            if (k == 0) {
                P.vert_lists[0].push_back(p);
            } else {
                X.vertices(k, P.cells[k][p], vs);
                for (auto& v : vs) v = P.pos[0][v];
                std::sort(vs.begin(), vs.end());
                vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
                P.vert_lists[k].insert(P.vert_lists[k].end(), vs.begin(), vs.end());
            }
            P.vert_offsets[k].push_back(static_cast<index_t>(P.vert_lists[k].size()));
        }
    }
    return P;
}

// (Y, Y0) with Y0 the boundary cells whose vertices have all xi^+ coordinates zero
struct FiberPair {
    CubicalComplex Y;
    int quad_index = 0;
    std::vector<std::vector<char>> in_Y0;
    std::vector<std::vector<index_t>> cells;   // cells[k][pos] = Y cell outside Y0
    std::vector<std::vector<index_t>> pos;
    std::vector<SparseZ2> dtilde;
    std::vector<std::vector<index_t>> vert_offsets;
    std::vector<std::vector<index_t>> vert_lists; // Y vertex indices, including those in Y0

    int top() const { return static_cast<int>(cells.size()) - 1; }
    size_t count(int k) const { return k >= 0 && k <= top() ? cells[k].size() : 0; }
    std::span<const index_t> verts(int k, index_t p) const {
        return {vert_lists[k].data() + vert_offsets[k][p], vert_lists[k].data() + vert_offsets[k][p + 1]};
    }
};

inline FiberPair build_fiber_pair(double Rf, int m, int d, int i) {
    if (m < 1) throw ConfigInvalid("mesh must be >= 1");
    if (!(Rf > 0)) throw InvalidBounds("fiber radius must be positive");
    if (d < 1 || i < 0 || i > d) throw InvalidBounds("bad fiber dimension or index");
    FiberPair P;
    P.quad_index = i;
    P.Y = CubicalComplex::ball(d, m, Rf + std::sqrt(double(d)) / m);
    const auto& Y = P.Y;
    int top = static_cast<int>(Y.anchor.size()) - 1;
    std::vector<char> plus_zero(Y.count(0));
    for (index_t v = 0; v < Y.count(0); ++v) {
        auto x = Y.coords(v);
        bool z = true;
        for (int a = i; a < d; ++a) z = z && x[a] == 0;
        plus_zero[v] = z;
    }
    P.in_Y0.assign(top + 1, {});
    std::vector<index_t> vs;
    for (int k = 0; k <= top; ++k) {
        P.in_Y0[k].assign(Y.count(k), 0);
        for (index_t c = 0; c < Y.count(k); ++c) {
            if (!Y.in_boundary[k][c]) continue;
            Y.vertices(k, c, vs);
            bool all = true;
            for (index_t v : vs) all = all && plus_zero[v];
            P.in_Y0[k][c] = all;
        }
    }
    P.cells.assign(top + 1, {});
    P.pos.assign(top + 1, {});
    for (int k = 0; k <= top; ++k) {
        P.pos[k].assign(Y.count(k), CubicalComplex::none);
        for (index_t c = 0; c < Y.count(k); ++c) {
            if (P.in_Y0[k][c]) continue;
            P.pos[k][c] = static_cast<index_t>(P.cells[k].size());
            P.cells[k].push_back(c);
        }
    }
    P.dtilde.assign(top + 1, SparseZ2());
    std::vector<index_t> rows;
    for (int k = 1; k <= top; ++k) {
        SparseZ2& B = P.dtilde[k];
        B.set_rows(static_cast<index_t>(P.cells[k - 1].size()));
        for (index_t c : P.cells[k]) {
            rows.clear();
            for (index_t f : Y.boundary[k].col(c))
                if (P.pos[k - 1][f] != CubicalComplex::none) rows.push_back(P.pos[k - 1][f]);
            B.push_col(rows);
        }
    }
    P.vert_offsets.assign(top + 1, {0});
    P.vert_lists.assign(top + 1, {});
    for (int k = 0; k <= top; ++k) {
        for (index_t p = 0; p < P.cells[k].size(); ++p) {
            Y.vertices(k, P.cells[k][p], vs);
            P.vert_lists[k].insert(P.vert_lists[k].end(), vs.begin(), vs.end());
            P.vert_offsets[k].push_back(static_cast<index_t>(P.vert_lists[k].size()));
        }
    }
    return P;
}

// lattice points of a D-ball are at most the volume of the ball grown by half a cell diagonal
inline double ball_lattice_estimate(int D, double radius, int m) {
    double r = radius * m + std::sqrt(double(D)) / 2;
    return std::pow(std::numbers::pi, D / 2.0) / std::tgamma(D / 2.0 + 1) * std::pow(r, D);
}

// |B_0| 2^{2n} |F_0| 2^d, the cell count upper bound
inline double predicted_cell_count(double Rb, double Rf, int m, int n, int d) {
    double b0 = ball_lattice_estimate(2 * n, Rb + std::sqrt(2.0 * n) / m, m);
    double f0 = ball_lattice_estimate(d, Rf + std::sqrt(double(d)) / m, m);
    return b0 * std::pow(2.0, 2 * n) * f0 * std::pow(2.0, d);
}

// chain complex of (X/dX x Y, X/dX x Y0); degree j blocks ordered by base degree k
class BlockBoundary {
public:
    const BasePair* base = nullptr;
    const FiberPair* fiber = nullptr;

    BlockBoundary() = default;
    BlockBoundary(const BasePair& b, const FiberPair& f) : base(&b), fiber(&f) {
        if (b.X.mesh != f.Y.mesh) throw MeshMismatch("base and fiber meshes differ");
        top_ = b.top() + f.top();
        offsets_.assign(top_ + 1, {});
        counts_.assign(top_ + 1, 0);
        for (int j = 0; j <= top_; ++j) {
            size_t off = 0;
            for (int k = 0; k <= j; ++k) {
                offsets_[j].push_back(off);
                off += b.count(k) * f.count(j - k);
            }
            offsets_[j].push_back(off);
            counts_[j] = off;
        }
    }

    int top() const { return top_; }
    size_t count(int j) const { return j >= 0 && j <= top_ ? counts_[j] : 0; }
    size_t total() const {
        size_t s = 0;
        for (auto c : counts_) s += c;
        return s;
    }

    struct Cell {
        int k;
        index_t b, f;
    };

    Cell decode(int j, size_t idx) const {
        const auto& off = offsets_[j];
        int k = static_cast<int>(std::upper_bound(off.begin(), off.end(), idx) - off.begin()) - 1;
        size_t nf = fiber->count(j - k);
        size_t r = idx - off[k];
        return {k, static_cast<index_t>(r / nf), static_cast<index_t>(r % nf)};
    }

    size_t encode(int j, int k, index_t b, index_t f) const {
        return offsets_[j][k] + size_t(b) * fiber->count(j - k) + f;
    }

    // unsorted, indices into degree j-1
    void boundary(int j, const Cell& c, std::vector<size_t>& out) const {
        out.clear();
        int l = j - c.k;
        if (c.k >= 1)
            for (index_t r : base->dbar[c.k].col(c.b)) out.push_back(encode(j - 1, c.k - 1, r, c.f));
        if (l >= 1)
            for (index_t r : fiber->dtilde[l].col(c.f)) out.push_back(encode(j - 1, c.k, c.b, r));
    }

    SparseZ2 materialize(int j) const {
        SparseZ2 A(static_cast<index_t>(count(j - 1)));
        std::vector<size_t> tmp;
        std::vector<index_t> rows;
        for (size_t idx = 0; idx < count(j); ++idx) {
            boundary(j, decode(j, idx), tmp);
            rows.assign(tmp.begin(), tmp.end());
            A.push_col(rows);
        }
        return A;
    }

    // factor check always; the assembled product too when small enough
    void check_chain_condition(size_t full_limit = 2000000) const {
        auto check = [](const std::vector<SparseZ2>& D, const char* what) {
            for (size_t k = 2; k < D.size(); ++k)
                if (!(D[k - 1] * D[k]).is_zero())
                    throw InternalError(std::string(what) + " boundary does not square to zero");
        };
        check(base->dbar, "base");
        check(fiber->dtilde, "fiber");
        if (total() > full_limit) return;
        for (int j = 2; j <= top_; ++j)
            if (!(materialize(j - 1) * materialize(j)).is_zero())
                throw InternalError("product boundary does not square to zero in degree " + std::to_string(j));
    }

private:
    int top_ = 0;
    std::vector<std::vector<size_t>> offsets_;
    std::vector<size_t> counts_;
};

inline BlockBoundary product_boundaries(const BasePair& b, const FiberPair& f) {
    BlockBoundary B(b, f);
    B.check_chain_condition();
    return B;
}

} // namespace gfb
