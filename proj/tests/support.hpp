#pragma once

#include <algorithm>
#include <random>
#include <set>
#include <vector>

#include <gfb/pipeline.hpp>

namespace gfb::testing {

// filtered circle: a@0, b@1, e1@2, e2@3 with both edges bounded by a+b
inline FilteredBoundaryMatrix filtered_circle() {
    return FilteredBoundaryMatrix::from_cells({0, 0, 1, 1}, {0, 1, 2, 3}, {{}, {}, {0, 1}, {0, 1}});
}

inline Barcode circle_barcode() {
    Barcode b;
    b.bars = {{0, 0, inf, 1}, {0, 1, 2, 1}, {1, 3, inf, 1}};
    b.normalize();
    return b;
}

inline long rank_of(const SparseZ2& a) {
    return static_cast<long>(submatrix_rank(a, std::vector<char>(a.rows(), 1), std::vector<char>(a.cols(), 1)));
}

// random simplicial complex on a few vertices, closed under faces, with monotone integer values
inline FilteredBoundaryMatrix random_complex(std::mt19937& rng, size_t max_cells = 50, int max_dim = 3) {
    std::uniform_int_distribution<int> nv_d(2, 7), val(0, 9);
    int nv = nv_d(rng);
    std::set<std::vector<int>> simplices;
    auto add_closure = [&](const std::vector<int>& s) {
        std::set<std::vector<int>> tmp;
        int k = static_cast<int>(s.size());
        for (int sub = 1; sub < (1 << k); ++sub) {
            std::vector<int> f;
            for (int a = 0; a < k; ++a)
                if (sub >> a & 1) f.push_back(s[a]);
            tmp.insert(f);
        }
        std::set<std::vector<int>> merged = simplices;
        merged.insert(tmp.begin(), tmp.end());
        if (merged.size() > max_cells) return;
        simplices.swap(merged);
    };
    std::uniform_int_distribution<int> dim_d(0, max_dim), vert(0, nv - 1);
    int tries = std::uniform_int_distribution<int>(1, 12)(rng);
    for (int t = 0; t < tries; ++t) {
        int k = dim_d(rng) + 1;
        std::set<int> vs;
        while (static_cast<int>(vs.size()) < std::min(k, nv)) vs.insert(vert(rng));
        add_closure(std::vector<int>(vs.begin(), vs.end()));
    }
    std::vector<std::vector<int>> cells(simplices.begin(), simplices.end());
    std::stable_sort(cells.begin(), cells.end(), [](auto& a, auto& b) { return a.size() < b.size(); });
    std::map<std::vector<int>, index_t> id;
    for (size_t c = 0; c < cells.size(); ++c) id[cells[c]] = static_cast<index_t>(c);
    std::vector<int> degree;
    std::vector<double> value;
    std::vector<std::vector<index_t>> faces;
    for (auto& s : cells) {
        degree.push_back(static_cast<int>(s.size()) - 1);
        std::vector<index_t> f;
        double v = val(rng);
        if (s.size() > 1)
            for (size_t drop = 0; drop < s.size(); ++drop) {
                auto t = s;
                t.erase(t.begin() + drop);
                f.push_back(id[t]);
                v = std::max(v, value[id[t]]);
            }
        value.push_back(v);
        faces.push_back(f);
    }
    return FilteredBoundaryMatrix::from_cells(degree, value, faces);
}

// adds random earlier columns of the same degree into later ones
inline FilteredBoundaryMatrix premix(const FilteredBoundaryMatrix& F, std::mt19937& rng) {
    FilteredBoundaryMatrix G = F;
    std::vector<std::vector<index_t>> cols(F.size());
    for (index_t j = 0; j < F.size(); ++j) {
        auto c = F.matrix.col(j);
        cols[j].assign(c.begin(), c.end());
    }
    std::bernoulli_distribution coin(0.3);
    std::vector<index_t> scratch;
    for (index_t j = 0; j < F.size(); ++j)
        for (index_t k = static_cast<index_t>(F.degree_offset[F.degree_of(j)]); k < j; ++k)
            if (coin(rng)) z2_add_into(cols[j], cols[k], scratch);
    G.matrix = SparseZ2(static_cast<index_t>(F.size()));
    for (auto& c : cols) G.matrix.push_col(c);
    return G;
}

// does the barcode agree with the sublevel ranks at every value and between values
inline bool barcode_matches_betti(const FilteredBoundaryMatrix& F, const Barcode& B) {
    std::vector<double> ts(F.values.begin(), F.values.end());
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    std::vector<double> probes;
    for (size_t i = 0; i < ts.size(); ++i) {
        probes.push_back(ts[i]);
        probes.push_back(i + 1 < ts.size() ? 0.5 * (ts[i] + ts[i + 1]) : ts[i] + 1);
    }
    for (double t : probes) {
        auto betti = sublevel_betti(F, t);
        auto alive = B.alive_at(t);
        for (auto& [k, r] : betti) {
            long a = alive.count(k) ? alive[k] : 0;
            if (a != r) return false;
        }
        for (auto& [k, r] : alive)
            if (r != 0 && (!betti.count(k) || betti[k] != r)) return false;
    }
    return true;
}

inline Barcode random_barcode(std::mt19937& rng, int bars, int degrees = 2) {
    std::uniform_real_distribution<double> u(0, 10);
    std::uniform_int_distribution<int> dg(0, degrees - 1);
    Barcode b;
    for (int i = 0; i < bars; ++i) {
        double x = u(rng), y = u(rng);
        if (x == y) continue;
        b.bars.push_back({dg(rng), std::min(x, y), std::max(x, y), 1});
    }
    b.normalize();
    return b;
}

inline RunConfig tent_config(double a, int m) {
    RunConfig c;
    PieceSpec p;
    p.T = 2 * std::numbers::pi * 1e-4;
    p.support = 0.5;
    p.center = {-a, 0};
    c.pieces.push_back(p);
    p.center = {a, 0};
    c.pieces.push_back(p);
    c.mesh = m;
    return c;
}

inline RunConfig identity_config(int m) {
    RunConfig c;
    PieceSpec p;
    p.kind = "zero";
    p.support = 0.125;
    p.deriv_bound = 2 * std::numbers::pi * 1e-4;
    c.pieces = {p, p};
    c.mesh = m;
    return c;
}

} // namespace gfb::testing
