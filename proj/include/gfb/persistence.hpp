#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <vector>

#include "errors.hpp"
#include "filtration.hpp"
#include "gfqi.hpp"
#include "z2.hpp"

namespace gfb {

constexpr double inf = std::numeric_limits<double>::infinity();

struct Bar {
    int degree = 0;
    double birth = 0;
    double death = inf;
    long multiplicity = 1;

    bool infinite() const { return std::isinf(death); }
    double length() const { return death - birth; }
    bool operator==(const Bar&) const = default;
};

struct Barcode {
    std::vector<Bar> bars;

    // sorted by (degree, birth, death), equal bars merged
    void normalize() {
        std::sort(bars.begin(), bars.end(), [](const Bar& a, const Bar& b) {
            if (a.degree != b.degree) return a.degree < b.degree;
            if (a.birth != b.birth) return a.birth < b.birth;
            return a.death < b.death;
        });
        std::vector<Bar> out;
        for (const Bar& b : bars) {
            if (b.multiplicity <= 0) continue;
            if (!out.empty() && out.back().degree == b.degree && out.back().birth == b.birth &&
                out.back().death == b.death)
                out.back().multiplicity += b.multiplicity;
            else
                out.push_back(b);
        }
        bars.swap(out);
    }

    long count(bool infinite_bars) const {
        long c = 0;
        for (auto& b : bars)
            if (b.infinite() == infinite_bars) c += b.multiplicity;
        return c;
    }

    long count_in_degree(int degree, bool infinite_bars) const {
        long c = 0;
        for (auto& b : bars)
            if (b.degree == degree && b.infinite() == infinite_bars) c += b.multiplicity;
        return c;
    }

    // bars alive at t, i.e. birth < t <= death
    std::map<int, long> alive_at(double t) const {
        std::map<int, long> out;
        for (auto& b : bars)
            if (b.birth < t && t <= b.death) out[b.degree] += b.multiplicity;
        return out;
    }

    Barcode without_shorter_than(double len) const {
        Barcode out;
        for (auto& b : bars)
            if (b.infinite() || b.length() >= len) out.bars.push_back(b);
        return out;
    }

    bool operator==(const Barcode&) const = default;
};

struct ReduceOptions {
    bool twist = false;       // clear columns paired from the degree above, reducing top-down
    bool record_ops = false;  // keep T with R = D T (standard order only)
    bool keep_reduced = true; // materialize R as a matrix
};

struct ReductionResult {
    SparseZ2 reduced;
    SparseZ2 ops;
    bool has_reduced = false;
    bool has_ops = false;
    std::vector<std::pair<index_t, index_t>> pairs; // (pivot row i, column j), sorted by j
    std::vector<index_t> unpaired;                  // zero columns that are no pivot

    std::map<index_t, index_t> pairing() const {
        std::map<index_t, index_t> m;
        for (auto [i, j] : pairs) m[j] = i;
        return m;
    }
};

namespace detail {

// reduced columns live either in the input matrix or in an append-only pool
struct ColumnStore {
    const SparseZ2* input;
    std::vector<index_t> pool;
    std::vector<uint64_t> start;
    std::vector<uint32_t> len;
    std::vector<char> in_pool;

    explicit ColumnStore(const SparseZ2& m) : input(&m), start(m.cols(), 0), len(m.cols(), 0), in_pool(m.cols(), 0) {}

    std::span<const index_t> get(index_t j) const {
        if (!in_pool[j]) return input->col(j);
        return {pool.data() + start[j], pool.data() + start[j] + len[j]};
    }

    void put(index_t j, const std::vector<index_t>& col) {
        in_pool[j] = 1;
        start[j] = pool.size();
        len[j] = static_cast<uint32_t>(col.size());
        pool.insert(pool.end(), col.begin(), col.end());
    }

    void clear(index_t j) {
        in_pool[j] = 1;
        len[j] = 0;
    }
};

} // namespace detail

// degree_offset is needed for the top-down twist order only
inline ReductionResult reduce_matrix(const SparseZ2& D, ReduceOptions opt = {},
                                     const std::vector<size_t>* degree_offset = nullptr) {
    const index_t n = D.cols();
    if (opt.twist && !degree_offset) throw InternalError("twist order needs the degree blocks");
    if (opt.twist && opt.record_ops) throw InternalError("operation recording needs the standard order");
    constexpr index_t none = index_t(-1);
    std::vector<index_t> owner(std::max(n, D.rows()), none); // pivot row -> column
    detail::ColumnStore R(D);
    std::vector<std::vector<index_t>> T;
    if (opt.record_ops) T.resize(n);
    std::vector<char> cleared(std::max(n, D.rows()), 0);
    std::vector<index_t> work, scratch, tw;

    auto reduce_column = [&](index_t j) {
        auto c0 = D.col(j);
        if (opt.record_ops) T[j] = {j};
        if (c0.empty()) return;
        bool changed = false;
        work.assign(c0.begin(), c0.end());
        while (!work.empty()) {
            index_t p = work.back();
            index_t o = owner[p];
            if (o == none) break;
            z2_add_into(work, R.get(o), scratch);
            if (opt.record_ops) {
                tw = T[j];
                z2_add_into(tw, T[o], scratch);
                T[j].swap(tw);
            }
            changed = true;
        }
        if (work.empty()) {
            R.clear(j);
            return;
        }
        owner[work.back()] = j;
        if (changed) R.put(j, work);
    };

    if (opt.twist) {
        const auto& off = *degree_offset;
        for (int k = static_cast<int>(off.size()) - 2; k >= 1; --k) {
            for (size_t j = off[k]; j < off[k + 1]; ++j) {
                if (cleared[j]) {
                    R.clear(static_cast<index_t>(j));
                    continue;
                }
                reduce_column(static_cast<index_t>(j));
                if (!R.get(static_cast<index_t>(j)).empty()) cleared[R.get(static_cast<index_t>(j)).back()] = 1;
            }
        }
    } else {
        for (index_t j = 0; j < n; ++j) reduce_column(j);
    }

    ReductionResult out;
    for (index_t j = 0; j < n; ++j) {
        auto c = R.get(j);
        if (!c.empty()) out.pairs.push_back({c.back(), j});
    }
    for (index_t j = 0; j < n; ++j)
        if (R.get(j).empty() && owner[j] == none) out.unpaired.push_back(j);
    for (index_t j = n; j < D.rows(); ++j)
        if (owner[j] == none) out.unpaired.push_back(j);
    if (opt.keep_reduced) {
        out.reduced = SparseZ2(D.rows());
        for (index_t j = 0; j < n; ++j) out.reduced.push_sorted_col(R.get(j));
        out.has_reduced = true;
    }
    if (opt.record_ops) {
        out.ops = SparseZ2(n);
        for (index_t j = 0; j < n; ++j) out.ops.push_col(T[j]);
        out.has_ops = true;
    }
    return out;
}

inline ReductionResult reduce(const FilteredBoundaryMatrix& F, ReduceOptions opt = {}) {
    return reduce_matrix(F.matrix, opt, &F.degree_offset);
}

inline Barcode extract_barcode(const ReductionResult& red, const FilteredBoundaryMatrix& F) {
    Barcode B;
    for (auto [i, j] : red.pairs)
        if (F.values[i] < F.values[j])
            B.bars.push_back({F.degree_of(i) - F.index_shift, F.values[i], F.values[j], 1});
    for (index_t i : red.unpaired) B.bars.push_back({F.degree_of(i) - F.index_shift, F.values[i], inf, 1});
    B.normalize();
    return B;
}

namespace detail {

// is there a matching covering every required left vertex; Hopcroft-Karp on the required ones
inline bool saturates(size_t nl, size_t nr, const std::vector<char>& required,
                      const std::vector<std::vector<uint32_t>>& adj) {
    constexpr uint32_t free_ = uint32_t(-1);
    std::vector<uint32_t> ml(nl, free_), mr(nr, free_), dist(nl);
    std::vector<uint32_t> queue;
    auto bfs = [&] {
        queue.clear();
        bool found = false;
        for (uint32_t u = 0; u < nl; ++u) {
            if (required[u] && ml[u] == free_) {
                dist[u] = 0;
                queue.push_back(u);
            } else
                dist[u] = free_;
        }
        for (size_t h = 0; h < queue.size(); ++h) {
            uint32_t u = queue[h];
            for (uint32_t v : adj[u]) {
                uint32_t w = mr[v];
                if (w == free_)
                    found = true;
                else if (dist[w] == free_) {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        return found;
    };
    std::function<bool(uint32_t)> dfs = [&](uint32_t u) {
        for (uint32_t v : adj[u]) {
            uint32_t w = mr[v];
            if (w == free_ || (dist[w] == dist[u] + 1 && dfs(w))) {
                ml[u] = v;
                mr[v] = u;
                return true;
            }
        }
        dist[u] = free_;
        return false;
    };
    while (bfs())
        for (uint32_t u = 0; u < nl; ++u)
            if (required[u] && ml[u] == free_) dfs(u);
    for (uint32_t u = 0; u < nl; ++u)
        if (required[u] && ml[u] == free_) return false;
    return true;
}

inline double pair_cost(const Bar& a, const Bar& b) {
    return std::max(std::abs(a.birth - b.birth), std::abs(a.death - b.death));
}

inline double finite_bottleneck(const std::vector<Bar>& A, const std::vector<Bar>& B) {
    std::vector<double> cand{0.0};
    for (auto& a : A) cand.push_back(a.length() / 2);
    for (auto& b : B) cand.push_back(b.length() / 2);
    for (auto& a : A)
        for (auto& b : B) cand.push_back(pair_cost(a, b));
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
    // a partial matching works iff the undeletable bars on each side can be saturated
    auto feasible = [&](double d) {
        std::vector<std::vector<uint32_t>> ab(A.size()), ba(B.size());
        for (uint32_t i = 0; i < A.size(); ++i)
            for (uint32_t j = 0; j < B.size(); ++j)
                if (pair_cost(A[i], B[j]) <= d) {
                    ab[i].push_back(j);
                    ba[j].push_back(i);
                }
        std::vector<char> ra(A.size()), rb(B.size());
        for (size_t i = 0; i < A.size(); ++i) ra[i] = A[i].length() / 2 > d;
        for (size_t j = 0; j < B.size(); ++j) rb[j] = B[j].length() / 2 > d;
        return saturates(A.size(), B.size(), ra, ab) && saturates(B.size(), A.size(), rb, ba);
    };
    size_t lo = 0, hi = cand.size() - 1;
    while (lo < hi) {
        size_t mid = (lo + hi) / 2;
        if (feasible(cand[mid]))
            hi = mid;
        else
            lo = mid + 1;
    }
    return cand[lo];
}

} // namespace detail

inline double bottleneck(const Barcode& a, const Barcode& b) {
    std::map<int, std::vector<Bar>> fa, fb;
    std::map<int, std::vector<double>> ia, ib;
    auto split = [](const Barcode& x, auto& fin, auto& infs) {
        for (auto& bar : x.bars)
            for (long r = 0; r < bar.multiplicity; ++r) {
                if (bar.infinite())
                    infs[bar.degree].push_back(bar.birth);
                else
                    fin[bar.degree].push_back(bar);
            }
    };
    split(a, fa, ia);
    split(b, fb, ib);
    double d = 0;
    std::map<int, char> degrees;
    for (auto& [k, v] : ia) degrees[k] = 1;
    for (auto& [k, v] : ib) degrees[k] = 1;
    for (auto& [k, _] : degrees) {
        auto x = ia[k], y = ib[k];
        if (x.size() != y.size()) return inf;
        std::sort(x.begin(), x.end());
        std::sort(y.begin(), y.end());
        for (size_t i = 0; i < x.size(); ++i) d = std::max(d, std::abs(x[i] - y[i]));
    }
    degrees.clear();
    for (auto& [k, v] : fa) degrees[k] = 1;
    for (auto& [k, v] : fb) degrees[k] = 1;
    for (auto& [k, _] : degrees) d = std::max(d, detail::finite_bottleneck(fa[k], fb[k]));
    return d;
}

// l (d + r) with d = r = sqrt(2nN)/m, plus the sampling errors
inline double error_budget(const GfqiSpec& g, int m, const std::vector<double>& hj_errors) {
    double l = gradient_bound(g);
    double diam = std::sqrt(2.0 * g.n * g.N) / m;
    double s = l * 2 * diam;
    for (double e : hj_errors) s += e;
    return s;
}

// C1 N/m + C2 N sqrt(E) with C1 = 4RT^2/(1-T'), C2 = 2 sqrt(2R) T/(1-T')
inline double sampler_terms(double T, double Tp, double R, int N, int m, double E) {
    double c1 = 4 * R * T * T / (1 - Tp);
    double c2 = 2 * std::sqrt(2 * R) * T / (1 - Tp);
    return c1 * N / m + c2 * N * std::sqrt(E);
}

} // namespace gfb
