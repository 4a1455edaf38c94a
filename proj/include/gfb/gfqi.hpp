#pragma once

#include <array>
#include <cmath>
#include <span>
#include <vector>

#include "errors.hpp"
#include "parallel.hpp"
#include "radial.hpp"

namespace gfb {

constexpr int max_half_dim = 8;

// composed generating function with cutoff, plus its certified radii
struct GfqiSpec {
    std::vector<GenFunSample> pieces;
    int n = 1;
    int N = 2;
    double T = 0;
    double R = 0;
    int fiber_dim = 2;
    int quad_index = 1;
    double M = 0, C0 = 0, Rf_minus = 0, Rf_plus = 0, Rf = 0, Rb = 0;
    std::vector<double> min_Sj;

    int mesh() const { return pieces.front().mesh; }
    int base_dim() const { return 2 * n; }
};

inline double formula_M(int N, double T) {
    double s = N - 1;
    for (int j = 1; j <= N - 1; ++j) s += std::sqrt(double(j));
    return std::sqrt(2.0) * T * s;
}

inline GfqiSpec derive_radii(std::vector<GenFunSample> pieces, int n, int N, double T, double R) {
    if (!(T > 0)) throw InvalidBounds("T must be positive");
    if (!(R > 0)) throw InvalidBounds("R must be positive");
    if (N < 2) throw InvalidBounds("need at least two pieces");
    if (n < 1 || n > max_half_dim) throw InvalidBounds("unsupported base dimension");
    if (static_cast<int>(pieces.size()) != N) throw InvalidBounds("piece count differs from N");
    for (auto& p : pieces) {
        if (p.mesh != pieces.front().mesh) throw MeshMismatch("piece meshes differ");
        if (p.dim != 2 * n) throw MeshMismatch("piece dimension differs from 2n");
    }
    GfqiSpec g;
    g.n = n;
    g.N = N;
    g.T = T;
    g.R = R;
    g.fiber_dim = 2 * n * (N - 1);
    g.quad_index = n * (N - 1);
    g.M = formula_M(N, T);
    g.C0 = N * T * R;
    g.Rf_minus = g.C0 / g.M + g.M;
    g.Rf_plus = g.C0 / g.M + 2 * g.M;
    double sum_min = 0;
    for (auto& p : pieces) {
        double mn = p.min_value();
        if (!std::isfinite(mn)) mn = 0; // nothing stored, lookups are all zero
        g.min_Sj.push_back(mn);
        sum_min += mn;
    }
    if (sum_min > 0) throw InvalidBounds("sampled minima must be <= 0");
    g.Rf = std::sqrt(g.Rf_plus * g.Rf_plus - sum_min);
    g.Rb = std::sqrt(2.0 * n) * (R + T) + 2 * std::sqrt(double(n) * (N - 1)) * g.Rf_plus;
    g.pieces = std::move(pieces);
    return g;
}

// -sum |xi^-|^2 + sum |xi^+|^2, the first i fiber coordinates are the negative ones
inline double quadratic_form(const GfqiSpec& g, std::span<const int> fiber) {
    long long acc = 0;
    for (int a = 0; a < g.fiber_dim; ++a) {
        long long v = fiber[a];
        acc += a < g.quad_index ? -v * v : v * v;
    }
    double m = g.mesh();
    return double(acc) / (m * m);
}

inline double lattice_norm(std::span<const int> v, int m) {
    long long acc = 0;
    for (int x : v) acc += (long long)x * x;
    return std::sqrt(double(acc)) / m;
}

// sum_j S_j(q~_j, p~_{j-1}) on lattice keys
inline double sum_pieces(const GfqiSpec& g, std::span<const int> base, std::span<const int> fiber) {
    const int n = g.n, N = g.N, i = g.quad_index;
    std::array<int, 2 * max_half_dim> key;
    std::array<int, max_half_dim> suffix{}; // sum_{k>=j} (xi^-_k - xi^+_k)
    double sum = 0;
    for (int j = N; j >= 1; --j) {
        if (j <= N - 1)
            for (int a = 0; a < n; ++a)
                suffix[a] += fiber[(j - 1) * n + a] - fiber[i + (j - 1) * n + a];
        for (int a = 0; a < n; ++a) {
            key[a] = base[a] + suffix[a];
            int pv = base[n + a];
            if (j - 1 >= 1) pv += fiber[(j - 2) * n + a] + fiber[i + (j - 2) * n + a];
            key[n + a] = pv;
        }
        sum += g.pieces[j - 1].at(std::span<const int>(key.data(), 2 * n));
    }
    return sum;
}

inline double eval_s_prime(const GfqiSpec& g, std::span<const int> base, std::span<const int> fiber) {
    return sum_pieces(g, base, fiber) + quadratic_form(g, fiber);
}

inline double cutoff(const GfqiSpec& g, double r) {
    if (r <= g.Rf_minus) return 1.0;
    if (r >= g.Rf_plus) return 0.0;
    return (g.Rf_plus - r) / g.M;
}

inline double eval_gfqi(const GfqiSpec& g, std::span<const int> base, std::span<const int> fiber) {
    int m = g.mesh();
    double r = lattice_norm(fiber, m);
    double q = quadratic_form(g, fiber);
    if (r >= g.Rf_plus || lattice_norm(base, m) >= g.Rb) return q;
    double sp = sum_pieces(g, base, fiber) + q;
    if (r <= g.Rf_minus) return sp;
    double rho = cutoff(g, r);
    return rho * sp + (1 - rho) * q;
}

inline double constant_C(double R) {
    return R / 2 + std::sqrt(3.0) + std::pow(2.0, 0.75) * std::sqrt(5 + (1 + std::sqrt(2.0)) * R);
}

inline double gradient_bound(const GfqiSpec& g) {
    return constant_C(g.R) * g.T * std::pow(double(g.N), 1.5);
}

// lattice points of (1/m)Z^dim with r_lo <= |x| <= r_hi
inline std::vector<std::vector<int>> lattice_shell(int dim, int m, double r_lo, double r_hi) {
    std::vector<std::vector<int>> out;
    int L = static_cast<int>(std::ceil(r_hi * m));
    std::vector<int> x(dim, -L);
    double lo2 = r_lo * r_lo * m * m, hi2 = r_hi * r_hi * m * m;
    while (true) {
        long long s = 0;
        for (int v : x) s += (long long)v * v;
        if (s >= lo2 && s <= hi2) out.push_back(x);
        int a = dim - 1;
        while (a >= 0 && x[a] == L) x[a--] = -L;
        if (a < 0) break;
        ++x[a];
    }
    return out;
}

struct ShellAudit {
    size_t base_points = 0;
    size_t shell_points = 0;
    size_t checked = 0;
    size_t critical = 0; // discrete fiber gradient of the cut-off function below 2l/m
    double min_gfqi_grad = 1e300;
    // threshold 2|xi| - M - 2l/m applied to S' and to the cut-off function
    size_t sprime_below = 0;
    size_t gfqi_below_plain = 0;
    // the cut-off function with its rho' term max|S'-Q|/M included
    size_t gfqi_below = 0;
    size_t perturbation_above_bound = 0; // |D(S'-Q)| > M + 2l/m
    double min_sprime_margin = 1e300;
    double min_gfqi_margin = 1e300;
    double max_perturbation = 0;
};

// central differences in every fiber direction over the transition shell
inline ShellAudit audit_cutoff_shell(const GfqiSpec& g, int threads = 1) {
    ShellAudit out;
    const int m = g.mesh();
    const int d = g.fiber_dim;
    const double l = gradient_bound(g);
    const double slack = 2 * l / m;
    const double opnorm_inv = 2.0;
    auto shell = lattice_shell(d, m, g.Rf_minus, g.Rf_plus);
    auto bases = lattice_shell(g.base_dim(), m, 0.0, g.Rb);
    out.base_points = bases.size();
    out.shell_points = shell.size();
    struct Local {
        size_t checked = 0, cr = 0, sb = 0, gbp = 0, gb = 0, pb = 0;
        double mgg = 1e300, ms = 1e300, mg = 1e300, mp = 0;
    };
    std::vector<Local> acc(bases.size());
    parallel_for(bases.size(), threads, [&](size_t bi) {
        Local& lc = acc[bi];
        const auto& x = bases[bi];
        std::vector<int> xi(d);
        for (const auto& c : shell) {
            double r = lattice_norm(c, m);
            double gs2 = 0, gf2 = 0, gp2 = 0;
            double fmax = std::abs(sum_pieces(g, x, c));
            for (int a = 0; a < d; ++a) {
                xi = c;
                xi[a] = c[a] + 1;
                double fp = sum_pieces(g, x, xi), sp = fp + quadratic_form(g, xi), gp = eval_gfqi(g, x, xi);
                xi[a] = c[a] - 1;
                double fm = sum_pieces(g, x, xi), sm = fm + quadratic_form(g, xi), gm = eval_gfqi(g, x, xi);
                fmax = std::max({fmax, std::abs(fp), std::abs(fm)});
                double h2 = 2.0 / m;
                gs2 += std::pow((sp - sm) / h2, 2);
                gf2 += std::pow((gp - gm) / h2, 2);
                gp2 += std::pow((fp - fm) / h2, 2);
            }
            double base_thr = opnorm_inv * r - g.M - slack;
            double thr = base_thr - fmax / g.M;
            double gs = std::sqrt(gs2), gf = std::sqrt(gf2), gp = std::sqrt(gp2);
            ++lc.checked;
            if (gf < slack) ++lc.cr;
            lc.mgg = std::min(lc.mgg, gf);
            if (gs < base_thr) ++lc.sb;
            if (gf < base_thr) ++lc.gbp;
            if (gf < thr) ++lc.gb;
            if (gp > g.M + slack) ++lc.pb;
            lc.ms = std::min(lc.ms, gs - base_thr);
            lc.mg = std::min(lc.mg, gf - thr);
            lc.mp = std::max(lc.mp, gp);
        }
    });
    for (auto& lc : acc) {
        out.checked += lc.checked;
        out.critical += lc.cr;
        out.min_gfqi_grad = std::min(out.min_gfqi_grad, lc.mgg);
        out.sprime_below += lc.sb;
        out.gfqi_below_plain += lc.gbp;
        out.gfqi_below += lc.gb;
        out.perturbation_above_bound += lc.pb;
        out.min_sprime_margin = std::min(out.min_sprime_margin, lc.ms);
        out.min_gfqi_margin = std::min(out.min_gfqi_margin, lc.mg);
        out.max_perturbation = std::max(out.max_perturbation, lc.mp);
    }
    return out;
}

} // namespace gfb
