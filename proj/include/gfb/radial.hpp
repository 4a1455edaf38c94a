#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"
#include "parallel.hpp"

namespace gfb {

typedef std::array<double, 2> point2;

// H(x) = h(|x-c|^2/2) with h piecewise cubic on [0, r] and zero beyond
struct RadialProfile {
    std::vector<double> knots;               // 0 = s_0 < ... < s_K = r
    std::vector<std::array<double, 4>> coeffs; // h on [s_i, s_i+1] in u = s - s_i
    point2 center{0.0, 0.0};
    double support = 0.0;
    double deriv_bound = 0.0;
    double second_deriv_bound = 0.0;

    size_t interval(double s) const {
        auto it = std::upper_bound(knots.begin(), knots.end(), s);
        size_t i = it == knots.begin() ? 0 : static_cast<size_t>(it - knots.begin()) - 1;
        return std::min(i, coeffs.size() - 1);
    }

    double h(double s) const {
        if (s >= support || coeffs.empty()) return 0.0;
        size_t i = interval(s);
        const auto& a = coeffs[i];
        double u = s - knots[i];
        return a[0] + u * (a[1] + u * (a[2] + u * a[3]));
    }

    double dh(double s) const {
        if (s >= support || coeffs.empty()) return 0.0;
        size_t i = interval(s);
        const auto& a = coeffs[i];
        double u = s - knots[i];
        return a[1] + u * (2 * a[2] + u * 3 * a[3]);
    }

    double d2h(double s) const {
        if (s >= support || coeffs.empty()) return 0.0;
        size_t i = interval(s);
        const auto& a = coeffs[i];
        return 2 * a[2] + 6 * a[3] * (s - knots[i]);
    }

    double hamiltonian(const point2& x) const {
        double dx = x[0] - center[0], dy = x[1] - center[1];
        return h(0.5 * (dx * dx + dy * dy));
    }

    double center_norm() const { return std::hypot(center[0], center[1]); }
    double support_radius() const { return std::sqrt(2 * support); }

    // exact sup of |h'| and |h''| over the pieces
    std::pair<double, double> exact_bounds() const {
        double t1 = 0, t2 = 0;
        for (size_t i = 0; i < coeffs.size(); ++i) {
            const auto& a = coeffs[i];
            double len = knots[i + 1] - knots[i];
            auto d1 = [&](double u) { return a[1] + u * (2 * a[2] + u * 3 * a[3]); };
            auto d2 = [&](double u) { return 2 * a[2] + 6 * a[3] * u; };
            t1 = std::max({t1, std::abs(d1(0)), std::abs(d1(len))});
            if (a[3] != 0) {
                double u = -a[2] / (3 * a[3]);
                if (u > 0 && u < len) t1 = std::max(t1, std::abs(d1(u)));
            }
            t2 = std::max({t2, std::abs(d2(0)), std::abs(d2(len))});
        }
        return {t1, t2};
    }

    void validate() const {
        if (!(support > 0)) throw ConfigInvalid("profile support must be positive");
        if (knots.size() < 2 || coeffs.size() + 1 != knots.size())
            throw ConfigInvalid("profile needs K+1 knots for K pieces");
        if (knots.front() != 0.0) throw ConfigInvalid("first knot must be 0");
        if (std::abs(knots.back() - support) > 1e-15 * support)
            throw ConfigInvalid("last knot must equal the support parameter");
        for (size_t i = 0; i + 1 < knots.size(); ++i)
            if (!(knots[i] < knots[i + 1])) throw ConfigInvalid("knots must be strictly increasing");
        auto [t1, t2] = exact_bounds();
        double scale = std::max({1e-300, t1, std::abs(coeffs[0][0])});
        for (size_t i = 0; i < coeffs.size(); ++i) {
            const auto& a = coeffs[i];
            double u = knots[i + 1] - knots[i];
            double v = a[0] + u * (a[1] + u * (a[2] + u * a[3]));
            double d = a[1] + u * (2 * a[2] + u * 3 * a[3]);
            double nv = i + 1 < coeffs.size() ? coeffs[i + 1][0] : 0.0;
            double nd = i + 1 < coeffs.size() ? coeffs[i + 1][1] : 0.0;
            if (std::abs(v - nv) > 1e-12 * scale || std::abs(d - nd) > 1e-12 * std::max(t1, 1e-300))
                throw ConfigInvalid("profile is not C1 at knot " + std::to_string(knots[i + 1]));
        }
        if (deriv_bound < t1 * (1 - 1e-12) || second_deriv_bound < t2 * (1 - 1e-12))
            throw ConfigInvalid("declared derivative bounds are below the profile's sup");
    }

    void finalize_bounds(double declared_T = 0, double declared_T2 = 0) {
        auto [t1, t2] = exact_bounds();
        deriv_bound = std::max(t1, declared_T);
        second_deriv_bound = std::max(t2, declared_T2);
    }

    static RadialProfile zero(point2 c, double r, double declared_T = 0) {
        RadialProfile p;
        p.knots = {0.0, r};
        p.coeffs = {{0, 0, 0, 0}};
        p.center = c;
        p.support = r;
        p.finalize_bounds(declared_T, 0);
        return p;
    }

    // cubic Hermite pieces through (s_i, h_i, h'_i); the last node must be (r, 0, 0)
    static RadialProfile from_hermite(const std::vector<double>& s, const std::vector<double>& hv,
                                      const std::vector<double>& dv, point2 c) {
        if (s.size() < 2 || hv.size() != s.size() || dv.size() != s.size())
            throw ConfigInvalid("knot table needs at least two rows of (s, h, h')");
        RadialProfile p;
        p.knots = s;
        p.center = c;
        p.support = s.back();
        if (hv.back() != 0.0 || dv.back() != 0.0)
            throw ConfigInvalid("profile must vanish with its derivative at the support end");
        for (size_t i = 0; i + 1 < s.size(); ++i) {
            double L = s[i + 1] - s[i];
            if (!(L > 0)) throw ConfigInvalid("knots must be strictly increasing");
            double dh = hv[i + 1] - hv[i];
            double a2 = (3 * dh / L - 2 * dv[i] - dv[i + 1]) / L;
            double a3 = (dv[i] + dv[i + 1] - 2 * dh / L) / (L * L);
            p.coeffs.push_back({hv[i], dv[i], a2, a3});
        }
        p.finalize_bounds();
        return p;
    }

    // h' given piecewise as b0 + b1 u + b2 u^2; h is integrated back from h(r) = 0
    static RadialProfile from_derivative(const std::vector<double>& s,
                                         const std::vector<std::array<double, 3>>& b, point2 c) {
        RadialProfile p;
        p.knots = s;
        p.center = c;
        p.support = s.back();
        p.coeffs.resize(b.size());
        double right = 0.0;
        for (size_t i = b.size(); i-- > 0;) {
            double L = s[i + 1] - s[i];
            double integral = L * (b[i][0] + L * (b[i][1] / 2 + L * b[i][2] / 3));
            double left = right - integral;
            p.coeffs[i] = {left, b[i][0], b[i][1] / 2, b[i][2] / 3};
            right = left;
        }
        p.finalize_bounds();
        return p;
    }

    // h' = -T tau(s/r)/max tau, tau a triangle on [0,1] with optional parabolic fillets of width w
    static RadialProfile tent(double T, double r, point2 c, double w = 0.0) {
        if (!(r > 0)) throw ConfigInvalid("tent support must be positive");
        if (w < 0 || w >= 0.125) throw ConfigInvalid("tent fillet width must lie in [0, 1/8)");
        std::vector<double> sig;
        std::vector<std::array<double, 3>> tau;
        double tmax;
        if (w == 0) {
            sig = {0.0, 0.5, 1.0};
            tau = {{0, 2, 0}, {1, -2, 0}};
            tmax = 1.0;
        } else {
            double sp = 0.5 - w / 2;
            double a = 2 * (sp - w);
            sig = {0.0, sp - w, sp + w, 1 - 2 * w, 1.0};
            tau = {{0, 2, 0}, {a, 2, -1 / w}, {a, -2, 0}, {2 * w, -2, 1 / (2 * w)}};
            tmax = 1 - 2 * w;
        }
        std::vector<double> s(sig.size());
        std::vector<std::array<double, 3>> b(tau.size());
        for (size_t i = 0; i < sig.size(); ++i) s[i] = r * sig[i];
        s.back() = r;
        double k = T == 0 ? 0.0 : -T / tmax;
        for (size_t i = 0; i < tau.size(); ++i)
            b[i] = {k * tau[i][0], k * tau[i][1] / r, k * tau[i][2] / (r * r)};
        return from_derivative(s, b, c);
    }
};

// rotation of x about c by angle h'(|x-c|^2/2) t
inline point2 eval_flow(const RadialProfile& prof, double t, const point2& x) {
    double dx = x[0] - prof.center[0], dy = x[1] - prof.center[1];
    double s = 0.5 * (dx * dx + dy * dy);
    if (s >= prof.support) return x;
    double th = prof.dh(s) * t;
    if (th == 0.0) return x;
    double cs = std::cos(th), sn = std::sin(th);
    return {prof.center[0] + cs * dx - sn * dy, prof.center[1] + sn * dx + cs * dy};
}

struct FlowBounds {
    double c0_bound;
    double c1_bound;
};

inline FlowBounds c0_c1_bounds(const RadialProfile& p) {
    double sr = p.support_radius();
    return {sr * p.deriv_bound, sr * (p.center_norm() + sr) * p.second_deriv_bound + p.deriv_bound};
}

struct InverseSolveOptions {
    int max_iter = 100;
};

// q with Q^t(q, p) = Q, searched in [Q - rho, Q + rho], rho the C0 distance of the flow
inline double solve_inverse_q(const RadialProfile& prof, double t, double Q, double p, double E,
                              InverseSolveOptions opt = {}) {
    auto bounds = c0_c1_bounds(prof);
    if (!(bounds.c1_bound * t < 1)) throw InvalidBounds("flow map is not invertible in q (c1 >= 1)");
    if (!(E > 0)) throw InvalidBounds("inverse tolerance must be positive");
    auto g = [&](double q) { return eval_flow(prof, t, {q, p})[0] - Q; };
    double r0 = g(Q);
    if (r0 == 0.0) return Q;
    double rho = bounds.c0_bound * t * (1 + 1e-9) + 1e-12 * (1 + std::abs(Q));
    double lo = Q - rho, hi = Q + rho;
    double cx = prof.center[0], cy = prof.center[1];
    auto dg = [&](double q) {
        double dx = q - cx, dy = p - cy;
        double s = 0.5 * (dx * dx + dy * dy);
        if (s >= prof.support) return 1.0;
        double th = prof.dh(s) * t, dth = prof.d2h(s) * t * dx;
        double cs = std::cos(th), sn = std::sin(th);
        return cs - (sn * dx + cs * dy) * dth;
    };
    double q = Q, r = r0;
    double best_q = q, best_r = std::abs(r);
    for (int it = 0; it < opt.max_iter; ++it) {
        if (r < 0)
            lo = std::max(lo, q);
        else
            hi = std::min(hi, q);
        double d = dg(q);
        double qn = q - r / d;
        if (!(qn > lo && qn < hi) || !std::isfinite(qn)) qn = 0.5 * (lo + hi);
        if (qn == q) break;
        q = qn;
        r = g(q);
        if (std::abs(r) < best_r) {
            best_r = std::abs(r);
            best_q = q;
        }
        if (r == 0.0 || hi - lo <= 4 * std::numeric_limits<double>::epsilon() * (1 + std::abs(q)))
            break;
        if (best_r <= 1e-3 * std::sqrt(E) && best_r <= 1e-15 * (1 + std::abs(Q))) break;
    }
    if (best_r * best_r > E)
        throw NoConvergence("inverse solve residual " + std::to_string(best_r) + " exceeds sqrt(E)");
    return best_q;
}

// lattice-indexed sample over (1/m)Z^dim, zero away from the stored ball
struct GenFunSample {
    int mesh = 1;
    int dim = 2;
    std::vector<double> center;
    double support_radius = 0;
    double sup_error = 0;
    double inverse_tolerance = 0;
    // inputs to the error certificate
    double grad_bound = 0;
    double c1_bound = 0;

    std::vector<int> lo;    // box corner, lattice units
    std::vector<int> ext;   // box extent per axis
    std::vector<double> values;

    double stored_radius() const { return support_radius + 1.0 / mesh; }

    static double certificate(double G, double c1, int m, double E) {
        if (G == 0) return 0.0;
        return 2 * G * G / (1 - c1) / m + 2 * G / (1 - c1) * std::sqrt(E);
    }

    void init_box() {
        lo.assign(dim, 0);
        ext.assign(dim, 0);
        double rad = stored_radius();
        size_t total = 1;
        for (int a = 0; a < dim; ++a) {
            int l = static_cast<int>(std::floor((center[a] - rad) * mesh));
            int h = static_cast<int>(std::ceil((center[a] + rad) * mesh));
            lo[a] = l;
            ext[a] = h - l + 1;
            total *= ext[a];
        }
        values.assign(total, 0.0);
    }

    bool in_box(std::span<const int> key, size_t& lin) const {
        lin = 0;
        for (int a = 0; a < dim; ++a) {
            int k = key[a] - lo[a];
            if (k < 0 || k >= ext[a]) return false;
            lin = lin * ext[a] + k;
        }
        return true;
    }

    void key_of(size_t lin, std::vector<int>& key) const {
        key.resize(dim);
        for (int a = dim; a-- > 0;) {
            key[a] = lo[a] + static_cast<int>(lin % ext[a]);
            lin /= ext[a];
        }
    }

    bool stored(std::span<const int> key) const {
        size_t lin;
        if (!in_box(key, lin)) return false;
        double r2 = 0;
        for (int a = 0; a < dim; ++a) {
            double d = key[a] / double(mesh) - center[a];
            r2 += d * d;
        }
        double rad = stored_radius();
        return r2 <= rad * rad;
    }

    double at(std::span<const int> key) const {
        size_t lin;
        if (!in_box(key, lin)) return 0.0;
        return values[lin];
    }

    template <class F>
    void for_each_stored(F&& fn) const {
        std::vector<int> key;
        for (size_t i = 0; i < values.size(); ++i) {
            key_of(i, key);
            if (stored(key)) fn(std::span<const int>(key), values[i]);
        }
    }

    double min_value() const {
        double mn = std::numeric_limits<double>::infinity();
        for_each_stored([&](std::span<const int>, double v) { mn = std::min(mn, v); });
        return mn;
    }

    // fill from an arbitrary function of the real coordinates (used for synthetic pieces)
    template <class F>
    static GenFunSample from_function(int dim, int m, std::vector<double> c, double radius, F&& f) {
        GenFunSample g;
        g.dim = dim;
        g.mesh = m;
        g.center = std::move(c);
        g.support_radius = radius;
        g.init_box();
        std::vector<int> key;
        std::vector<double> x(dim);
        for (size_t i = 0; i < g.values.size(); ++i) {
            g.key_of(i, key);
            if (!g.stored(key)) continue;
            for (int a = 0; a < dim; ++a) x[a] = key[a] / double(m);
            g.values[i] = f(std::span<const double>(x));
        }
        return g;
    }
};

// (1/m) sum_k H(Q, P^{k/m}(q_k, p)), q_k the inverse solve at time k/m
inline double quadrature_value(const RadialProfile& prof, int m, double E, double Q, double p) {
    double sum = 0.0;
    for (int k = 1; k <= m; ++k) {
        double t = double(k) / m;
        double q = solve_inverse_q(prof, t, Q, p, E);
        point2 img = eval_flow(prof, t, {q, p});
        sum += prof.hamiltonian({Q, img[1]});
    }
    return sum / m;
}

inline double default_inverse_tolerance(int m) {
    double h = 1.0 / m;
    return h * h * h * h;
}

inline GenFunSample sample_generating_function(const RadialProfile& prof, int m, double E = 0,
                                               int threads = 1) {
    if (m < 1) throw ConfigInvalid("mesh must be >= 1");
    if (E <= 0) E = default_inverse_tolerance(m);
    auto bounds = c0_c1_bounds(prof);
    if (!(bounds.c1_bound < 0.5))
        throw InvalidBounds("c1 bound " + std::to_string(bounds.c1_bound) + " is not below 1/2");
    GenFunSample g;
    g.mesh = m;
    g.dim = 2;
    g.center = {prof.center[0], prof.center[1]};
    g.support_radius = prof.support_radius() + bounds.c0_bound;
    g.inverse_tolerance = E;
    g.grad_bound = prof.deriv_bound * prof.support_radius();
    g.c1_bound = bounds.c1_bound;
    g.sup_error = GenFunSample::certificate(g.grad_bound, g.c1_bound, m, E);
    g.init_box();
    double active = g.support_radius * (1 + 1e-12);
    parallel_for(g.values.size(), threads, [&](size_t i) {
        std::vector<int> key;
        g.key_of(i, key);
        if (!g.stored(key)) return;
        double Q = key[0] / double(m), p = key[1] / double(m);
        if (std::hypot(Q - g.center[0], p - g.center[1]) > active) return;
        try {
            g.values[i] = quadrature_value(prof, m, E, Q, p);
        } catch (const NoConvergence& e) {
            throw NoConvergence(std::string(e.message()) + " at lattice point (" +
                                std::to_string(key[0]) + ", " + std::to_string(key[1]) + ")/" +
                                std::to_string(m));
        }
    });
    return g;
}

} // namespace gfb
