#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "cubical.hpp"
#include "errors.hpp"
#include "filtration.hpp"
#include "gfqi.hpp"
#include "io.hpp"
#include "persistence.hpp"
#include "radial.hpp"

namespace gfb {

struct PieceSpec {
    std::string kind = "tent"; // tent | knots | zero
    double T = 0;
    double support = 0.5;
    point2 center{0, 0};
    double fillet = 0;
    std::vector<std::array<double, 3>> knots; // rows (s, h, h')
    double deriv_bound = 0;
    double second_deriv_bound = 0;
};

struct RunConfig {
    std::vector<PieceSpec> pieces;
    int mesh = 4;
    double inverse_tolerance = 0; // 0 selects (1/m)^4
    int n = 1;
    double memory_cap = 6e7;
    std::string barcode_out, plot_out, report_out;
    std::string reference_barcode;
    int threads = 1;
};

inline RadialProfile make_profile(const PieceSpec& p) {
    RadialProfile prof;
    if (p.kind == "tent")
        prof = RadialProfile::tent(p.T, p.support, p.center, p.fillet);
    else if (p.kind == "zero")
        prof = RadialProfile::zero(p.center, p.support);
    else if (p.kind == "knots") {
        std::vector<double> s, h, d;
        for (auto& r : p.knots) {
            s.push_back(r[0]);
            h.push_back(r[1]);
            d.push_back(r[2]);
        }
        prof = RadialProfile::from_hermite(s, h, d, p.center);
    } else
        throw ConfigInvalid("unknown piece kind '" + p.kind + "'");
    prof.finalize_bounds(p.deriv_bound, p.second_deriv_bound);
    prof.validate();
    return prof;
}

inline RunConfig parse_config(const json& j, const std::string& base_dir = "") {
    RunConfig c;
    auto resolve = [&](const std::string& p) {
        if (p.empty() || base_dir.empty() || std::filesystem::path(p).is_absolute()) return p;
        return (std::filesystem::path(base_dir) / p).string();
    };
    try {
        for (auto& pj : j.at("pieces")) {
            PieceSpec p;
            p.kind = pj.value("kind", std::string("tent"));
            p.T = pj.value("T", 0.0);
            p.support = pj.value("support", 0.5);
            if (pj.contains("center")) p.center = {pj["center"].at(0).get<double>(), pj["center"].at(1).get<double>()};
            p.fillet = pj.value("fillet", 0.0);
            if (pj.contains("knots"))
                for (auto& r : pj["knots"]) p.knots.push_back({r.at(0).get<double>(), r.at(1).get<double>(), r.at(2).get<double>()});
            p.deriv_bound = pj.value("deriv_bound", 0.0);
            p.second_deriv_bound = pj.value("second_deriv_bound", 0.0);
            c.pieces.push_back(p);
        }
        c.mesh = j.value("mesh", 4);
        if (j.contains("inverse_tolerance") && !j["inverse_tolerance"].is_null())
            c.inverse_tolerance = j["inverse_tolerance"].get<double>();
        c.n = j.value("n", 1);
        c.memory_cap = j.value("memory_cap", 6e7);
        if (j.contains("outputs")) {
            auto& o = j["outputs"];
            c.barcode_out = resolve(o.value("barcode", std::string()));
            c.plot_out = resolve(o.value("plot", std::string()));
            c.report_out = resolve(o.value("report", std::string()));
        }
        if (j.contains("reference_barcode") && !j["reference_barcode"].is_null())
            c.reference_barcode = resolve(j["reference_barcode"].get<std::string>());
    } catch (const json::exception& e) {
        throw ConfigInvalid(e.what());
    }
    if (c.pieces.size() < 2) throw ConfigInvalid("need at least two pieces");
    if (c.mesh < 1) throw ConfigInvalid("mesh must be >= 1");
    if (c.n != 1) throw ConfigInvalid("the radial front end handles n = 1 only");
    if (c.inverse_tolerance < 0) throw ConfigInvalid("inverse_tolerance must be positive");
    return c;
}

inline RunConfig load_config(const std::string& path) {
    auto dir = std::filesystem::path(path).parent_path().string();
    return parse_config(read_json(path), dir);
}

struct PipelineResult {
    Barcode barcode;
    double error_budget = 0;
    std::optional<double> reference_distance;
    json report;
};

namespace detail {
struct Stopwatch {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double lap() {
        auto t = std::chrono::steady_clock::now();
        double s = std::chrono::duration<double>(t - t0).count();
        t0 = t;
        return s;
    }
};
} // namespace detail

inline PipelineResult run_pipeline(const RunConfig& cfg, std::ostream* log = nullptr) {
    PipelineResult out;
    json& rep = out.report;
    json timings;
    detail::Stopwatch sw;
    auto say = [&](const std::string& s) {
        if (log) *log << s << std::endl;
    };
    const int m = cfg.mesh;
    const double E = cfg.inverse_tolerance > 0 ? cfg.inverse_tolerance : default_inverse_tolerance(m);

    std::vector<RadialProfile> profiles;
    double T = 0, R = 0;
    try {
        for (auto& p : cfg.pieces) profiles.push_back(make_profile(p));
    } catch (const Error& e) {
        rethrow_in_stage(e, "config");
    }
    for (size_t j = 0; j < profiles.size(); ++j) {
        auto b = c0_c1_bounds(profiles[j]);
        if (!(b.c1_bound < 0.5))
            throw ConfigInvalid("piece " + std::to_string(j) + " violates the c1 < 1/2 existence condition (" +
                                std::to_string(b.c1_bound) + ")");
        T = std::max(T, b.c0_bound);
        R = std::max(R, profiles[j].center_norm() + profiles[j].support_radius());
    }

    std::vector<GenFunSample> samples;
    std::vector<double> sup_errors;
    try {
        for (auto& p : profiles) {
            samples.push_back(sample_generating_function(p, m, E, cfg.threads));
            sup_errors.push_back(samples.back().sup_error);
        }
    } catch (const Error& e) {
        rethrow_in_stage(e, "sample");
    }
    timings["sample"] = sw.lap();

    GfqiSpec g;
    try {
        g = derive_radii(std::move(samples), cfg.n, static_cast<int>(profiles.size()), T, R);
    } catch (const Error& e) {
        rethrow_in_stage(e, "compose");
    }
    say("radii: Rf=" + std::to_string(g.Rf) + " Rb=" + std::to_string(g.Rb));

    double predicted = predicted_cell_count(g.Rb, g.Rf, m, g.n, g.fiber_dim);
    rep["predicted_cells"] = predicted;
    if (predicted > cfg.memory_cap)
        throw MemoryCap("predicted " + std::to_string(static_cast<long long>(predicted)) + " cells exceed the cap of " +
                        std::to_string(static_cast<long long>(cfg.memory_cap)));

    BasePair X;
    FiberPair Y;
    BlockBoundary K;
    try {
        X = build_base_pair(g.Rb, m, g.n);
        Y = build_fiber_pair(g.Rf, m, g.fiber_dim, g.quad_index);
        K = product_boundaries(X, Y);
    } catch (const Error& e) {
        rethrow_in_stage(e, "complex");
    }
    timings["complex"] = sw.lap();
    say("cells: " + std::to_string(K.total()));

    FilteredBoundaryMatrix F;
    try {
        F = filter_complex(g, K, {cfg.threads});
    } catch (const Error& e) {
        rethrow_in_stage(e, "filtration");
    }
    timings["filtration"] = sw.lap();

    ReductionResult red;
    try {
        red = reduce(F, {.twist = true, .record_ops = false, .keep_reduced = false});
    } catch (const Error& e) {
        rethrow_in_stage(e, "reduction");
    }
    out.barcode = extract_barcode(red, F);
    timings["reduction"] = sw.lap();

    out.error_budget = error_budget(g, m, sup_errors);

    rep["mesh"] = m;
    rep["inverse_tolerance"] = E;
    rep["n"] = g.n;
    rep["N"] = g.N;
    rep["T"] = g.T;
    rep["R"] = g.R;
    rep["M"] = g.M;
    rep["C0"] = g.C0;
    rep["Rf_minus"] = g.Rf_minus;
    rep["Rf_plus"] = g.Rf_plus;
    rep["Rf"] = g.Rf;
    rep["Rb"] = g.Rb;
    rep["fiber_dim"] = g.fiber_dim;
    rep["quad_index"] = g.quad_index;
    rep["min_Sj"] = g.min_Sj;
    rep["sup_errors"] = sup_errors;
    rep["gradient_bound"] = gradient_bound(g);
    rep["error_budget"] = out.error_budget;
    json counts;
    for (int k = 0; k <= X.top(); ++k) counts["base"].push_back(X.count(k));
    for (int k = 0; k <= Y.top(); ++k) counts["fiber"].push_back(Y.count(k));
    for (int j = 0; j <= K.top(); ++j) counts["product"].push_back(K.count(j));
    counts["total"] = K.total();
    rep["cells"] = counts;
    rep["pairs"] = red.pairs.size();
    rep["barcode"] = barcode_to_json(out.barcode);
    {
        Barcode agg;
        for (auto b : out.barcode.bars) {
            b.degree = 0;
            agg.bars.push_back(b);
        }
        agg.normalize();
        json a = json::array();
        for (auto& b : agg.bars) {
            json r = {{"birth", b.birth}, {"multiplicity", b.multiplicity}};
            if (!b.infinite()) r["death"] = b.death;
            a.push_back(r);
        }
        rep["aggregated_barcode"] = a;
    }
    if (!cfg.reference_barcode.empty()) {
        Barcode ref = read_barcode(cfg.reference_barcode);
        double d = bottleneck(out.barcode, ref);
        out.reference_distance = d;
        rep["reference_distance"] = d;
        rep["within_budget"] = d <= out.error_budget;
    }
    rep["timings"] = timings;

    if (!cfg.barcode_out.empty()) write_barcode(cfg.barcode_out, out.barcode);
    if (!cfg.plot_out.empty()) plot_barcode(out.barcode, cfg.plot_out);
    if (!cfg.report_out.empty()) write_file(cfg.report_out, rep.dump(2) + "\n");
    return out;
}

} // namespace gfb
