#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include <gfb/pipeline.hpp>

using namespace gfb;

namespace {

int run_compute(const std::string& config, int mesh, const std::string& out, const std::string& svg,
                const std::string& reference, const std::string& report, int threads, double cap) {
    RunConfig cfg = load_config(config);
    if (mesh > 0) cfg.mesh = mesh;
    if (!out.empty()) cfg.barcode_out = out;
    if (!svg.empty()) cfg.plot_out = svg;
    if (!reference.empty()) cfg.reference_barcode = reference;
    if (!report.empty()) cfg.report_out = report;
    if (cap > 0) cfg.memory_cap = cap;
    cfg.threads = std::max(1, threads);

    auto res = run_pipeline(cfg, &std::cerr);
    if (cfg.barcode_out.empty()) std::cout << barcode_to_json(res.barcode).dump(2) << "\n";
    std::printf("error_budget %.17g\n", res.error_budget);
    if (res.reference_distance) {
        std::printf("bottleneck_to_reference %.17g\n", *res.reference_distance);
        if (*res.reference_distance > res.error_budget) {
            std::fprintf(stderr, "reference distance exceeds the error budget\n");
            return 4;
        }
    }
    return 0;
}

int run_sample(const std::string& config, int mesh, int piece, const std::string& out, int threads) {
    RunConfig cfg = load_config(config);
    if (mesh > 0) cfg.mesh = mesh;
    if (piece < 0 || piece >= static_cast<int>(cfg.pieces.size())) throw ConfigInvalid("no such piece");
    auto prof = make_profile(cfg.pieces[piece]);
    double E = cfg.inverse_tolerance > 0 ? cfg.inverse_tolerance : default_inverse_tolerance(cfg.mesh);
    auto s = sample_generating_function(prof, cfg.mesh, E, std::max(1, threads));
    json j;
    j["mesh"] = s.mesh;
    j["center"] = s.center;
    j["support_radius"] = s.support_radius;
    j["sup_error"] = s.sup_error;
    j["inverse_tolerance"] = s.inverse_tolerance;
    j["min_value"] = s.min_value();
    json pts = json::array();
    s.for_each_stored([&](std::span<const int> key, double v) { pts.push_back({key[0], key[1], v}); });
    j["values"] = pts;
    if (out.empty())
        std::cout << j.dump(2) << "\n";
    else
        write_file(out, j.dump(2) + "\n");
    return 0;
}

int run_reduce(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    auto trip = read_triplets(in);
    index_t n = 0;
    for (auto& t : trip) n = std::max<index_t>(n, std::max(t.row, t.col) + 1);
    std::vector<std::vector<index_t>> cols(n);
    for (auto& t : trip) cols[t.col].push_back(t.row);
    SparseZ2 D(n);
    for (auto& c : cols) D.push_col(c);
    auto red = reduce_matrix(D);
    for (auto [i, j] : red.pairs) std::printf("pair %u %u\n", i, j);
    for (index_t j : red.unpaired) std::printf("unpaired %u\n", j);
    return 0;
}

int run_bottleneck(const std::string& a, const std::string& b) {
    double d = bottleneck(read_barcode(a), read_barcode(b));
    std::printf("%.17g\n", d);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"generating-function barcodes of compositions of radial Hamiltonian maps"};
    app.require_subcommand(1);

    std::string config, out, svg, reference, report, matrix, file_a, file_b;
    int mesh = 0, threads = 1, piece = 0;
    double cap = 0;

    auto* compute = app.add_subcommand("compute", "run the full pipeline");
    compute->add_option("--config", config)->required();
    compute->add_option("--mesh", mesh);
    compute->add_option("--out", out);
    compute->add_option("--svg", svg);
    compute->add_option("--reference", reference);
    compute->add_option("--report", report);
    compute->add_option("--threads", threads);
    compute->add_option("--memory-cap", cap);

    auto* sample = app.add_subcommand("sample", "sample one generating function");
    sample->add_option("--config", config)->required();
    sample->add_option("--mesh", mesh);
    sample->add_option("--piece", piece);
    sample->add_option("--out", out);
    sample->add_option("--threads", threads);

    auto* red = app.add_subcommand("reduce", "reduce a triplet matrix over Z/2");
    red->add_option("--matrix", matrix)->required();

    auto* bn = app.add_subcommand("bottleneck", "bottleneck distance of two barcode files");
    bn->add_option("a", file_a)->required();
    bn->add_option("b", file_b)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*compute) return run_compute(config, mesh, out, svg, reference, report, threads, cap);
        if (*sample) return run_sample(config, mesh, piece, out, threads);
        if (*red) return run_reduce(matrix);
        if (*bn) return run_bottleneck(file_a, file_b);
    } catch (const Error& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return e.exit_code();
    } catch (const std::exception& e) {
        std::fprintf(stderr, "InternalError: %s\n", e.what());
        return 4;
    }
    return 0;
}
