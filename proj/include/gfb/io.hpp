#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "errors.hpp"
#include "persistence.hpp"

namespace gfb {

using json = nlohmann::json;

inline json barcode_to_json(Barcode b) {
    b.normalize();
    json arr = json::array();
    for (auto& bar : b.bars) {
        json r;
        r["degree"] = bar.degree;
        r["birth"] = bar.birth;
        if (!bar.infinite()) r["death"] = bar.death;
        r["multiplicity"] = bar.multiplicity;
        arr.push_back(r);
    }
    return arr;
}

inline Barcode barcode_from_json(const json& j) {
    if (!j.is_array()) throw IoError("barcode file must hold a JSON array");
    Barcode b;
    for (auto& r : j) {
        Bar bar;
        bar.degree = r.at("degree").get<int>();
        bar.birth = r.at("birth").get<double>();
        bar.death = r.contains("death") && !r["death"].is_null() ? r["death"].get<double>() : inf;
        bar.multiplicity = r.value("multiplicity", 1L);
        if (!(bar.birth < bar.death)) throw IoError("bar with birth >= death");
        b.bars.push_back(bar);
    }
    b.normalize();
    return b;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << text;
    if (!out) throw IoError("write failed for " + path);
}

inline json read_json(const std::string& path) {
    try {
        return json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw IoError(path + ": " + e.what());
    }
}

inline Barcode read_barcode(const std::string& path) { return barcode_from_json(read_json(path)); }

inline void write_barcode(const std::string& path, const Barcode& b) {
    write_file(path, barcode_to_json(b).dump(2) + "\n");
}

struct PlotOptions {
    // value range mapped to the plot width; taken from the bars when lo >= hi
    double lo = 0, hi = 0;
    int width = 640;
    int row = 14;
};

namespace detail {
inline std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}
} // namespace detail

inline std::string barcode_svg(Barcode b, PlotOptions opt = {}) {
    b.normalize();
    double lo = opt.lo, hi = opt.hi;
    if (!(lo < hi)) {
        bool any = false;
        for (auto& bar : b.bars) {
            double top = bar.infinite() ? bar.birth : bar.death;
            lo = any ? std::min(lo, bar.birth) : bar.birth;
            hi = any ? std::max(hi, top) : top;
            any = true;
        }
        if (!any) lo = 0, hi = 1;
        if (!(lo < hi)) hi = lo + 1;
    }
    const double left = 60, right = 30, top = 20;
    const double span = opt.width - left - right;
    auto X = [&](double v) { return left + (v - lo) / (hi - lo) * span; };
    size_t rows = 0;
    int groups = 0;
    int last = std::numeric_limits<int>::min();
    for (auto& bar : b.bars) {
        if (bar.degree != last) ++groups, last = bar.degree;
        rows += bar.multiplicity;
    }
    double height = top + rows * opt.row + groups * 16 + 40;
    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opt.width << "\" height=\""
      << detail::fmt("%.0f", height) << "\">\n";
    s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    double y = top;
    last = std::numeric_limits<int>::min();
    for (auto& bar : b.bars) {
        if (bar.degree != last) {
            last = bar.degree;
            y += 16;
            s << "<text x=\"4\" y=\"" << detail::fmt("%.1f", y - 4) << "\" font-size=\"11\">H" << bar.degree
              << "</text>\n";
        }
        for (long r = 0; r < bar.multiplicity; ++r) {
            double x0 = X(bar.birth);
            double yy = y + opt.row / 2.0;
            if (bar.infinite()) {
                double x1 = left + span + right / 2;
                s << "<line class=\"bar inf\" x1=\"" << detail::fmt("%.3f", x0) << "\" y1=\"" << detail::fmt("%.1f", yy)
                  << "\" x2=\"" << detail::fmt("%.3f", x1 - 6) << "\" y2=\"" << detail::fmt("%.1f", yy)
                  << "\" stroke=\"black\" stroke-width=\"2\"/>\n";
                s << "<polygon points=\"" << detail::fmt("%.3f", x1) << "," << detail::fmt("%.1f", yy) << " "
                  << detail::fmt("%.3f", x1 - 7) << "," << detail::fmt("%.1f", yy - 4) << " "
                  << detail::fmt("%.3f", x1 - 7) << "," << detail::fmt("%.1f", yy + 4) << "\"/>\n";
            } else {
                s << "<line class=\"bar\" x1=\"" << detail::fmt("%.3f", x0) << "\" y1=\"" << detail::fmt("%.1f", yy)
                  << "\" x2=\"" << detail::fmt("%.3f", X(bar.death)) << "\" y2=\"" << detail::fmt("%.1f", yy)
                  << "\" stroke=\"black\" stroke-width=\"2\"/>\n";
            }
            y += opt.row;
        }
    }
    double ay = y + 14;
    s << "<line class=\"axis\" x1=\"" << detail::fmt("%.3f", left) << "\" y1=\"" << detail::fmt("%.1f", ay)
      << "\" x2=\"" << detail::fmt("%.3f", left + span) << "\" y2=\"" << detail::fmt("%.1f", ay)
      << "\" stroke=\"gray\"/>\n";
    s << "<text x=\"" << detail::fmt("%.3f", left) << "\" y=\"" << detail::fmt("%.1f", ay + 14)
      << "\" font-size=\"10\" text-anchor=\"middle\">" << detail::fmt("%.6g", lo) << "</text>\n";
    s << "<text x=\"" << detail::fmt("%.3f", left + span) << "\" y=\"" << detail::fmt("%.1f", ay + 14)
      << "\" font-size=\"10\" text-anchor=\"middle\">" << detail::fmt("%.6g", hi) << "</text>\n";
    s << "</svg>\n";
    return s.str();
}

inline void plot_barcode(const Barcode& b, const std::string& path, PlotOptions opt = {}) {
    write_file(path, barcode_svg(b, opt));
}

} // namespace gfb
