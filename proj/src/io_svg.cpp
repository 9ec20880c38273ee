#include "rumkit/io.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>

namespace rumkit {

namespace {

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string svg_open(double xmin, double ymin, double w, double h) {
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << fmt(xmin) << " "
       << fmt(ymin) << " " << fmt(w) << " " << fmt(h) << "\" width=\"640\" height=\"640\">\n";
    // flip the y axis so the math orientation is preserved
    os << "<g transform=\"scale(1,-1)\">\n";
    return os.str();
}

std::string svg_line(Vec2 a, Vec2 b, const std::string& color, double width) {
    std::ostringstream os;
    os << "<line x1=\"" << fmt(a.x) << "\" y1=\"" << fmt(a.y) << "\" x2=\"" << fmt(b.x)
       << "\" y2=\"" << fmt(b.y) << "\" stroke=\"" << color << "\" stroke-width=\""
       << fmt(width) << "\"/>\n";
    return os.str();
}

} // namespace

std::string figure_to_svg(const LineFigure& f, double extent) {
    std::ostringstream os;
    os << svg_open(-extent, -extent, 2 * extent, 2 * extent);
    std::size_t i = 0;
    for (const auto& line : f.lines()) {
        Vec2 d = line.direction();
        double t = extent / std::max(std::abs(d.x), std::abs(d.y));
        os << svg_line(-t * d, t * d, kPalette[i % 8], extent / 200.0);
        ++i;
    }
    os << "</g>\n</svg>\n";
    return os.str();
}

std::string reduced_figure_to_svg(const ReducedFigure& f) {
    std::ostringstream os;
    os << svg_open(-0.5, -0.5, 1.0, 1.0);
    os << "<rect x=\"-0.5\" y=\"-0.5\" width=\"1\" height=\"1\" fill=\"none\" "
          "stroke=\"#000000\" stroke-width=\"0.004\"/>\n";
    std::size_t i = 0;
    for (const auto& red : f.lines) {
        for (const auto& seg : red.segments) {
            os << svg_line(seg.a, seg.b, kPalette[i % 8], 0.002);
        }
        ++i;
    }
    os << "</g>\n</svg>\n";
    return os.str();
}

std::string tiling_to_svg(const Tiling& t) {
    double ext = 1.0;
    for (const auto& p : t.vertex_pos()) ext = std::max({ext, std::abs(p.x), std::abs(p.y)});
    std::ostringstream os;
    os << svg_open(-ext, -ext, 2 * ext, 2 * ext);
    // draw each edge once, colored by its grid family
    std::set<std::pair<int, int>> seen;
    for (const auto& tile : t.tiles()) {
        for (int e = 0; e < 4; ++e) {
            int a = tile.verts[e], b = tile.verts[(e + 1) % 4];
            auto key = std::minmax(a, b);
            if (!seen.insert({key.first, key.second}).second) continue;
            const auto& ka = t.vertex_k()[static_cast<std::size_t>(a)];
            const auto& kb = t.vertex_k()[static_cast<std::size_t>(b)];
            int fam = 0;
            for (std::size_t j = 0; j < ka.size(); ++j) {
                if (ka[j] != kb[j]) {
                    fam = static_cast<int>(j);
                    break;
                }
            }
            os << svg_line(t.vertex_pos()[static_cast<std::size_t>(a)],
                           t.vertex_pos()[static_cast<std::size_t>(b)], kPalette[fam % 8],
                           ext / 300.0);
        }
    }
    os << "</g>\n</svg>\n";
    return os.str();
}

void emit_svg(const std::string& path, const std::string& svg) {
    write_text_atomic(path, svg);
}

} // namespace rumkit
