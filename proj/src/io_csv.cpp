#include "rumkit/io.hpp"

#include <cstdio>
#include <sstream>

namespace rumkit {

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

std::string scan_to_csv(const SpectrumScan& scan) {
    std::ostringstream os;
    os << "gamma1,gamma2,sigma_min\n";
    const int r = scan.resolution();
    for (int i = 0; i < r; ++i) {
        for (int j = 0; j < r; ++j) {
            os << fmt(static_cast<double>(i) / r) << "," << fmt(static_cast<double>(j) / r)
               << "," << fmt(scan.at(i, j)) << "\n";
        }
    }
    return os.str();
}

void emit_scan_csv(const std::string& path, const SpectrumScan& scan) {
    write_text_atomic(path, scan_to_csv(scan));
}

std::string figure_to_csv(const LineFigure& f, const std::string& kind) {
    std::ostringstream os;
    os << "angle_rad,dir_x,dir_y,kind\n";
    for (const auto& line : f.lines()) {
        os << fmt(line.angle()) << "," << fmt(line.direction().x) << ","
           << fmt(line.direction().y) << "," << kind << "\n";
    }
    return os.str();
}

void emit_figure_csv(const std::string& path, const LineFigure& f, const std::string& kind) {
    write_text_atomic(path, figure_to_csv(f, kind));
}

} // namespace rumkit
