#include "svgplot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "errors.hpp"

namespace spinmu {

namespace {

constexpr double kLogFloor = 1e-16;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

double tx(double v, double lo, double hi, double p0, double p1) {
    if (hi <= lo) return 0.5 * (p0 + p1);
    return p0 + (v - lo) / (hi - lo) * (p1 - p0);
}

}  // namespace

void write_svg_panels(const std::string& path, const std::vector<Panel>& panels, int width,
                      int panel_height) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write SVG file: " + path);

    const int total_h = panel_height * static_cast<int>(panels.size());
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << total_h << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    out << "<rect width=\"" << width << "\" height=\"" << total_h << "\" fill=\"white\"/>\n";

    const double ml = 70, mr = 20, mt = 30, mb = 40;

    for (std::size_t pi = 0; pi < panels.size(); ++pi) {
        const Panel& panel = panels[pi];
        const double top = pi * panel_height;
        const double x0 = ml, x1 = width - mr;
        const double y0 = top + panel_height - mb, y1 = top + mt;

        double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo;
        double ylo = xlo, yhi = -xlo;
        for (const auto& s : panel.series) {
            for (double v : s.x) {
                if (!std::isfinite(v)) continue;
                xlo = std::min(xlo, v);
                xhi = std::max(xhi, v);
            }
            for (double v : s.y) {
                double w = panel.log_y ? std::log10(std::max(std::abs(v), kLogFloor)) : v;
                if (!std::isfinite(w)) continue;
                ylo = std::min(ylo, w);
                yhi = std::max(yhi, w);
            }
        }
        if (!std::isfinite(xlo)) { xlo = 0; xhi = 1; }
        if (!std::isfinite(ylo)) { ylo = 0; yhi = 1; }
        if (xhi <= xlo) xhi = xlo + 1;
        if (yhi <= ylo) yhi = ylo + 1;
        const double ypad = 0.05 * (yhi - ylo);
        ylo -= ypad;
        yhi += ypad;

        out << "<text x=\"" << (x0 + x1) / 2 << "\" y=\"" << top + 18
            << "\" text-anchor=\"middle\" font-size=\"13\">" << panel.title << "</text>\n";
        out << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x1 << "\" y2=\"" << y0
            << "\" stroke=\"black\"/>\n";
        out << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x0 << "\" y2=\"" << y1
            << "\" stroke=\"black\"/>\n";

        for (int k = 0; k <= 4; ++k) {
            const double fx = xlo + (xhi - xlo) * k / 4.0;
            const double px = tx(fx, xlo, xhi, x0, x1);
            out << "<line x1=\"" << px << "\" y1=\"" << y0 << "\" x2=\"" << px << "\" y2=\""
                << y0 + 4 << "\" stroke=\"black\"/>\n";
            out << "<text x=\"" << px << "\" y=\"" << y0 + 16 << "\" text-anchor=\"middle\">"
                << fmt(fx) << "</text>\n";

            const double fy = ylo + (yhi - ylo) * k / 4.0;
            const double py = tx(fy, ylo, yhi, y0, y1);
            out << "<line x1=\"" << x0 - 4 << "\" y1=\"" << py << "\" x2=\"" << x0 << "\" y2=\""
                << py << "\" stroke=\"black\"/>\n";
            out << "<text x=\"" << x0 - 6 << "\" y=\"" << py + 4 << "\" text-anchor=\"end\">"
                << (panel.log_y ? "1e" + fmt(fy) : fmt(fy)) << "</text>\n";
        }

        out << "<text x=\"" << (x0 + x1) / 2 << "\" y=\"" << y0 + 32
            << "\" text-anchor=\"middle\">" << panel.x_label << "</text>\n";
        out << "<text x=\"14\" y=\"" << (y0 + y1) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
            << (y0 + y1) / 2 << ")\">" << panel.y_label << "</text>\n";

        double legend_y = y1 + 6;
        for (const auto& s : panel.series) {
            out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.2\" points=\"";
            for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
                double yv = panel.log_y ? std::log10(std::max(std::abs(s.y[i]), kLogFloor)) : s.y[i];
                if (!std::isfinite(s.x[i]) || !std::isfinite(yv)) continue;
                out << fmt(tx(s.x[i], xlo, xhi, x0, x1)) << "," << fmt(tx(yv, ylo, yhi, y0, y1))
                    << " ";
            }
            out << "\"/>\n";
            out << "<line x1=\"" << x1 - 120 << "\" y1=\"" << legend_y << "\" x2=\"" << x1 - 100
                << "\" y2=\"" << legend_y << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/>\n";
            out << "<text x=\"" << x1 - 96 << "\" y=\"" << legend_y + 4 << "\">" << s.name
                << "</text>\n";
            legend_y += 14;
        }
    }
    out << "</svg>\n";
}

}  // namespace spinmu
