#pragma once

#include <string>
#include <vector>

namespace spinmu {

// Hand-rolled SVG line plots: CSV is the authoritative artifact, these are a
// quick visual check.
struct Series {
    std::string name;
    std::vector<double> x, y;
    std::string color = "#1f77b4";
};

struct Panel {
    std::string title;
    std::string x_label, y_label;
    std::vector<Series> series;
    bool log_y = false;  // log10 with a 1e-16 floor
};

void write_svg_panels(const std::string& path, const std::vector<Panel>& panels, int width = 860,
                      int panel_height = 300);

}  // namespace spinmu
