#pragma once

#include <string>
#include <vector>

namespace hpcli {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct Figure {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = false;
    bool log_y = false;
    std::vector<Series> series;
};

/// Standalone SVG line plot. Points that are not finite, or not positive on a
/// log axis, are dropped. Throws std::runtime_error when nothing is drawable.
std::string render_svg(const Figure& fig);

} // namespace hpcli
