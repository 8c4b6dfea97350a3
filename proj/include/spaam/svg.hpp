#pragma once

#include <string>
#include <utility>
#include <vector>

namespace spaam {

struct PlotSeries {
    std::string label;
    std::vector<std::pair<double, double>> points;
};

/// Self-contained SVG line chart with axes, ticks and a legend. Throws
/// InputError when no series has points.
std::string render_line_chart(const std::string& title, const std::string& x_label,
                              const std::string& y_label,
                              const std::vector<PlotSeries>& series);

}  // namespace spaam
