#pragma once

#include <string>
#include <vector>

namespace branchlap {

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    bool dashed = false;
};

/// Minimal SVG line plot (axes, optional log-scale y, legend). Non-positive
/// values are skipped in log mode.
void svg_line_plot(const std::string& path, const std::string& title, const std::string& xlabel,
                   const std::string& ylabel, bool log_y, const std::vector<PlotSeries>& series);

}  // namespace branchlap
