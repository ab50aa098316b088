#pragma once

#include <string>
#include <vector>

namespace omx {

struct PlotSeries {
    std::string label;
    std::vector<double> y;
};

// Minimal SVG line plot, one polyline per series. A convenience layer over
// the CSV output; the CSV stays the authoritative record.
std::string svg_line_plot(const std::vector<double>& x,
                          const std::vector<PlotSeries>& series,
                          const std::string& x_label, const std::string& y_label,
                          bool log_x = false);

} // namespace omx
