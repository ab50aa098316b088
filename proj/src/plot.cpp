#include "omx/plot.hpp"

#include "omx/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace omx {

namespace {

constexpr double width = 640.0;
constexpr double height = 420.0;
constexpr double margin_left = 72.0;
constexpr double margin_right = 24.0;
constexpr double margin_top = 20.0;
constexpr double margin_bottom = 52.0;

const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

std::string fmt(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

} // namespace

std::string svg_line_plot(const std::vector<double>& x,
                          const std::vector<PlotSeries>& series,
                          const std::string& x_label, const std::string& y_label,
                          bool log_x)
{
    if (x.size() < 2 || series.empty())
        throw ConfigError("svg_line_plot: need at least two points and one series");
    for (const PlotSeries& s : series)
        if (s.y.size() != x.size())
            throw ConfigError("svg_line_plot: series length mismatch");

    auto x_coord = [&](double v) { return log_x ? std::log10(v) : v; };
    if (log_x)
        for (double v : x)
            if (!(v > 0.0))
                throw ConfigError("svg_line_plot: log axis requires positive x");

    double x_lo = x_coord(x.front()), x_hi = x_coord(x.back());
    if (x_hi <= x_lo)
        std::swap(x_lo, x_hi);
    double y_lo = 0.0, y_hi = 0.0;
    for (const PlotSeries& s : series)
        for (double v : s.y) {
            y_lo = std::min(y_lo, v);
            y_hi = std::max(y_hi, v);
        }
    if (y_hi == y_lo)
        y_hi = y_lo + 1.0;
    y_hi *= 1.05;

    const double plot_w = width - margin_left - margin_right;
    const double plot_h = height - margin_top - margin_bottom;
    auto px = [&](double v) {
        return margin_left + (x_coord(v) - x_lo) / (x_hi - x_lo) * plot_w;
    };
    auto py = [&](double v) {
        return margin_top + (y_hi - v) / (y_hi - y_lo) * plot_h;
    };

    std::string out;
    char buf[256];
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"420\" "
           "viewBox=\"0 0 640 420\">\n";
    out += "<rect width=\"640\" height=\"420\" fill=\"white\"/>\n";

    // Frame and ticks.
    std::snprintf(buf, sizeof buf,
                  "<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" "
                  "fill=\"none\" stroke=\"black\"/>\n",
                  margin_left, margin_top, plot_w, plot_h);
    out += buf;
    for (int t = 0; t <= 4; ++t) {
        const double fx = x_lo + (x_hi - x_lo) * t / 4.0;
        const double gx = margin_left + plot_w * t / 4.0;
        const double label_x = log_x ? std::pow(10.0, fx) : fx;
        std::snprintf(buf, sizeof buf,
                      "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" "
                      "stroke=\"black\"/>\n",
                      gx, margin_top + plot_h, gx, margin_top + plot_h + 5.0);
        out += buf;
        std::snprintf(buf, sizeof buf,
                      "<text x=\"%.1f\" y=\"%.1f\" font-size=\"11\" "
                      "text-anchor=\"middle\">%s</text>\n",
                      gx, margin_top + plot_h + 18.0, fmt(label_x).c_str());
        out += buf;

        const double fy = y_lo + (y_hi - y_lo) * t / 4.0;
        const double gy = py(fy);
        std::snprintf(buf, sizeof buf,
                      "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" "
                      "stroke=\"black\"/>\n",
                      margin_left - 5.0, gy, margin_left, gy);
        out += buf;
        std::snprintf(buf, sizeof buf,
                      "<text x=\"%.1f\" y=\"%.1f\" font-size=\"11\" "
                      "text-anchor=\"end\">%s</text>\n",
                      margin_left - 8.0, gy + 4.0, fmt(fy).c_str());
        out += buf;
    }
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.1f\" y=\"%.1f\" font-size=\"13\" "
                  "text-anchor=\"middle\">%s</text>\n",
                  margin_left + plot_w / 2.0, height - 14.0, x_label.c_str());
    out += buf;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"16\" y=\"%.1f\" font-size=\"13\" text-anchor=\"middle\" "
                  "transform=\"rotate(-90 16 %.1f)\">%s</text>\n",
                  margin_top + plot_h / 2.0, margin_top + plot_h / 2.0,
                  y_label.c_str());
    out += buf;

    for (std::size_t s = 0; s < series.size(); ++s) {
        out += "<polyline fill=\"none\" stroke=\"";
        out += palette[s % 5];
        out += "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < x.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(x[i]), py(series[s].y[i]));
            out += buf;
        }
        out += "\"/>\n";
        if (series.size() > 1 || !series[s].label.empty()) {
            std::snprintf(buf, sizeof buf,
                          "<text x=\"%.1f\" y=\"%.1f\" font-size=\"11\" "
                          "fill=\"%s\">%s</text>\n",
                          margin_left + 10.0,
                          margin_top + 16.0 + 14.0 * static_cast<double>(s),
                          palette[s % 5], series[s].label.c_str());
            out += buf;
        }
    }
    out += "</svg>\n";
    return out;
}

} // namespace omx
