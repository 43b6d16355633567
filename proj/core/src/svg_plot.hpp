#pragma once

#include <optional>
#include <string>
#include <vector>

namespace dscem::detail {

struct Series {
    std::string label;
    std::string color;
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> band_lo;  // optional shaded band (same length as x)
    std::vector<double> band_hi;
    double opacity = 1.0;
    bool in_legend = true;
};

struct SvgPlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<Series> series;
    int width = 720;
    int height = 440;
};

void write_svg_plot(const SvgPlotSpec& spec, const std::string& path);

}  // namespace dscem::detail
