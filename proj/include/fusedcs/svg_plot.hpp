#pragma once

#include <string>
#include <vector>

namespace fusedcs {

struct PlotSeries
{
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    bool markers = false;
};

struct PlotSpec
{
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<PlotSeries> series;
    int width = 800;
    int height = 480;
};

// Self-contained SVG document: axes with ticks, one polyline per series, legend.
std::string render_line_plot(const PlotSpec& plot);

} // namespace fusedcs
