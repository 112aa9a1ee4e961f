#include "fusedcs/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace fusedcs {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2"};

std::string escape(const std::string& text)
{
    std::string out;
    for (char c : text) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick_label(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", std::abs(v) < 1e-12 ? 0.0 : v);
    return buf;
}

// 1-2-5 tick spacing giving roughly `target` intervals.
double nice_step(double span, int target)
{
    const double raw = span / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double norm = raw / mag;
    const double step = norm < 1.5 ? 1.0 : norm < 3.5 ? 2.0 : norm < 7.5 ? 5.0 : 10.0;
    return step * mag;
}

struct Range
{
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void add(double v)
    {
        if (std::isfinite(v)) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }

    void pad()
    {
        if (!std::isfinite(lo)) {
            lo = 0.0;
            hi = 1.0;
        }
        if (hi - lo < 1e-12) {
            lo -= 0.5;
            hi += 0.5;
        }
    }
};

} // namespace

std::string render_line_plot(const PlotSpec& plot)
{
    const double left = 70, right = 170, top = 40, bottom = 55;
    const double w = plot.width - left - right;
    const double h = plot.height - top - bottom;

    Range xr, yr;
    for (const auto& s : plot.series) {
        for (double v : s.x)
            xr.add(v);
        for (double v : s.y)
            yr.add(v);
    }
    xr.pad();
    yr.pad();
    const double ystep = nice_step(yr.hi - yr.lo, 6);
    yr.lo = std::floor(yr.lo / ystep) * ystep;
    yr.hi = std::ceil(yr.hi / ystep) * ystep;
    const double xstep = nice_step(xr.hi - xr.lo, 8);

    const auto px = [&](double x) { return left + (x - xr.lo) / (xr.hi - xr.lo) * w; };
    const auto py = [&](double y) { return top + (yr.hi - y) / (yr.hi - yr.lo) * h; };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << plot.width << "\" height=\"" << plot.height
        << "\" viewBox=\"0 0 " << plot.width << ' ' << plot.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << num(left + w / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
        << escape(plot.title) << "</text>\n";

    // axes and grid
    svg << "<g stroke=\"#dddddd\" stroke-width=\"1\">\n";
    for (double y = yr.lo; y <= yr.hi + ystep * 1e-9; y += ystep)
        svg << "<line x1=\"" << num(left) << "\" y1=\"" << num(py(y)) << "\" x2=\"" << num(left + w) << "\" y2=\""
            << num(py(y)) << "\"/>\n";
    svg << "</g>\n";
    svg << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\"" << num(w) << "\" height=\"" << num(h)
        << "\" fill=\"none\" stroke=\"black\"/>\n";
    svg << "<g text-anchor=\"end\">\n";
    for (double y = yr.lo; y <= yr.hi + ystep * 1e-9; y += ystep)
        svg << "<text x=\"" << num(left - 6) << "\" y=\"" << num(py(y) + 4) << "\">" << tick_label(y) << "</text>\n";
    svg << "</g>\n<g text-anchor=\"middle\">\n";
    for (double x = std::ceil(xr.lo / xstep) * xstep; x <= xr.hi + xstep * 1e-9; x += xstep)
        svg << "<text x=\"" << num(px(x)) << "\" y=\"" << num(top + h + 18) << "\">" << tick_label(x) << "</text>\n";
    svg << "</g>\n";
    svg << "<text x=\"" << num(left + w / 2) << "\" y=\"" << num(plot.height - 12.0)
        << "\" text-anchor=\"middle\">" << escape(plot.x_label) << "</text>\n";
    svg << "<text x=\"16\" y=\"" << num(top + h / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
        << num(top + h / 2) << ")\">" << escape(plot.y_label) << "</text>\n";

    for (std::size_t k = 0; k < plot.series.size(); ++k) {
        const auto& s = plot.series[k];
        const char* color = kPalette[k % std::size(kPalette)];
        svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.6\" points=\"";
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i)
            if (std::isfinite(s.y[i]))
                svg << (i ? " " : "") << num(px(s.x[i])) << ',' << num(py(s.y[i]));
        svg << "\"/>\n";
        if (s.markers)
            for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i)
                if (std::isfinite(s.y[i]))
                    svg << "<circle cx=\"" << num(px(s.x[i])) << "\" cy=\"" << num(py(s.y[i])) << "\" r=\"3\" fill=\""
                        << color << "\"/>\n";

        const double ly = top + 14 + 20.0 * static_cast<double>(k);
        svg << "<line x1=\"" << num(left + w + 14) << "\" y1=\"" << num(ly) << "\" x2=\"" << num(left + w + 40)
            << "\" y2=\"" << num(ly) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        svg << "<text x=\"" << num(left + w + 46) << "\" y=\"" << num(ly + 4) << "\">" << escape(s.label)
            << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

} // namespace fusedcs
