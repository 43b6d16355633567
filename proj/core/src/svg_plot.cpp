#include "svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace dscem::detail {
namespace {

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    void absorb(double v) {
        if (!std::isfinite(v)) return;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
};

std::vector<double> nice_ticks(double lo, double hi, int target = 6) {
    if (!(hi > lo)) return {lo};
    const double raw = (hi - lo) / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        if (raw <= m * mag) {
            step = m * mag;
            break;
        }
    }
    std::vector<double> ticks;
    for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * step; t += step)
        ticks.push_back(t);
    return ticks;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

}  // namespace

void write_svg_plot(const SvgPlotSpec& spec, const std::string& path) {
    Range xr, yr;
    for (const auto& s : spec.series) {
        for (double v : s.x) xr.absorb(v);
        for (double v : s.y) yr.absorb(v);
        for (double v : s.band_lo) yr.absorb(v);
        for (double v : s.band_hi) yr.absorb(v);
    }
    if (!std::isfinite(xr.lo) || !std::isfinite(yr.lo))
        throw std::runtime_error("write_svg_plot: no finite data");
    if (xr.hi == xr.lo) {
        xr.lo -= 1.0;
        xr.hi += 1.0;
    }
    if (yr.hi == yr.lo) {
        yr.lo -= 1.0;
        yr.hi += 1.0;
    }
    const double pad_y = 0.06 * (yr.hi - yr.lo);
    yr.lo -= pad_y;
    yr.hi += pad_y;

    const double ml = 70, mr = 20, mt = 36, mb = 50;
    const double pw = spec.width - ml - mr;
    const double ph = spec.height - mt - mb;
    auto px = [&](double v) { return ml + pw * (v - xr.lo) / (xr.hi - xr.lo); };
    auto py = [&](double v) { return mt + ph * (1.0 - (v - yr.lo) / (yr.hi - yr.lo)); };

    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_svg_plot: cannot open " + path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.width
        << "\" height=\"" << spec.height << "\" font-family=\"sans-serif\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << spec.width / 2 << "\" y=\"20\" text-anchor=\"middle\" "
        << "font-size=\"14\">" << spec.title << "</text>\n";

    for (double t : nice_ticks(xr.lo, xr.hi)) {
        out << "<line x1=\"" << px(t) << "\" y1=\"" << mt << "\" x2=\"" << px(t)
            << "\" y2=\"" << mt + ph << "\" stroke=\"#e0e0e0\"/>\n";
        out << "<text x=\"" << px(t) << "\" y=\"" << mt + ph + 16
            << "\" text-anchor=\"middle\" font-size=\"11\">" << fmt(t) << "</text>\n";
    }
    for (double t : nice_ticks(yr.lo, yr.hi)) {
        out << "<line x1=\"" << ml << "\" y1=\"" << py(t) << "\" x2=\"" << ml + pw
            << "\" y2=\"" << py(t) << "\" stroke=\"#e0e0e0\"/>\n";
        out << "<text x=\"" << ml - 6 << "\" y=\"" << py(t) + 4
            << "\" text-anchor=\"end\" font-size=\"11\">" << fmt(t) << "</text>\n";
    }
    out << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw << "\" height=\""
        << ph << "\" fill=\"none\" stroke=\"black\"/>\n";
    out << "<text x=\"" << ml + pw / 2 << "\" y=\"" << spec.height - 12
        << "\" text-anchor=\"middle\" font-size=\"12\">" << spec.x_label << "</text>\n";
    out << "<text x=\"16\" y=\"" << mt + ph / 2
        << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 "
        << mt + ph / 2 << ")\">" << spec.y_label << "</text>\n";

    for (const auto& s : spec.series) {
        if (!s.band_lo.empty() && s.band_lo.size() == s.x.size() &&
            s.band_hi.size() == s.x.size()) {
            out << "<polygon points=\"";
            for (std::size_t i = 0; i < s.x.size(); ++i)
                out << px(s.x[i]) << "," << py(s.band_hi[i]) << " ";
            for (std::size_t i = s.x.size(); i-- > 0;)
                out << px(s.x[i]) << "," << py(s.band_lo[i]) << " ";
            out << "\" fill=\"" << s.color << "\" fill-opacity=\"0.18\" stroke=\"none\"/>\n";
        }
        out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\""
            << " stroke-opacity=\"" << s.opacity << "\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i)
            out << px(s.x[i]) << "," << py(s.y[i]) << " ";
        out << "\"/>\n";
        if (s.x.size() == 1)
            out << "<circle cx=\"" << px(s.x[0]) << "\" cy=\"" << py(s.y[0])
                << "\" r=\"3\" fill=\"" << s.color << "\"/>\n";
    }

    // Legend, de-duplicated by label.
    double ly = mt + 14;
    std::vector<std::string> seen;
    for (const auto& s : spec.series) {
        if (!s.in_legend) continue;
        if (std::find(seen.begin(), seen.end(), s.label) != seen.end()) continue;
        seen.push_back(s.label);
        out << "<line x1=\"" << ml + pw - 150 << "\" y1=\"" << ly << "\" x2=\""
            << ml + pw - 126 << "\" y2=\"" << ly << "\" stroke=\"" << s.color
            << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << ml + pw - 120 << "\" y=\"" << ly + 4
            << "\" font-size=\"11\">" << s.label << "</text>\n";
        ly += 16;
    }
    out << "</svg>\n";
}

}  // namespace dscem::detail
