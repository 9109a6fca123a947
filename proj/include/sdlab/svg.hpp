#pragma once

// Self-contained SVG log-log plots: data points, an optional fitted line,
// and an optional predicted-slope guide line. No plotting dependency; the
// output is deterministic for identical inputs.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sdlab/csv.hpp"

namespace sdlab {

struct LogLogSeries {
    std::vector<double> x;
    std::vector<double> y;
    std::string label;
    std::string color = "#1f6fb2";
};

struct GuideLine {
    double slope = 0.0;
    double log_intercept = 0.0; // log y = log_intercept + slope * log x
    std::string label;
    std::string color = "#c23b22";
    bool dashed = false;
};

struct LogLogPlot {
    std::string title;
    std::string x_label = "x";
    std::string y_label = "y";
    std::vector<LogLogSeries> series;
    std::vector<GuideLine> guides;
};

inline std::string render_loglog_svg(const LogLogPlot& plot) {
    constexpr double W = 640, H = 480, ml = 70, mr = 20, mt = 40, mb = 55;
    double lx_min = 1e300, lx_max = -1e300, ly_min = 1e300, ly_max = -1e300;
    for (const auto& s : plot.series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!(s.x[i] > 0.0) || !(s.y[i] > 0.0)) continue;
            lx_min = std::min(lx_min, std::log10(s.x[i]));
            lx_max = std::max(lx_max, std::log10(s.x[i]));
            ly_min = std::min(ly_min, std::log10(s.y[i]));
            ly_max = std::max(ly_max, std::log10(s.y[i]));
        }
    if (lx_min > lx_max) throw std::invalid_argument("render_loglog_svg: no positive data");
    if (lx_max - lx_min < 1e-9) lx_max = lx_min + 1.0;
    if (ly_max - ly_min < 1e-9) ly_max = ly_min + 1.0;
    const double padx = 0.04 * (lx_max - lx_min), pady = 0.06 * (ly_max - ly_min);
    lx_min -= padx; lx_max += padx; ly_min -= pady; ly_max += pady;

    const auto px = [&](double lx) { return ml + (lx - lx_min) / (lx_max - lx_min) * (W - ml - mr); };
    const auto py = [&](double ly) { return H - mb - (ly - ly_min) / (ly_max - ly_min) * (H - mt - mb); };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
       << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\" "
          "font-family=\"sans-serif\">" << plot.title << "</text>\n";

    // decade grid
    for (int d = static_cast<int>(std::ceil(lx_min)); d <= static_cast<int>(std::floor(lx_max)); ++d) {
        const double x = px(d);
        os << "<line x1=\"" << x << "\" y1=\"" << mt << "\" x2=\"" << x << "\" y2=\"" << H - mb
           << "\" stroke=\"#dddddd\"/>\n";
        os << "<text x=\"" << x << "\" y=\"" << H - mb + 18
           << "\" text-anchor=\"middle\" font-size=\"11\" font-family=\"sans-serif\">1e" << d
           << "</text>\n";
    }
    for (int d = static_cast<int>(std::ceil(ly_min)); d <= static_cast<int>(std::floor(ly_max)); ++d) {
        const double y = py(d);
        os << "<line x1=\"" << ml << "\" y1=\"" << y << "\" x2=\"" << W - mr << "\" y2=\"" << y
           << "\" stroke=\"#dddddd\"/>\n";
        os << "<text x=\"" << ml - 8 << "\" y=\"" << y + 4
           << "\" text-anchor=\"end\" font-size=\"11\" font-family=\"sans-serif\">1e" << d
           << "</text>\n";
    }
    os << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << W - ml - mr << "\" height=\""
       << H - mt - mb << "\" fill=\"none\" stroke=\"#444444\"/>\n";
    os << "<text x=\"" << W / 2 << "\" y=\"" << H - 14
       << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\">" << plot.x_label
       << "</text>\n";
    os << "<text x=\"18\" y=\"" << H / 2
       << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\" transform=\"rotate(-90 18 "
       << H / 2 << ")\">" << plot.y_label << "</text>\n";

    const double ln10 = std::log(10.0);
    for (const auto& g : plot.guides) {
        // log10 y = (log_intercept + slope * ln(10) * log10 x) / ln(10)
        const double ly1 = (g.log_intercept + g.slope * ln10 * lx_min) / ln10;
        const double ly2 = (g.log_intercept + g.slope * ln10 * lx_max) / ln10;
        os << "<line x1=\"" << px(lx_min) << "\" y1=\"" << py(ly1) << "\" x2=\"" << px(lx_max)
           << "\" y2=\"" << py(ly2) << "\" stroke=\"" << g.color << "\" stroke-width=\"1.5\"";
        if (g.dashed) os << " stroke-dasharray=\"6 4\"";
        os << "/>\n";
    }
    for (const auto& s : plot.series) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!(s.x[i] > 0.0) || !(s.y[i] > 0.0)) continue;
            os << "<circle cx=\"" << px(std::log10(s.x[i])) << "\" cy=\"" << py(std::log10(s.y[i]))
               << "\" r=\"3\" fill=\"" << s.color << "\"/>\n";
        }
    }
    double ly_legend = mt + 16;
    for (const auto& s : plot.series) {
        os << "<circle cx=\"" << ml + 12 << "\" cy=\"" << ly_legend - 4 << "\" r=\"3\" fill=\""
           << s.color << "\"/><text x=\"" << ml + 22 << "\" y=\"" << ly_legend
           << "\" font-size=\"12\" font-family=\"sans-serif\">" << s.label << "</text>\n";
        ly_legend += 16;
    }
    for (const auto& g : plot.guides) {
        os << "<line x1=\"" << ml + 6 << "\" y1=\"" << ly_legend - 4 << "\" x2=\"" << ml + 18
           << "\" y2=\"" << ly_legend - 4 << "\" stroke=\"" << g.color << "\" stroke-width=\"1.5\"";
        if (g.dashed) os << " stroke-dasharray=\"6 4\"";
        os << "/><text x=\"" << ml + 22 << "\" y=\"" << ly_legend
           << "\" font-size=\"12\" font-family=\"sans-serif\">" << g.label << "</text>\n";
        ly_legend += 16;
    }
    os << "</svg>\n";
    return os.str();
}

inline void write_loglog_svg(const std::string& path, const LogLogPlot& plot) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("write_loglog_svg: cannot open " + path);
    f << render_loglog_svg(plot);
}

} // namespace sdlab
