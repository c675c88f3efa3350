#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "homlab/io/csv.hpp"

namespace homlab::io {

struct PlotLabels {
    std::string title;
    std::string x = "x";
    std::string y = "y";
    bool log_x = false;
};

namespace detail {

inline std::string escape_xml(const std::string& s) {
    std::string out;
    for (char c : s) {
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

inline std::string fixed(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

}  // namespace detail

/// Self-contained SVG 1.1 line plot of one series, with axes, ticks at the data extremes and labels.
inline std::string plot_series(const std::vector<std::pair<double, double>>& series, const PlotLabels& labels) {
    require(series.size() >= 2, "plot needs at least two points");
    for (const auto& [x, y] : series) {
        require(std::isfinite(x) && std::isfinite(y), "plot values must be finite");
        require(!labels.log_x || x > 0.0, "log-x plot needs positive x values");
    }
    auto tx = [&](double x) { return labels.log_x ? std::log10(x) : x; };
    double x0 = tx(series.front().first), x1 = x0, y0 = series.front().second, y1 = y0;
    for (const auto& [x, y] : series) {
        x0 = std::min(x0, tx(x));
        x1 = std::max(x1, tx(x));
        y0 = std::min(y0, y);
        y1 = std::max(y1, y);
    }
    if (x1 == x0) x1 = x0 + 1.0;
    if (y1 == y0) {
        const double pad = std::max(1.0, std::abs(y0)) * 0.05;
        y0 -= pad;
        y1 += pad;
    }
    constexpr double W = 640, H = 400, L = 80, Rm = 20, T = 40, B = 60;
    auto px = [&](double x) { return L + (tx(x) - x0) / (x1 - x0) * (W - L - Rm); };
    auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };

    std::string s;
    s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"640\" height=\"400\" viewBox=\"0 0 640 400\">\n";
    s += "<rect x=\"0\" y=\"0\" width=\"640\" height=\"400\" fill=\"white\"/>\n";
    if (!labels.title.empty())
        s += "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">" +
             detail::escape_xml(labels.title) + "</text>\n";
    const std::string axis = "stroke=\"black\" stroke-width=\"1\"";
    s += "<line x1=\"" + detail::fixed(L) + "\" y1=\"" + detail::fixed(H - B) + "\" x2=\"" + detail::fixed(W - Rm) +
         "\" y2=\"" + detail::fixed(H - B) + "\" " + axis + "/>\n";
    s += "<line x1=\"" + detail::fixed(L) + "\" y1=\"" + detail::fixed(T) + "\" x2=\"" + detail::fixed(L) + "\" y2=\"" +
         detail::fixed(H - B) + "\" " + axis + "/>\n";
    const std::string font = "font-family=\"sans-serif\" font-size=\"12\"";
    const double xmin_raw = labels.log_x ? std::pow(10.0, x0) : x0, xmax_raw = labels.log_x ? std::pow(10.0, x1) : x1;
    s += "<text x=\"" + detail::fixed(L) + "\" y=\"" + detail::fixed(H - B + 16) + "\" text-anchor=\"middle\" " + font +
         ">" + format_number(xmin_raw) + "</text>\n";
    s += "<text x=\"" + detail::fixed(W - Rm) + "\" y=\"" + detail::fixed(H - B + 16) + "\" text-anchor=\"middle\" " +
         font + ">" + format_number(xmax_raw) + "</text>\n";
    s += "<text x=\"" + detail::fixed(L - 6) + "\" y=\"" + detail::fixed(H - B) + "\" text-anchor=\"end\" " + font + ">" +
         format_number(y0) + "</text>\n";
    s += "<text x=\"" + detail::fixed(L - 6) + "\" y=\"" + detail::fixed(T + 4) + "\" text-anchor=\"end\" " + font + ">" +
         format_number(y1) + "</text>\n";
    s += "<text class=\"x-label\" x=\"" + detail::fixed(0.5 * (L + W - Rm)) + "\" y=\"" + detail::fixed(H - 16) +
         "\" text-anchor=\"middle\" " + font + ">" + detail::escape_xml(labels.x + (labels.log_x ? " (log scale)" : "")) +
         "</text>\n";
    s += "<text class=\"y-label\" x=\"20\" y=\"" + detail::fixed(0.5 * (T + H - B)) +
         "\" text-anchor=\"middle\" transform=\"rotate(-90 20 " + detail::fixed(0.5 * (T + H - B)) + ")\" " + font + ">" +
         detail::escape_xml(labels.y) + "</text>\n";
    s += "<polyline fill=\"none\" stroke=\"#1f4e9a\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (i) s += ' ';
        s += detail::fixed(px(series[i].first)) + "," + detail::fixed(py(series[i].second));
    }
    s += "\"/>\n";
    for (const auto& [x, y] : series)
        s += "<circle cx=\"" + detail::fixed(px(x)) + "\" cy=\"" + detail::fixed(py(y)) + "\" r=\"3\" fill=\"#1f4e9a\"/>\n";
    s += "</svg>\n";
    return s;
}

}  // namespace homlab::io
