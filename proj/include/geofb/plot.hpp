#pragma once

/* Self-contained SVG log-log plots for convergence traces.
 *
 * A trace plot shows one or more series (n, value) on log10/log10 axes:
 * measured quantities as solid polylines, predicted envelopes dashed.  The
 * output is a single <svg> element with inline styling only -- no external
 * fonts, scripts, or stylesheets -- so the file renders anywhere as-is.
 *
 * Points with nonpositive or nonfinite coordinates are dropped (they have no
 * place on a log axis; finite termination produces exact zeros).  Axis limits
 * snap outward to whole decades and the value axis is capped at 24 decades so
 * a series that underflows toward 1e-300 does not crush the readable range.
 * Long series are decimated to at most 400 points; the x axis is logarithmic,
 * so the subsample is taken log-uniformly in the index.
 *
 * All numeric formatting goes through snprintf with fixed precision, which
 * keeps the byte output deterministic across runs and platforms.
 */

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

namespace geofb {

struct PlotSeries {
    std::string label;
    std::vector<std::pair<double, double>> points;  // (n, value)
    bool dashed = false;                            // envelopes are dashed
};

namespace plotdetail {

inline std::string fnum(double v, const char* fmt = "%.2f")
{
    char buf[64];
    std::snprintf(buf, sizeof buf, fmt, v);
    return buf;
}

/* Decade tick label: 1, 10, 1e-3, ... */
inline std::string decade_label(int e)
{
    if (e == 0) return "1";
    if (e == 1) return "10";
    if (e == 2) return "100";
    char buf[32];
    std::snprintf(buf, sizeof buf, "1e%d", e);
    return buf;
}

inline std::string xml_escape(const std::string& s)
{
    std::string out;
    out.reserve(s.size());
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

/* Log-uniform index subsample keeping first and last. */
inline std::vector<std::size_t> log_sample(std::size_t n, std::size_t cap)
{
    std::vector<std::size_t> idx;
    if (n == 0) return idx;
    if (n <= cap) {
        idx.resize(n);
        for (std::size_t i = 0; i < n; ++i) idx[i] = i;
        return idx;
    }
    double lo = 0.0, hi = std::log(static_cast<double>(n));
    std::size_t prev = static_cast<std::size_t>(-1);
    for (std::size_t k = 0; k < cap; ++k) {
        double t = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(cap - 1);
        auto i = static_cast<std::size_t>(std::llround(std::exp(t))) - 0;
        if (i >= n) i = n - 1;
        if (i != prev) idx.push_back(i);
        prev = i;
    }
    if (idx.back() != n - 1) idx.push_back(n - 1);
    return idx;
}

}  // namespace plotdetail

/* Render a log-log figure.  Returns the complete SVG document as a string. */
inline std::string svg_loglog(const std::vector<PlotSeries>& series,
                              const std::string& title,
                              const std::string& xlabel = "n",
                              const std::string& ylabel = "value")
{
    using plotdetail::decade_label;
    using plotdetail::fnum;
    using plotdetail::xml_escape;

    const double width = 720.0, height = 480.0;
    const double ml = 74.0, mr = 18.0, mt = 42.0, mb = 52.0;
    const double pw = width - ml - mr, ph = height - mt - mb;

    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                    "#9467bd", "#ff7f0e", "#8c564b"};
    const int npal = 6;

    /* Clean series: keep strictly positive finite points only. */
    std::vector<PlotSeries> clean;
    double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
    bool any = false;
    for (const auto& s : series) {
        PlotSeries c;
        c.label = s.label;
        c.dashed = s.dashed;
        for (auto [x, y] : s.points)
            if (std::isfinite(x) && std::isfinite(y) && x > 0.0 && y > 0.0)
                c.points.emplace_back(x, y);
        if (c.points.empty()) continue;
        for (auto [x, y] : c.points) {
            if (!any) {
                xmin = xmax = x;
                ymin = ymax = y;
                any = true;
            } else {
                xmin = std::min(xmin, x);
                xmax = std::max(xmax, x);
                ymin = std::min(ymin, y);
                ymax = std::max(ymax, y);
            }
        }
        clean.push_back(std::move(c));
    }

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 720 480\" "
           "width=\"720\" height=\"480\">\n";
    out += "<style>text{font-family:Helvetica,Arial,sans-serif;fill:#333}"
           ".t{font-size:15px;font-weight:bold}.a{font-size:12px}"
           ".k{font-size:11px}</style>\n";
    out += "<rect x=\"0\" y=\"0\" width=\"720\" height=\"480\" fill=\"#ffffff\"/>\n";
    out += "<text class=\"t\" x=\"" + fnum(width / 2) + "\" y=\"24\" text-anchor=\"middle\">" +
           xml_escape(title) + "</text>\n";

    if (!any) {
        out += "<text class=\"a\" x=\"360\" y=\"240\" text-anchor=\"middle\">no positive "
               "data to plot</text>\n</svg>\n";
        return out;
    }

    /* Snap to whole decades; cap the value range at 24 decades from the top. */
    int xlo = static_cast<int>(std::floor(std::log10(xmin)));
    int xhi = static_cast<int>(std::ceil(std::log10(xmax)));
    int ylo = static_cast<int>(std::floor(std::log10(ymin)));
    int yhi = static_cast<int>(std::ceil(std::log10(ymax)));
    if (xhi == xlo) ++xhi;
    if (yhi == ylo) ++yhi;
    if (yhi - ylo > 24) ylo = yhi - 24;

    auto px = [&](double x) { return ml + (std::log10(x) - xlo) / double(xhi - xlo) * pw; };
    auto py = [&](double y) { return mt + ph - (std::log10(y) - ylo) / double(yhi - ylo) * ph; };

    /* Decade grid with thinned labels when the span is wide. */
    int xstep = std::max(1, (xhi - xlo + 7) / 8);
    int ystep = std::max(1, (yhi - ylo + 7) / 8);
    for (int e = xlo; e <= xhi; e += xstep) {
        double gx = ml + double(e - xlo) / double(xhi - xlo) * pw;
        out += "<line x1=\"" + fnum(gx) + "\" y1=\"" + fnum(mt) + "\" x2=\"" + fnum(gx) +
               "\" y2=\"" + fnum(mt + ph) + "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        out += "<text class=\"a\" x=\"" + fnum(gx) + "\" y=\"" + fnum(mt + ph + 16) +
               "\" text-anchor=\"middle\">" + decade_label(e) + "</text>\n";
    }
    for (int e = ylo; e <= yhi; e += ystep) {
        double gy = mt + ph - double(e - ylo) / double(yhi - ylo) * ph;
        out += "<line x1=\"" + fnum(ml) + "\" y1=\"" + fnum(gy) + "\" x2=\"" + fnum(ml + pw) +
               "\" y2=\"" + fnum(gy) + "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        out += "<text class=\"a\" x=\"" + fnum(ml - 6) + "\" y=\"" + fnum(gy + 4) +
               "\" text-anchor=\"end\">" + decade_label(e) + "</text>\n";
    }
    out += "<rect x=\"" + fnum(ml) + "\" y=\"" + fnum(mt) + "\" width=\"" + fnum(pw) +
           "\" height=\"" + fnum(ph) + "\" fill=\"none\" stroke=\"#555555\"/>\n";
    out += "<text class=\"a\" x=\"" + fnum(ml + pw / 2) + "\" y=\"" + fnum(height - 12) +
           "\" text-anchor=\"middle\">" + xml_escape(xlabel) + "</text>\n";
    out += "<text class=\"a\" x=\"16\" y=\"" + fnum(mt + ph / 2) +
           "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " + fnum(mt + ph / 2) +
           ")\">" + xml_escape(ylabel) + "</text>\n";

    /* Series polylines, clipped below the capped floor. */
    const double yfloor = std::pow(10.0, ylo);
    for (std::size_t si = 0; si < clean.size(); ++si) {
        const auto& s = clean[si];
        auto idx = plotdetail::log_sample(s.points.size(), 400);
        std::string pts;
        for (auto i : idx) {
            auto [x, y] = s.points[i];
            if (y < yfloor) continue;
            pts += fnum(px(x)) + "," + fnum(py(y)) + " ";
        }
        if (pts.empty()) continue;
        pts.pop_back();
        out += "<polyline fill=\"none\" stroke=\"" + std::string(palette[si % npal]) +
               "\" stroke-width=\"1.6\"";
        if (s.dashed) out += " stroke-dasharray=\"6 4\"";
        out += " points=\"" + pts + "\"/>\n";
    }

    /* Legend, top-right inside the frame. */
    double lx = ml + pw - 190.0, ly = mt + 12.0;
    for (std::size_t si = 0; si < clean.size(); ++si) {
        const auto& s = clean[si];
        out += "<line x1=\"" + fnum(lx) + "\" y1=\"" + fnum(ly) + "\" x2=\"" + fnum(lx + 26) +
               "\" y2=\"" + fnum(ly) + "\" stroke=\"" + std::string(palette[si % npal]) +
               "\" stroke-width=\"1.6\"";
        if (s.dashed) out += " stroke-dasharray=\"6 4\"";
        out += "/>\n";
        out += "<text class=\"k\" x=\"" + fnum(lx + 32) + "\" y=\"" + fnum(ly + 4) + "\">" +
               xml_escape(s.label) + "</text>\n";
        ly += 16.0;
    }

    out += "</svg>\n";
    return out;
}

}  // namespace geofb
