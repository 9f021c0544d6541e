// SPDX-License-Identifier: Apache-2.0
#include "qradar/harness/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "qradar/common.hpp"

namespace qradar::harness::svg {

namespace {

constexpr double kWidth = 720, kHeight = 420;
constexpr double kLeft = 70, kRight = 160, kTop = 50, kBottom = 60;
constexpr const char *kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"};

std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string escape(const std::string &s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&':
            out += "&amp;";
            break;
        case '<':
            out += "&lt;";
            break;
        case '>':
            out += "&gt;";
            break;
        case '"':
            out += "&quot;";
            break;
        default:
            out += c;
        }
    }
    return out;
}

std::string text(double x, double y, const std::string &s, const char *anchor = "middle", int size = 12)
{
    return "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-size=\"" + std::to_string(size) +
           "\" text-anchor=\"" + anchor + "\">" + escape(s) + "</text>\n";
}

std::string line(double x1, double y1, double x2, double y2, const char *stroke = "#333")
{
    return "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) + "\" y2=\"" + num(y2) +
           "\" stroke=\"" + stroke + "\"/>\n";
}

/// Round the axis top up to 1, 2 or 5 times a power of ten.
double nice_ceiling(double v)
{
    if (!(v > 0.0))
        return 1.0;
    const double p = std::pow(10.0, std::floor(std::log10(v)));
    for (double m : {1.0, 2.0, 5.0, 10.0})
        if (m * p >= v)
            return m * p;
    return 10.0 * p;
}

struct Frame {
    double lo, hi;
    double plot_w() const { return kWidth - kLeft - kRight; }
    double plot_h() const { return kHeight - kTop - kBottom; }
    double y(double v) const { return kTop + plot_h() * (1.0 - (v - lo) / (hi - lo)); }
};

std::string open(const std::string &title)
{
    return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" + num(kHeight) +
           "\" viewBox=\"0 0 " + num(kWidth) + " " + num(kHeight) + "\">\n" +
           "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n" + text(kWidth / 2, 28, title, "middle", 16);
}

std::string y_axis(const Frame &f, const std::string &label)
{
    std::string out = line(kLeft, kTop, kLeft, kTop + f.plot_h());
    for (int t = 0; t <= 5; ++t) {
        const double v = f.lo + (f.hi - f.lo) * t / 5.0;
        out += line(kLeft - 4, f.y(v), kLeft, f.y(v));
        out += text(kLeft - 8, f.y(v) + 4, num(v), "end", 11);
    }
    out += "<text x=\"18\" y=\"" + num(kTop + f.plot_h() / 2) + "\" font-size=\"12\" text-anchor=\"middle\" "
           "transform=\"rotate(-90 18 " + num(kTop + f.plot_h() / 2) + ")\">" + escape(label) + "</text>\n";
    return out;
}

std::string legend(const std::vector<Series> &series)
{
    std::string out;
    for (std::size_t s = 0; s < series.size(); ++s) {
        const double y = kTop + 20.0 * static_cast<double>(s);
        out += "<rect x=\"" + num(kWidth - kRight + 20) + "\" y=\"" + num(y) + "\" width=\"12\" height=\"12\" fill=\"" +
               kPalette[s % 6] + "\"/>\n";
        out += text(kWidth - kRight + 38, y + 10, series[s].name, "start", 12);
    }
    return out;
}

void check(const std::vector<Series> &series, std::size_t n)
{
    if (series.empty() || n == 0)
        throw Error(ErrorKind::InvalidArgument, "chart needs at least one series and one point");
    for (const auto &s : series) {
        if (s.values.size() != n)
            throw Error(ErrorKind::DimensionMismatch, "series '" + s.name + "' has the wrong number of values");
        for (double v : s.values)
            if (!std::isfinite(v))
                throw Error(ErrorKind::InvalidArgument, "series '" + s.name + "' holds a non-finite value");
    }
}

} // namespace

std::string bar_chart(const std::string &title, const std::vector<std::string> &categories,
                      const std::vector<Series> &series, const std::string &y_label, double y_max)
{
    check(series, categories.size());
    double top = 0.0;
    for (const auto &s : series)
        for (double v : s.values)
            top = std::max(top, v);
    const Frame f{0.0, y_max > 0.0 ? y_max : nice_ceiling(top)};

    std::string out = open(title) + y_axis(f, y_label);
    out += line(kLeft, f.y(0), kLeft + f.plot_w(), f.y(0));
    const double group_w = f.plot_w() / static_cast<double>(categories.size());
    const double bar_w = group_w * 0.8 / static_cast<double>(series.size());
    for (std::size_t c = 0; c < categories.size(); ++c) {
        const double x0 = kLeft + group_w * static_cast<double>(c) + group_w * 0.1;
        for (std::size_t s = 0; s < series.size(); ++s) {
            const double v = std::clamp(series[s].values[c], 0.0, f.hi);
            const double x = x0 + bar_w * static_cast<double>(s);
            out += "<rect x=\"" + num(x) + "\" y=\"" + num(f.y(v)) + "\" width=\"" + num(bar_w) + "\" height=\"" +
                   num(f.y(0) - f.y(v)) + "\" fill=\"" + kPalette[s % 6] + "\"><title>" + escape(series[s].name) +
                   ": " + num(series[s].values[c]) + "</title></rect>\n";
        }
        out += text(x0 + group_w * 0.4, f.y(0) + 18, categories[c]);
    }
    return out + legend(series) + "</svg>\n";
}

std::string line_chart(const std::string &title, const std::vector<double> &x, const std::vector<Series> &series,
                       const std::string &x_label, const std::string &y_label)
{
    check(series, x.size());
    double lo = series[0].values[0], hi = lo;
    for (const auto &s : series)
        for (double v : s.values) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    if (hi - lo < 1e-9) {
        lo -= 0.5;
        hi += 0.5;
    }
    const double pad = 0.05 * (hi - lo);
    const Frame f{lo - pad, hi + pad};
    const auto [xmin_it, xmax_it] = std::minmax_element(x.begin(), x.end());
    const double x_lo = *xmin_it, x_span = std::max(*xmax_it - *xmin_it, 1e-12);
    auto px = [&](double v) { return kLeft + f.plot_w() * (x.size() == 1 ? 0.5 : (v - x_lo) / x_span); };

    std::string out = open(title) + y_axis(f, y_label);
    out += line(kLeft, kTop + f.plot_h(), kLeft + f.plot_w(), kTop + f.plot_h());
    for (double v : x)
        out += text(px(v), kTop + f.plot_h() + 18, num(v).substr(0, num(v).find(".00")));
    out += text(kLeft + f.plot_w() / 2, kHeight - 15, x_label);
    for (std::size_t s = 0; s < series.size(); ++s) {
        std::string pts;
        for (std::size_t i = 0; i < x.size(); ++i)
            pts += (i ? " " : "") + num(px(x[i])) + "," + num(f.y(series[s].values[i]));
        out += "<polyline fill=\"none\" stroke=\"" + std::string(kPalette[s % 6]) + "\" stroke-width=\"2\" points=\"" +
               pts + "\"/>\n";
        for (std::size_t i = 0; i < x.size(); ++i)
            out += "<circle cx=\"" + num(px(x[i])) + "\" cy=\"" + num(f.y(series[s].values[i])) + "\" r=\"3\" fill=\"" +
                   kPalette[s % 6] + "\"/>\n";
    }
    return out + legend(series) + "</svg>\n";
}

} // namespace qradar::harness::svg
