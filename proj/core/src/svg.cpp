#include "bn6/svg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace bn6 {

namespace {

constexpr double kWidth = 720, kHeight = 460;
constexpr double kLeft = 80, kRight = 200, kTop = 40, kBottom = 60;

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

// 1-2-5 ticks covering [lo, hi]
std::vector<double> linear_ticks(double lo, double hi) {
    const double span = hi - lo;
    const double raw = span / 6.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0})
        if (m * mag >= raw) {
            step = m * mag;
            break;
        }
    std::vector<double> t;
    for (double x = std::ceil(lo / step) * step; x <= hi + 1e-9 * span; x += step) t.push_back(std::abs(x) < 1e-12 * span ? 0.0 : x);
    return t;
}

struct Axis {
    double lo, hi;
    bool log;
    double map(double v, double a, double b) const {
        const double x = log ? std::log10(v) : v;
        return a + (x - lo) / (hi - lo) * (b - a);
    }
};

Axis make_axis(std::vector<double> vals, bool log) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (double v : vals) {
        if (log && !(v > 0.0)) continue;
        if (!std::isfinite(v)) continue;
        const double x = log ? std::log10(v) : v;
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    if (!std::isfinite(lo)) lo = 0.0, hi = 1.0;
    if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) {
        lo -= 0.5;
        hi += 0.5;
    }
    if (log) {
        lo = std::floor(lo * 4.0) / 4.0;
        hi = std::ceil(hi * 4.0) / 4.0;
    } else {
        const double pad = 0.05 * (hi - lo);
        lo -= pad;
        hi += pad;
    }
    return {lo, hi, log};
}

}  // namespace

std::string render_svg(const PlotSpec& spec) {
    std::vector<double> xs, ys;
    for (const auto& s : spec.series)
        for (const auto& [x, y] : s.points) {
            xs.push_back(x);
            ys.push_back(y);
        }
    const Axis ax = make_axis(xs, spec.logx), ay = make_axis(ys, spec.logy);
    const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
    auto px = [&](double x) { return ax.map(x, x0, x1); };
    auto py = [&](double y) { return ay.map(y, y0, y1); };

    std::string o;
    o += fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0f}\" height=\"{:.0f}\" viewBox=\"0 0 {:.0f} {:.0f}\" "
        "font-family=\"sans-serif\" font-size=\"12\">\n",
        kWidth, kHeight, kWidth, kHeight);
    o += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o += fmt::format("<text x=\"{:.1f}\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">{}</text>\n", 0.5 * (x0 + x1),
                     xml_escape(spec.title));
    o += fmt::format("<rect x=\"{:.1f}\" y=\"{:.1f}\" width=\"{:.1f}\" height=\"{:.1f}\" fill=\"none\" stroke=\"black\"/>\n",
                     x0, y1, x1 - x0, y0 - y1);

    auto ticks = [](const Axis& a) {
        std::vector<double> t;
        if (a.log) {
            for (double e = std::ceil(a.lo); e <= a.hi + 1e-9; e += 1.0) t.push_back(std::pow(10.0, e));
            if (t.size() < 2)
                for (double e = std::ceil(a.lo * 4.0) / 4.0; e <= a.hi + 1e-9; e += 0.25) t.push_back(std::pow(10.0, e));
            return t;
        }
        return linear_ticks(a.lo, a.hi);
    };
    for (double t : ticks(ax)) {
        const double X = px(t);
        o += fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"#ddd\"/>\n", X, y0, X, y1);
        o += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{:.3g}</text>\n", X, y0 + 16, t);
    }
    for (double t : ticks(ay)) {
        const double Y = py(t);
        o += fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"#ddd\"/>\n", x0, Y, x1, Y);
        o += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\">{:.3g}</text>\n", x0 - 6, Y + 4, t);
    }
    o += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{}</text>\n", 0.5 * (x0 + x1),
                     kHeight - 18, xml_escape(spec.xlabel));
    o += fmt::format("<text x=\"18\" y=\"{:.1f}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {:.1f})\">{}</text>\n",
                     0.5 * (y0 + y1), 0.5 * (y0 + y1), xml_escape(spec.ylabel));

    int legend_row = 0;
    for (const auto& s : spec.series) {
        std::vector<std::pair<double, double>> pts;
        for (const auto& [x, y] : s.points) {
            if ((spec.logx && !(x > 0)) || (spec.logy && !(y > 0)) || !std::isfinite(x) || !std::isfinite(y)) continue;
            pts.emplace_back(px(x), py(y));
        }
        const std::string dash = s.dashed ? " stroke-dasharray=\"6 4\"" : "";
        if (s.line && pts.size() >= 2) {
            o += "<polyline fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"1.6\"" + dash + " points=\"";
            for (std::size_t i = 0; i < pts.size(); ++i)
                o += fmt::format("{}{:.2f},{:.2f}", i ? " " : "", pts[i].first, pts[i].second);
            o += "\"/>\n";
        } else {
            for (const auto& [X, Y] : pts)
                o += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"3\" fill=\"{}\"/>\n", X, Y, s.color);
        }
        const double ly = y1 + 14 + 18 * legend_row++;
        const double lx = x1 + 14;
        if (s.line)
            o += fmt::format("<line x1=\"{:.1f}\" y1=\"{:.1f}\" x2=\"{:.1f}\" y2=\"{:.1f}\" stroke=\"{}\" stroke-width=\"1.6\"{}/>\n",
                             lx, ly - 4, lx + 22, ly - 4, s.color, dash);
        else
            o += fmt::format("<circle cx=\"{:.1f}\" cy=\"{:.1f}\" r=\"3\" fill=\"{}\"/>\n", lx + 11, ly - 4, s.color);
        o += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\">{}</text>\n", lx + 28, ly, xml_escape(s.label));
    }
    o += "</svg>\n";
    return o;
}

}  // namespace bn6
