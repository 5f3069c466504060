#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace hpcli {

namespace {

constexpr double W = 720, H = 480, L = 80, R = 150, T = 40, B = 60;
const char* const palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string esc(const std::string& s) {
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

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

struct Axis {
    bool log = false;
    double lo = 0, hi = 1;

    double map(double v) const { return log ? std::log10(v) : v; }
    double frac(double v) const { return (map(v) - lo) / (hi - lo); }

    std::vector<double> ticks() const {
        std::vector<double> out;
        if (log) {
            const int a = static_cast<int>(std::ceil(lo - 1e-9)), b = static_cast<int>(std::floor(hi + 1e-9));
            const int step = std::max(1, (b - a) / 6);
            for (int e = a; e <= b; e += step) out.push_back(std::pow(10.0, e));
        } else {
            const double span = hi - lo;
            const double raw = span / 5;
            const double mag = std::pow(10.0, std::floor(std::log10(raw)));
            const double step = raw / mag < 2 ? 2 * mag : raw / mag < 5 ? 5 * mag : 10 * mag;
            for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * span; v += step) out.push_back(v);
        }
        return out;
    }
};

bool usable(double v, bool log) { return std::isfinite(v) && (!log || v > 0); }

Axis make_axis(const std::vector<double>& values, bool log) {
    Axis a;
    a.log = log;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (double v : values) {
        lo = std::min(lo, a.map(v));
        hi = std::max(hi, a.map(v));
    }
    if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) {
        lo -= log ? 0.5 : std::max(1.0, std::abs(lo)) * 0.5;
        hi += log ? 0.5 : std::max(1.0, std::abs(hi)) * 0.5;
    }
    const double pad = 0.04 * (hi - lo);
    a.lo = lo - pad;
    a.hi = hi + pad;
    return a;
}

} // namespace

std::string render_svg(const Figure& fig) {
    std::vector<double> xs, ys;
    for (const auto& s : fig.series)
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i)
            if (usable(s.x[i], fig.log_x) && usable(s.y[i], fig.log_y)) {
                xs.push_back(s.x[i]);
                ys.push_back(s.y[i]);
            }
    if (xs.empty()) throw std::runtime_error("plot has no drawable points");
    const Axis ax = make_axis(xs, fig.log_x), ay = make_axis(ys, fig.log_y);
    const double pw = W - L - R, ph = H - T - B;
    auto px = [&](double v) { return L + ax.frac(v) * pw; };
    auto py = [&](double v) { return T + (1.0 - ay.frac(v)) * ph; };

    std::string s;
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(W) + "\" height=\"" + num(H) +
         "\" viewBox=\"0 0 " + num(W) + " " + num(H) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s += "<text x=\"" + num(L + pw / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" + esc(fig.title) + "</text>\n";
    s += "<rect x=\"" + num(L) + "\" y=\"" + num(T) + "\" width=\"" + num(pw) + "\" height=\"" + num(ph) +
         "\" fill=\"none\" stroke=\"black\"/>\n";
    for (double t : ax.ticks()) {
        const double x = px(t);
        s += "<line x1=\"" + num(x) + "\" y1=\"" + num(T) + "\" x2=\"" + num(x) + "\" y2=\"" + num(T + ph) +
             "\" stroke=\"#ddd\"/>\n";
        s += "<text x=\"" + num(x) + "\" y=\"" + num(T + ph + 16) + "\" text-anchor=\"middle\">" + tick_label(t) + "</text>\n";
    }
    for (double t : ay.ticks()) {
        const double y = py(t);
        s += "<line x1=\"" + num(L) + "\" y1=\"" + num(y) + "\" x2=\"" + num(L + pw) + "\" y2=\"" + num(y) +
             "\" stroke=\"#ddd\"/>\n";
        s += "<text x=\"" + num(L - 6) + "\" y=\"" + num(y + 4) + "\" text-anchor=\"end\">" + tick_label(t) + "</text>\n";
    }
    s += "<text x=\"" + num(L + pw / 2) + "\" y=\"" + num(H - 16) + "\" text-anchor=\"middle\">" + esc(fig.x_label) +
         (fig.log_x ? " (log)" : "") + "</text>\n";
    s += "<text transform=\"translate(18," + num(T + ph / 2) + ") rotate(-90)\" text-anchor=\"middle\">" +
         esc(fig.y_label) + (fig.log_y ? " (log)" : "") + "</text>\n";

    for (std::size_t k = 0; k < fig.series.size(); ++k) {
        const auto& ser = fig.series[k];
        const std::string color = palette[k % (sizeof palette / sizeof palette[0])];
        std::string pts;
        for (std::size_t i = 0; i < ser.x.size() && i < ser.y.size(); ++i)
            if (usable(ser.x[i], fig.log_x) && usable(ser.y[i], fig.log_y))
                pts += num(px(ser.x[i])) + "," + num(py(ser.y[i])) + " ";
        if (pts.empty()) continue;
        s += "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
        const double ly = T + 14 + 18 * static_cast<double>(k);
        s += "<line x1=\"" + num(L + pw + 10) + "\" y1=\"" + num(ly - 4) + "\" x2=\"" + num(L + pw + 30) + "\" y2=\"" +
             num(ly - 4) + "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
        s += "<text x=\"" + num(L + pw + 34) + "\" y=\"" + num(ly) + "\">" + esc(ser.label) + "</text>\n";
    }
    s += "</svg>\n";
    return s;
}

} // namespace hpcli
