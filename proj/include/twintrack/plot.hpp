#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "twintrack/errors.hpp"
#include "twintrack/trace.hpp"

namespace twintrack::plot {

struct Series {
    std::string label;
    std::string color;
    std::vector<double> y;
};

namespace detail {

inline void panel(std::ostream& out, double ox, double oy, double w, double h,
                  const std::string& title, const std::vector<double>& x,
                  const std::vector<Series>& series) {
    double ymin = 1e300, ymax = -1e300;
    for (const auto& s : series)
        for (double v : s.y) {
            ymin = std::min(ymin, v);
            ymax = std::max(ymax, v);
        }
    if (!(ymax > ymin)) {
        ymax = ymin + 1.0;
        ymin -= 1.0;
    }
    const double pad = 0.05 * (ymax - ymin);
    ymin -= pad;
    ymax += pad;
    const double xmin = x.front(), xmax = x.back();

    out << "<rect x='" << ox << "' y='" << oy << "' width='" << w << "' height='" << h
        << "' fill='white' stroke='#888'/>\n";
    out << "<text x='" << ox + 4 << "' y='" << oy + 14
        << "' font-size='12' font-family='sans-serif'>" << title << "</text>\n";

    auto sx = [&](double v) { return ox + (v - xmin) / (xmax - xmin) * w; };
    auto sy = [&](double v) { return oy + h - (v - ymin) / (ymax - ymin) * h; };

    if (ymin < 0.0 && ymax > 0.0)
        out << "<line x1='" << ox << "' y1='" << sy(0.0) << "' x2='" << ox + w << "' y2='"
            << sy(0.0) << "' stroke='#ccc'/>\n";

    int li = 0;
    for (const auto& s : series) {
        out << "<polyline fill='none' stroke='" << s.color << "' stroke-width='1' points='";
        for (size_t i = 0; i < x.size(); ++i)
            out << sx(x[i]) << ',' << sy(s.y[i]) << ' ';
        out << "'/>\n";
        out << "<text x='" << ox + w - 4 << "' y='" << oy + 14 + 12 * li++
            << "' font-size='10' text-anchor='end' fill='" << s.color
            << "' font-family='sans-serif'>" << s.label << "</text>\n";
    }
    out << "<text x='" << ox + 4 << "' y='" << oy + h - 4
        << "' font-size='9' font-family='sans-serif'>[" << ymin << ", " << ymax
        << "]</text>\n";
}

}  // namespace detail

/// Writes a static SVG with the CP panel set (v_x, yaw rate, beta, a_x)
/// and the per-wheel panel set (lambda, tau, eps, F_z).
inline void emit_plots(const Trace& trace, const std::string& path) {
    if (trace.rows.empty()) throw ConfigError("emit_plots: empty trace");
    std::ofstream out(path);
    if (!out) throw ConfigError("emit_plots: cannot open " + path);

    std::vector<double> t;
    for (const auto& r : trace.rows) t.push_back(r.t);
    auto col = [&](std::function<double(const TraceRow&)> f) {
        std::vector<double> v;
        v.reserve(trace.rows.size());
        for (const auto& r : trace.rows) v.push_back(f(r));
        return v;
    };
    static const char* wheel_colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728"};
    static const char* wheel_names[] = {"FL", "FR", "RL", "RR"};

    const double pw = 440, ph = 170, gap = 14;
    const double width = 2 * pw + 3 * gap, height = 4 * ph + 5 * gap;
    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width << "' height='"
        << height << "'>\n<rect width='100%' height='100%' fill='#fafafa'/>\n";

    auto wheel_series = [&](std::function<double(const TraceRow&, int)> f) {
        std::vector<Series> s;
        for (int i = 0; i < kNumWheels; ++i)
            s.push_back({wheel_names[i], wheel_colors[i],
                         col([&, i](const TraceRow& r) { return f(r, i); })});
        return s;
    };

    double y = gap;
    detail::panel(out, gap, y, pw, ph, "v_x [m/s]", t,
                  {{"v_x", "#1f77b4", col([](const TraceRow& r) { return r.vx; })},
                   {"v_x ref", "#d62728", col([](const TraceRow& r) { return r.vx_ref; })}});
    detail::panel(out, 2 * gap + pw, y, pw, ph, "yaw rate [rad/s]", t,
                  {{"psi_dot", "#1f77b4", col([](const TraceRow& r) { return r.yaw_rate; })},
                   {"ref", "#d62728", col([](const TraceRow& r) { return r.yaw_rate_ref; })}});
    y += ph + gap;
    detail::panel(out, gap, y, pw, ph, "beta [rad]", t,
                  {{"beta", "#1f77b4", col([](const TraceRow& r) { return r.beta; })}});
    detail::panel(out, 2 * gap + pw, y, pw, ph, "a_x [m/s^2]", t,
                  {{"a_x", "#1f77b4", col([](const TraceRow& r) { return r.ax; })},
                   {"a_x ref", "#d62728", col([](const TraceRow& r) { return r.ax_ref; })}});
    y += ph + gap;
    detail::panel(out, gap, y, pw, ph, "lambda", t,
                  wheel_series([](const TraceRow& r, int i) { return r.lambda[i]; }));
    detail::panel(out, 2 * gap + pw, y, pw, ph, "tau [N m]", t,
                  wheel_series([](const TraceRow& r, int i) { return r.tau[i]; }));
    y += ph + gap;
    detail::panel(out, gap, y, pw, ph, "eps", t,
                  wheel_series([](const TraceRow& r, int i) { return r.eps[i]; }));
    detail::panel(out, 2 * gap + pw, y, pw, ph, "F_z [N]", t,
                  wheel_series([](const TraceRow& r, int i) { return r.fz[i]; }));

    out << "</svg>\n";
}

}  // namespace twintrack::plot
