#include "tclsim/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace tclsim {

namespace {

constexpr int kPanelW = 560;
constexpr int kPanelH = 240;
constexpr int kMarginL = 64;
constexpr int kMarginR = 16;
constexpr int kMarginT = 28;
constexpr int kMarginB = 40;

struct Range {
    double lo = 0.0;
    double hi = 1.0;
    double map(double x, double px0, double px1) const {
        return px0 + (x - lo) / (hi - lo) * (px1 - px0);
    }
};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

class Panel {
public:
    Panel(std::ostringstream& out, int x0, int y0, std::string title, Range tx, Range ty)
        : out_(out), x0_(x0), y0_(y0), tx_(tx), ty_(ty) {
        out_ << "<g class=\"panel\" transform=\"translate(" << x0_ << "," << y0_ << ")\">\n";
        out_ << "<rect x=\"" << kMarginL << "\" y=\"" << kMarginT << "\" width=\"" << plot_w()
             << "\" height=\"" << plot_h()
             << "\" fill=\"white\" stroke=\"#444\" stroke-width=\"1\"/>\n";
        out_ << "<text x=\"" << kMarginL << "\" y=\"" << kMarginT - 8
             << "\" font-family=\"sans-serif\" font-size=\"13\">" << title << "</text>\n";
        axis_labels();
    }
    ~Panel() { out_ << "</g>\n"; }

    void polyline(const std::vector<double>& t, const std::vector<double>& v, std::size_t i0,
                  std::size_t i1, const char* color) {
        out_ << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.2\" points=\"";
        const std::size_t n = i1 - i0;
        const std::size_t step = std::max<std::size_t>(1, n / 1200);
        for (std::size_t i = i0; i < i1; i += step) {
            out_ << num(px(t[i])) << "," << num(py(v[i])) << " ";
        }
        if (n > 0 && (n - 1) % step != 0) {
            out_ << num(px(t[i1 - 1])) << "," << num(py(v[i1 - 1]));
        }
        out_ << "\"/>\n";
    }

    void hguide(double y, const char* color, const char* dash) {
        if (y < ty_.lo || y > ty_.hi) {
            return;
        }
        out_ << "<line x1=\"" << kMarginL << "\" y1=\"" << num(py(y)) << "\" x2=\""
             << kMarginL + plot_w() << "\" y2=\"" << num(py(y)) << "\" stroke=\"" << color
             << "\" stroke-width=\"1\" stroke-dasharray=\"" << dash << "\"/>\n";
    }

    void vguide(double x, const char* color) {
        if (x < tx_.lo || x > tx_.hi) {
            return;
        }
        out_ << "<line x1=\"" << num(px(x)) << "\" y1=\"" << kMarginT << "\" x2=\"" << num(px(x))
             << "\" y2=\"" << kMarginT + plot_h()
             << "\" stroke=\"" << color << "\" stroke-width=\"1\" stroke-dasharray=\"2,3\"/>\n";
    }

private:
    int plot_w() const { return kPanelW - kMarginL - kMarginR; }
    int plot_h() const { return kPanelH - kMarginT - kMarginB; }
    double px(double x) const {
        return tx_.map(x, kMarginL, kMarginL + plot_w());
    }
    double py(double y) const {
        return ty_.map(y, kMarginT + plot_h(), kMarginT);
    }
    void axis_labels() {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.0f", tx_.lo);
        out_ << "<text x=\"" << kMarginL << "\" y=\"" << kPanelH - 20
             << "\" font-family=\"sans-serif\" font-size=\"11\">" << buf << "</text>\n";
        std::snprintf(buf, sizeof(buf), "%.0f min", tx_.hi);
        out_ << "<text x=\"" << kMarginL + plot_w() << "\" y=\"" << kPanelH - 20
             << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << buf
             << "</text>\n";
        std::snprintf(buf, sizeof(buf), "%.1f", ty_.lo);
        out_ << "<text x=\"" << kMarginL - 6 << "\" y=\"" << kMarginT + plot_h()
             << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << buf
             << "</text>\n";
        std::snprintf(buf, sizeof(buf), "%.1f", ty_.hi);
        out_ << "<text x=\"" << kMarginL - 6 << "\" y=\"" << kMarginT + 10
             << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << buf
             << "</text>\n";
    }

    std::ostringstream& out_;
    int x0_;
    int y0_;
    Range tx_;
    Range ty_;
};

struct Window {
    double t0;
    double t1;
    std::string title;
};

Range value_range(const std::vector<double>& t, const std::vector<double>& v, double t0,
                  double t1) {
    Range r{1e300, -1e300};
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < t0 || t[i] > t1) {
            continue;
        }
        r.lo = std::min(r.lo, v[i]);
        r.hi = std::max(r.hi, v[i]);
    }
    if (r.lo > r.hi) {
        r = {0.0, 1.0};
    }
    const double pad = std::max(0.05 * (r.hi - r.lo), 1e-6);
    return {r.lo - pad, r.hi + pad};
}

std::pair<std::size_t, std::size_t> sample_span(const std::vector<double>& t, double t0,
                                                double t1) {
    std::size_t i0 = 0;
    while (i0 < t.size() && t[i0] < t0) {
        ++i0;
    }
    std::size_t i1 = i0;
    while (i1 < t.size() && t[i1] <= t1) {
        ++i1;
    }
    return {i0, i1};
}

} // namespace

std::string render_svg(const PowerTrace& trace, const std::vector<DeviceProbe>& probes) {
    std::vector<Window> windows;
    if (trace.events.empty()) {
        windows.push_back({trace.t_min.empty() ? 0.0 : trace.t_min.front(),
                           trace.t_min.empty() ? 1.0 : trace.t_min.back(), "aggregate power"});
    } else {
        for (const TraceEvent& ev : trace.events) {
            windows.push_back({std::max(trace.t_min.front(), ev.t - 30.0),
                               std::min(trace.t_min.back(), ev.t + 150.0),
                               "aggregate power: " + ev.label});
        }
    }

    const int cols = static_cast<int>(windows.size());
    const int probe_rows = probes.empty() ? 0 : 1;
    const int width = cols * kPanelW;
    const int height = (1 + probe_rows) * kPanelH;

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    out << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"#fafafa\"/>\n";

    for (int c = 0; c < cols; ++c) {
        const Window& w = windows[static_cast<std::size_t>(c)];
        const Range ty = value_range(trace.t_min, trace.power_mw, w.t0, w.t1);
        Panel panel(out, c * kPanelW, 0, w.title + " [MW]", {w.t0, w.t1}, ty);
        const auto [i0, i1] = sample_span(trace.t_min, w.t0, w.t1);
        if (i1 > i0) {
            panel.polyline(trace.t_min, trace.power_mw, i0, i1, "#1f77b4");
        }
        for (const TraceEvent& ev : trace.events) {
            panel.vguide(ev.t, "#888");
        }
    }

    if (!probes.empty()) {
        for (int c = 0; c < cols; ++c) {
            const Window& w = windows[static_cast<std::size_t>(c)];
            Range ty{1e300, -1e300};
            for (const DeviceProbe& probe : probes) {
                const Range r = value_range(probe.t_min, probe.theta, w.t0, w.t1);
                ty.lo = std::min(ty.lo, r.lo);
                ty.hi = std::max(ty.hi, r.hi);
            }
            for (const DeviceProbe& probe : probes) {
                if (!probe.band_lo.empty()) {
                    ty.lo = std::min(ty.lo, probe.band_lo.front() - 0.1);
                    ty.hi = std::max(ty.hi, probe.band_hi.front() + 0.1);
                }
            }
            Panel panel(out, c * kPanelW, kPanelH, "probe temperature [degC]", {w.t0, w.t1}, ty);
            const char* colors[] = {"#d62728", "#2ca02c", "#9467bd", "#8c564b"};
            std::size_t ci = 0;
            for (const DeviceProbe& probe : probes) {
                const auto [i0, i1] = sample_span(probe.t_min, w.t0, w.t1);
                if (i1 > i0) {
                    panel.polyline(probe.t_min, probe.theta, i0, i1,
                                   colors[ci % std::size(colors)]);
                }
                // Deadband limits as horizontal guides.
                if (!probe.band_lo.empty()) {
                    panel.hguide(probe.band_lo.front(), "#555", "4,3");
                    panel.hguide(probe.band_hi.front(), "#555", "4,3");
                }
                ++ci;
            }
            for (const TraceEvent& ev : trace.events) {
                panel.vguide(ev.t, "#888");
            }
        }
    }

    out << "</svg>\n";
    return out.str();
}

void emit_svg(const PowerTrace& trace, const std::vector<DeviceProbe>& probes,
              const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write " + path);
    }
    out << render_svg(trace, probes);
}

} // namespace tclsim
