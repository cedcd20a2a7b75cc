#include "tclsim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tclsim {

namespace {

std::size_t index_at_or_after(const std::vector<double>& t, double x) {
    return static_cast<std::size_t>(std::lower_bound(t.begin(), t.end(), x - 1e-9) - t.begin());
}

double mean_over(const PowerTrace& trace, double w0, double w1) {
    const std::size_t i0 = index_at_or_after(trace.t_min, w0);
    std::size_t i1 = index_at_or_after(trace.t_min, w1);
    if (i1 < trace.size() && trace.t_min[i1] <= w1 + 1e-9) {
        ++i1; // inclusive right edge
    }
    if (i0 >= i1) {
        throw std::invalid_argument("steady window contains no samples");
    }
    double sum = 0.0;
    for (std::size_t i = i0; i < i1; ++i) {
        sum += trace.power_mw[i];
    }
    return sum / static_cast<double>(i1 - i0);
}

// First crossing of `level` between consecutive samples in [i0, end), moving
// in the direction given by sign(to - from); linear interpolation in time.
struct Crossing {
    bool found = false;
    double t = 0.0;
};

Crossing first_crossing(const PowerTrace& trace, std::size_t i0, std::size_t i1, double level,
                        bool downward) {
    for (std::size_t i = i0 + 1; i < i1; ++i) {
        const double a = trace.power_mw[i - 1];
        const double b = trace.power_mw[i];
        const bool crossed = downward ? (a > level && b <= level) : (a < level && b >= level);
        if (crossed) {
            const double f = a == b ? 1.0 : (level - a) / (b - a);
            return {true, trace.t_min[i - 1] + f * (trace.t_min[i] - trace.t_min[i - 1])};
        }
    }
    return {false, 0.0};
}

} // namespace

double steady_power(const PowerTrace& trace, double w0, double w1) {
    if (trace.size() == 0 || w0 < trace.t_min.front() - 1e-9 ||
        w1 > trace.t_min.back() + 1e-9 || w1 <= w0) {
        throw std::invalid_argument("steady window outside trace");
    }
    for (const TraceEvent& ev : trace.events) {
        if (ev.t > w0 + 1e-9 && ev.t < w1 - 1e-9) {
            throw std::invalid_argument("steady window overlaps event at t=" +
                                        std::to_string(ev.t));
        }
    }
    return mean_over(trace, w0, w1);
}

double power_at(const PowerTrace& trace, double t) {
    const auto& ts = trace.t_min;
    if (t <= ts.front()) {
        return trace.power_mw.front();
    }
    if (t >= ts.back()) {
        return trace.power_mw.back();
    }
    const std::size_t i = index_at_or_after(ts, t);
    if (ts[i] == t || i == 0) {
        return trace.power_mw[i];
    }
    const double f = (t - ts[i - 1]) / (ts[i] - ts[i - 1]);
    return trace.power_mw[i - 1] + f * (trace.power_mw[i] - trace.power_mw[i - 1]);
}

double integrate_power(const PowerTrace& trace, double a, double b) {
    if (b <= a) {
        return 0.0;
    }
    const auto& ts = trace.t_min;
    if (a < ts.front() - 1e-9 || b > ts.back() + 1e-9) {
        throw std::invalid_argument("integration window outside trace");
    }
    double sum = 0.0;
    double t_prev = a;
    double p_prev = power_at(trace, a);
    for (std::size_t i = index_at_or_after(ts, a); i < ts.size() && ts[i] < b; ++i) {
        if (ts[i] <= t_prev) {
            continue;
        }
        sum += 0.5 * (p_prev + trace.power_mw[i]) * (ts[i] - t_prev);
        t_prev = ts[i];
        p_prev = trace.power_mw[i];
    }
    sum += 0.5 * (p_prev + power_at(trace, b)) * (b - t_prev);
    return sum;
}

int switch_count(const std::vector<double>& t_min, const std::vector<Mode>& mode, double w0,
                 double w1) {
    int count = 0;
    for (std::size_t i = 1; i < t_min.size(); ++i) {
        if (t_min[i] < w0 || t_min[i] > w1) {
            continue;
        }
        if (mode[i] != mode[i - 1]) {
            ++count;
        }
    }
    return count;
}

int oscillation_count(const std::vector<double>& t, const std::vector<double>& x, double t0,
                      double t1, double center, double threshold, bool drop_first) {
    // Collect the sign sequence of threshold-exceeding runs, then count
    // alternations. Dropping the first run removes the commanded excursion
    // both from the count and from being anyone's predecessor.
    std::vector<int> runs;
    int cur = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < t0 || t[i] > t1) {
            continue;
        }
        const double d = x[i] - center;
        const int s = d > threshold ? 1 : d < -threshold ? -1 : 0;
        if (s == 0) {
            cur = 0;
            continue;
        }
        if (s != cur) {
            runs.push_back(s);
            cur = s;
        }
    }
    const std::size_t start = drop_first && !runs.empty() ? 1 : 0;
    int flips = 0;
    for (std::size_t i = start + 1; i < runs.size(); ++i) {
        if (runs[i] == -runs[i - 1]) {
            ++flips;
        }
    }
    return flips;
}

std::vector<double> moving_average(const std::vector<double>& t, const std::vector<double>& x,
                                   double width) {
    std::vector<double> out(x.size());
    const double half = 0.5 * width;
    std::size_t lo = 0;
    std::size_t hi = 0;
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        while (hi < x.size() && t[hi] <= t[i] + half) {
            sum += x[hi];
            ++hi;
        }
        while (lo < hi && t[lo] < t[i] - half) {
            sum -= x[lo];
            ++lo;
        }
        out[i] = sum / static_cast<double>(hi - lo);
    }
    return out;
}

PulseMetrics pulse_metrics(const PowerTrace& trace, double event_t, PulseOptions opts) {
    PulseMetrics m;
    if (trace.size() < 3) {
        throw std::invalid_argument("trace too short");
    }
    const double t_begin = trace.t_min.front();
    const double t_end =
        opts.horizon_min > 0.0 ? std::min(trace.t_min.back(), event_t + opts.horizon_min)
                               : trace.t_min.back();

    const double w0 = std::max(t_begin, event_t - opts.steady_window_min);
    m.p_steady = mean_over(trace, w0, event_t - 1e-9);
    m.final_steady = mean_over(trace, std::max(event_t, t_end - opts.final_window_min), t_end);

    // Extremum of the initial excursion.
    const std::size_t i0 = index_at_or_after(trace.t_min, event_t);
    const std::size_t i1 = index_at_or_after(trace.t_min, t_end + 1e-9);
    double lo = trace.power_mw[i0];
    double hi = trace.power_mw[i0];
    std::size_t lo_at = i0;
    std::size_t hi_at = i0;
    for (std::size_t i = i0; i < i1; ++i) {
        if (trace.power_mw[i] < lo) {
            lo = trace.power_mw[i];
            lo_at = i;
        }
        if (trace.power_mw[i] > hi) {
            hi = trace.power_mw[i];
            hi_at = i;
        }
    }
    const bool down = m.p_steady - lo >= hi - m.p_steady;
    m.direction = down ? Direction::Down : Direction::Up;
    m.depth = down ? m.p_steady - lo : hi - m.p_steady;
    const std::size_t ext_at = down ? lo_at : hi_at;

    // Width of the initial excursion at half depth.
    const double half = down ? m.p_steady - 0.5 * m.depth : m.p_steady + 0.5 * m.depth;
    const Crossing in = first_crossing(trace, i0 == 0 ? 0 : i0 - 1, ext_at + 1, half, down);
    const Crossing out = first_crossing(trace, ext_at, i1, half, !down);
    if (in.found && out.found) {
        m.width_at_half = out.t - in.t;
    }

    // First counter-excursion after the extremum.
    double reb = trace.power_mw[ext_at];
    for (std::size_t i = ext_at; i < i1; ++i) {
        reb = down ? std::max(reb, trace.power_mw[i]) : std::min(reb, trace.power_mw[i]);
    }
    m.rebound_peak = reb;

    // Settling: first time after which the smoothed power stays within
    // settle_tol * p_steady of final_steady for settle_hold consecutive
    // minutes.
    const double tol = opts.settle_tol * m.p_steady;
    {
        const std::vector<double> smooth =
            opts.smooth_min > 0.0 ? moving_average(trace.t_min, trace.power_mw, opts.smooth_min)
                                  : trace.power_mw;
        double run_start = -1.0;
        bool done = false;
        for (std::size_t i = i0; i < i1 && !done; ++i) {
            if (std::abs(smooth[i] - m.final_steady) < tol) {
                if (run_start < 0.0) {
                    run_start = trace.t_min[i];
                }
                if (trace.t_min[i] - run_start >= opts.settle_hold_min) {
                    m.settled = true;
                    m.settling_time = run_start - event_t;
                    done = true;
                }
            } else {
                run_start = -1.0;
            }
        }
    }

    const double settle_end =
        m.settled ? event_t + m.settling_time + opts.settle_hold_min : t_end;
    m.oscillation_index =
        oscillation_count(trace.t_min, trace.power_mw, event_t, m.settled ? settle_end : t_end,
                          m.final_steady, opts.osc_threshold * m.p_steady, true);
    m.net_energy_delta_mwh =
        (integrate_power(trace, event_t, settle_end) - m.p_steady * (settle_end - event_t)) /
        60.0;
    return m;
}

double no_go_gap(const PowerTrace& trace, double t0, double t_p) {
    const double w_st = steady_power(trace, t0 - t_p, t0) * t_p;
    const double w_tot = integrate_power(trace, t0, t0 + t_p);
    return std::abs(w_tot - w_st) / w_st;
}

MeanFieldConstants mean_field_constants(const Ensemble& e) {
    MeanFieldConstants mf;
    for (const TclParams& p : e.params) {
        mf.alpha += 60.0 * p.C / p.eta;
        mf.beta -= 1.0 / (p.R * p.eta);
    }
    mf.gamma = e.spec.theta_amb;
    return mf;
}

double mean_field_residual(const PowerTrace& trace, const MeanFieldConstants& mf) {
    if (trace.size() < 3) {
        throw std::invalid_argument("trace shorter than 3 samples");
    }
    double r2 = 0.0;
    double p2 = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 1; i + 1 < trace.size(); ++i) {
        const double h2 = trace.t_min[i + 1] - trace.t_min[i - 1];
        const double dtheta = (trace.mean_theta[i + 1] - trace.mean_theta[i - 1]) / h2;
        const double p_kw = trace.power_mw[i] * 1000.0;
        const double r = mf.alpha * dtheta + p_kw - mf.beta * (trace.mean_theta[i] - mf.gamma);
        r2 += r * r;
        p2 += p_kw * p_kw;
        ++count;
    }
    if (count == 0 || p2 == 0.0) {
        throw std::invalid_argument("degenerate trace");
    }
    return std::sqrt(r2 / static_cast<double>(count)) / std::sqrt(p2 / static_cast<double>(count));
}

} // namespace tclsim
