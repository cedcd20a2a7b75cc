#pragma once

#include "tclsim/population.hpp"
#include "tclsim/protocol.hpp"

#include <cstdint>
#include <string>
#include <vector>

// Post-processing of recorded traces: steady levels, pulse shape metrics,
// energy accounting and the ensemble-averaged linear relation between mean
// temperature and aggregate power.

namespace tclsim {

struct TraceEvent {
    double t = 0.0;
    Command command;
    std::string label;
};

/// Uniformly sampled aggregate series plus the event schedule that shaped it.
struct PowerTrace {
    std::vector<double> t_min;
    std::vector<double> power_mw;
    std::vector<double> mean_theta;
    std::vector<double> frac_on;
    std::vector<TraceEvent> events;

    std::size_t size() const { return t_min.size(); }
};

struct PulseMetrics {
    double p_steady = 0.0;      // MW, pre-event level
    double final_steady = 0.0;  // MW, post-transient level (may differ from p_steady)
    Direction direction = Direction::Down;
    double depth = 0.0;          // MW, |extremum - p_steady|
    double width_at_half = 0.0;  // minutes, of the initial excursion
    double rebound_peak = 0.0;   // MW, extreme of the first counter-excursion
    double settling_time = 0.0;  // minutes after the event
    bool settled = false;
    int oscillation_index = 0;
    double net_energy_delta_mwh = 0.0; // integral of (power - p_steady) to settling
};

struct PulseOptions {
    double steady_window_min = 60.0;  // pre-event window for p_steady
    double final_window_min = 30.0;   // tail window for final_steady
    double settle_tol = 0.02;         // fraction of p_steady
    double settle_hold_min = 30.0;    // how long the band must hold
    double osc_threshold = 0.05;      // fraction of p_steady
    double horizon_min = 0.0;         // 0 = analyze to end of trace
    // Settling compares the level, not the finite-population shot noise, so
    // the band test runs on a centered moving average of this width.
    double smooth_min = 5.0;
};

/// Centered moving average of x over a time window of `width` minutes.
std::vector<double> moving_average(const std::vector<double>& t, const std::vector<double>& x,
                                   double width);

/// Mean power over [w0, w1]. Throws std::invalid_argument if an event falls
/// inside the window or the window leaves the trace.
double steady_power(const PowerTrace& trace, double w0, double w1);

/// Linear interpolation of the power series at time t.
double power_at(const PowerTrace& trace, double t);

/// Trapezoid integral of power over [a, b], in MW*min.
double integrate_power(const PowerTrace& trace, double a, double b);

/// Number of mode transitions in a sampled mode series restricted to
/// [w0, w1] (inclusive sample times).
int switch_count(const std::vector<double>& t_min, const std::vector<Mode>& mode, double w0,
                 double w1);

/// Count alternations between threshold-exceeding excursions of x - center:
/// runs of |x - center| > threshold are labeled by sign, and each run whose
/// sign differs from its predecessor's counts one. A single swing therefore
/// scores zero; a damped oscillation scores one per half-wave after the
/// first. drop_first removes the commanded excursion itself before counting.
int oscillation_count(const std::vector<double>& t, const std::vector<double>& x, double t0,
                      double t1, double center, double threshold, bool drop_first);

/// Shape metrics of the response to the event at event_t.
PulseMetrics pulse_metrics(const PowerTrace& trace, double event_t, PulseOptions opts = {});

/// Relative gap |W_tot - W_st| / W_st between the energy consumed over
/// [t0, t0 + t_p] and the undisturbed steady energy p_steady * t_p, with
/// p_steady measured over [t0 - t_p, t0]. For SP-1 on a homogeneous
/// noise-free population the continuum value is exactly zero.
double no_go_gap(const PowerTrace& trace, double t0, double t_p);

/// Constants of the population-averaged linear ODE
///   alpha * d<theta>/dt = -<P> + beta * (<theta> - gamma)
/// with <P> in kW and time in minutes:
///   alpha = 60 * sum_i C_i / eta_i   (kW*min/degC)
///   beta  = -sum_i 1 / (R_i * eta_i) (kW/degC; negative, so steady power
///            beta*(<theta> - theta_amb) is positive below ambient)
///   gamma = theta_amb                (degC)
struct MeanFieldConstants {
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
};

MeanFieldConstants mean_field_constants(const Ensemble& e);

/// RMS of r(t) = alpha * d<theta>/dt + <P> - beta*(<theta> - gamma), with the
/// derivative taken by centered differences, normalized by RMS(<P>).
/// Throws std::invalid_argument for traces shorter than 3 samples.
double mean_field_residual(const PowerTrace& trace, const MeanFieldConstants& mf);

} // namespace tclsim
