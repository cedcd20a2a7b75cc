#pragma once

#include <cmath>
#include <cstdint>

namespace tclsim {

enum class Mode : std::uint8_t { Off = 0, On = 1 };

/// Physical constants of one thermostatically controlled load (cooling).
/// Units: C in kWh/degC, R in degC/kW, P in kW, noise_sigma in degC/min^0.5.
/// C*R is in hours; all simulation times are in minutes.
struct TclParams {
    double C = 3.0;           // thermal capacitance, kWh/degC
    double R = 2.0;           // thermal resistance, degC/kW
    double P = 14.0;          // cooling power while ON, kW
    double eta = 1.0;         // efficiency: grid power = P / eta
    double theta_amb = 32.0;  // ambient temperature, degC
    double noise_sigma = 0.0; // temperature noise intensity, degC/min^0.5
};

/// Hysteresis band [lo, hi]; the thermostat does not switch inside it.
struct Deadband {
    double lo = 19.5;
    double hi = 20.5;

    double width() const { return hi - lo; }
    double setpoint() const { return 0.5 * (lo + hi); }
    bool valid() const { return std::isfinite(lo) && std::isfinite(hi) && lo < hi; }
    Deadband shifted(double delta) const { return {lo + delta, hi + delta}; }
};

struct TclState {
    double theta = 20.0; // degC
    Mode mode = Mode::Off;
};

/// Noise-free cycle decomposition of a steady thermostat cycle.
struct CycleTimes {
    double t_off = 0.0;  // minutes spent warming from lo to hi
    double t_on = 0.0;   // minutes spent cooling from hi to lo
    double period = 0.0; // t_off + t_on
    double duty = 0.0;   // t_on / period
};

/// Thermal time constant C*R converted to minutes.
inline double time_constant_min(const TclParams& p) { return 60.0 * p.C * p.R; }

/// Temperature each branch relaxes toward: ambient when OFF, ambient - P*R when ON.
inline double branch_fixed_point(Mode mode, const TclParams& p) {
    return mode == Mode::On ? p.theta_amb - p.P * p.R : p.theta_amb;
}

/// Exact solution of the per-branch linear ODE over dt minutes. No switching.
inline double drift(double theta, Mode mode, const TclParams& p, double dt_min) {
    const double fp = branch_fixed_point(mode, p);
    return fp + (theta - fp) * std::exp(-dt_min / time_constant_min(p));
}

/// Thermostat rule: OFF->ON at or above hi, ON->OFF at or below lo, else unchanged.
inline Mode hysteresis(double theta, Mode mode, const Deadband& band) {
    if (mode == Mode::Off) {
        return theta >= band.hi ? Mode::On : Mode::Off;
    }
    return theta <= band.lo ? Mode::Off : Mode::On;
}

/// One atomic update: exact drift, additive Gaussian noise, then hysteresis.
/// noise_z is a standard normal sample supplied by the caller.
inline TclState step(TclState s, const TclParams& p, const Deadband& band, double dt_min,
                     double noise_z) {
    double theta = drift(s.theta, s.mode, p, dt_min);
    if (p.noise_sigma > 0.0) {
        theta += p.noise_sigma * std::sqrt(dt_min) * noise_z;
    }
    return {theta, hysteresis(theta, s.mode, band)};
}

/// A band is usable only if both branch fixed points lie strictly outside it:
/// theta_amb above hi (OFF leg can always warm up) and theta_amb - P*R below lo
/// (ON leg can always cool down). Keeps the duty cycle strictly inside (0, 1).
inline bool band_feasible(const TclParams& p, const Deadband& band) {
    return band.valid() && p.theta_amb - p.P * p.R < band.lo && band.hi < p.theta_amb;
}

/// Closed-form noise-free cycle times.
///   t_off = C*R * ln((theta_amb - lo) / (theta_amb - hi))
///   t_on  = C*R * ln((hi - theta_amb + P*R) / (lo - theta_amb + P*R))
inline CycleTimes cycle_times(const TclParams& p, const Deadband& band) {
    const double tau = time_constant_min(p);
    const double fp_on = branch_fixed_point(Mode::On, p);
    CycleTimes ct;
    ct.t_off = tau * std::log((p.theta_amb - band.lo) / (p.theta_amb - band.hi));
    ct.t_on = tau * std::log((band.hi - fp_on) / (band.lo - fp_on));
    ct.period = ct.t_off + ct.t_on;
    ct.duty = ct.t_on / ct.period;
    return ct;
}

/// Power drawn from the grid: P/eta while ON, zero while OFF.
inline double grid_power_kw(Mode mode, const TclParams& p) {
    return mode == Mode::On ? p.P / p.eta : 0.0;
}

inline double grid_power_kw(const TclState& s, const TclParams& p) {
    return grid_power_kw(s.mode, p);
}

} // namespace tclsim
