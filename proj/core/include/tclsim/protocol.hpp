#pragma once

#include "tclsim/model.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

// Broadcast commands and the per-device embedded controller that executes
// them. Controllers are open loop: controller_step reads only the device's
// own memory, temperature, mode and the wall clock, never any aggregate.

namespace tclsim {

enum class Direction : std::uint8_t {
    Down, // reduce grid power (switch ON devices OFF)
    Up,   // increase grid power (mirror)
};

/// Force every device into target_mode for hold_min minutes, then release.
/// This is the unsafe baseline that produces cold load pickup.
struct UnsafeHold {
    Mode target_mode = Mode::Off;
    double hold_min = 10.0;
    /// What "return to the original state" means at release time:
    /// PreMode restores the mode each device had at install (default),
    /// HysteresisOnly just re-enables the thermostat in whatever mode the
    /// hold left the device.
    enum class Restore : std::uint8_t { PreMode, HysteresisOnly };
    Restore restore = Restore::PreMode;
};

/// Shift every deadband by delta immediately. Unsafe baseline: devices
/// stranded outside the shifted band all switch at once.
struct UnsafeShift {
    double delta = 0.4;
};

/// Safe protocol 1: switch the active branch now, remember the switch
/// temperature, and re-switch autonomously one full cycle later when the
/// device passes its saved temperature on the same branch again.
struct Sp1 {
    Direction direction = Direction::Down;
};

/// Safe protocol 2: shift the deadband by delta, but each device keeps its
/// present mode and old band until it reaches a transition point, then adopts
/// the shifted band. No kinks, no holes, one extra switch per device.
struct Sp2 {
    double delta = 0.4;
};

/// Safe protocol 3: a sharp pulse of width_min minutes. Switched devices hold
/// the pulse branch for exactly width_min and then revert; the other devices
/// delay their next natural switch by width_min via a local timer, which
/// returns the population to the customer bands without a counter-spike.
struct Sp3 {
    Direction direction = Direction::Down;
    double width_min = 3.0;
};

/// Split broadcast: a seeded fraction p of the population runs Sp1 (or Sp3
/// of sp3_width_min, when given) while the rest runs Sp2{delta}. delta > 0
/// produces a negative (power-reducing) pulse, delta < 0 a positive one.
struct Hybrid {
    double p = 0.36;
    double delta = 0.9;
    std::optional<double> sp3_width_min;
};

using Command = std::variant<UnsafeHold, UnsafeShift, Sp1, Sp2, Sp3, Hybrid>;

/// Short stable label, e.g. "sp1_down" or "sp2_delta+0.400".
std::string command_label(const Command& cmd);

enum class Program : std::uint8_t {
    Baseline = 0,
    UnsafeHold,
    Sp1,
    Sp2,
    Sp3,
};

namespace sp1_phase {
inline constexpr std::uint8_t forced = 0;  // on the commanded branch, band unchanged
inline constexpr std::uint8_t mid_leg = 1; // completed the first natural switch
inline constexpr std::uint8_t armed = 2;   // back on the original branch, watching saved_theta
} // namespace sp1_phase

namespace sp3_phase {
inline constexpr std::uint8_t pulse_hold = 0; // switched at install, reverts at deadline
inline constexpr std::uint8_t wait_cross = 1; // unswitched, waiting to reach the old limit
inline constexpr std::uint8_t timer_armed = 2; // crossed the old limit, delaying by width
} // namespace sp3_phase

/// Per-device controller memory. Hot fields first: the Baseline fast path
/// touches only program and the active band.
struct DeviceCtrl {
    Program program = Program::Baseline;
    std::uint8_t phase = 0;
    Direction direction = Direction::Down;
    Mode saved_mode = Mode::Off;
    UnsafeHold::Restore hold_restore = UnsafeHold::Restore::PreMode;
    double band_lo = 19.5; // active band
    double band_hi = 20.5;
    double saved_theta = 0.0; // Sp1: switch temperature recorded at install
    double saved_lo = 0.0;    // Sp2: pre-shift band; Sp3: band to resume on
    double saved_hi = 0.0;
    double tp_lo = 0.0;    // Sp2 transition points
    double tp_hi = 0.0;
    double delta = 0.0;    // Sp2 shift
    double width = 0.0;    // Sp3 pulse width, minutes
    double deadline = 0.0; // UnsafeHold release / Sp3 pulse end or timer expiry

    Deadband active_band() const { return {band_lo, band_hi}; }
};

/// Advance one device's controller at time t_min given its post-drift
/// temperature. Returns the mode for the next interval and updates ctrl in
/// place. Pure in its inputs: no aggregate state, no globals.
inline Mode controller_step(DeviceCtrl& c, double theta, Mode mode, double t_min) {
    switch (c.program) {
    case Program::Baseline:
        return hysteresis(theta, mode, {c.band_lo, c.band_hi});

    case Program::UnsafeHold:
        if (t_min >= c.deadline) {
            c.program = Program::Baseline;
            const Mode restored =
                c.hold_restore == UnsafeHold::Restore::PreMode ? c.saved_mode : mode;
            // The thermostat re-engages on the same step, so devices stranded
            // beyond a limit switch immediately.
            return hysteresis(theta, restored, {c.band_lo, c.band_hi});
        }
        return mode; // hysteresis suppressed for the whole hold

    case Program::Sp1:
        if (c.direction == Direction::Down) {
            switch (c.phase) {
            case sp1_phase::forced: // OFF and warming; normal switch at the top
                if (theta >= c.band_hi) {
                    c.phase = sp1_phase::mid_leg;
                    return Mode::On;
                }
                return mode;
            case sp1_phase::mid_leg: // ON and cooling; normal switch at the bottom
                if (theta <= c.band_lo) {
                    c.phase = sp1_phase::armed;
                    return Mode::Off;
                }
                return mode;
            default: // armed: OFF and warming for the second time
                if (theta >= c.saved_theta) {
                    c.program = Program::Baseline;
                    return Mode::On;
                }
                return mode;
            }
        } else {
            switch (c.phase) {
            case sp1_phase::forced:
                if (theta <= c.band_lo) {
                    c.phase = sp1_phase::mid_leg;
                    return Mode::Off;
                }
                return mode;
            case sp1_phase::mid_leg:
                if (theta >= c.band_hi) {
                    c.phase = sp1_phase::armed;
                    return Mode::On;
                }
                return mode;
            default:
                if (theta <= c.saved_theta) {
                    c.program = Program::Baseline;
                    return Mode::Off;
                }
                return mode;
            }
        }

    case Program::Sp2: {
        const bool hit =
            mode == Mode::On ? theta <= c.tp_lo : theta >= c.tp_hi;
        if (hit) {
            c.band_lo = c.saved_lo + c.delta;
            c.band_hi = c.saved_hi + c.delta;
            c.program = Program::Baseline;
            // Adopt the shifted band and let it act on this very step.
            return hysteresis(theta, mode, {c.band_lo, c.band_hi});
        }
        return mode; // old band inactive until a transition point is reached
    }

    case Program::Sp3:
        switch (c.phase) {
        case sp3_phase::pulse_hold:
            if (t_min >= c.deadline) {
                c.program = Program::Baseline;
                // Unconditional revert; the thermostat takes over next step.
                return c.direction == Direction::Down ? Mode::On : Mode::Off;
            }
            return mode;
        case sp3_phase::wait_cross: {
            const bool crossed = c.direction == Direction::Down ? theta >= c.saved_hi
                                                                : theta <= c.saved_lo;
            if (crossed) {
                c.phase = sp3_phase::timer_armed;
                c.deadline = t_min + c.width;
            }
            return mode; // natural switching suppressed until the timer fires
        }
        default: // timer_armed
            if (t_min >= c.deadline) {
                c.program = Program::Baseline;
                return c.direction == Direction::Down ? Mode::On : Mode::Off;
            }
            return mode;
        }
    }
    return mode;
}

/// Materialized view of one controller, convenient for tests and snapshots.
struct ControllerView {
    Program program;
    std::uint8_t phase;
    Deadband active_band;
    std::optional<double> saved_theta;
    std::optional<Deadband> saved_band;
    std::optional<double> hold_until;
    std::optional<double> timer_deadline;
};

ControllerView view_of(const DeviceCtrl& c);

} // namespace tclsim
