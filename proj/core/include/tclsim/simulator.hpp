#pragma once

#include "tclsim/analysis.hpp"
#include "tclsim/population.hpp"
#include "tclsim/protocol.hpp"

#include <cstdint>
#include <vector>

namespace tclsim {

/// Sampled series of one probed device.
struct DeviceProbe {
    std::int64_t device = 0;
    std::vector<double> t_min;
    std::vector<double> theta;
    std::vector<Mode> mode;
    std::vector<double> band_lo;
    std::vector<double> band_hi;
};

/// Steps an ensemble forward in fixed dt increments. Devices are independent
/// between barriers, so stepping is data-parallel across devices; commands,
/// sampling and aggregation happen at step barriers only. Results are
/// bit-identical for any thread count: each device's trajectory is a pure
/// function of (spec, seed, schedule, dt), and reductions run in device order.
class Simulator {
public:
    Simulator(const PopulationSpec& spec, double dt_min, int threads = 1);

    /// Uncorrelated steady-state initialization: analytic phase placement
    /// followed by a noisy burn-in of twice the mean cycle period. Leaves the
    /// clock at t = 0.
    void init_steady_state();

    /// Install a broadcast command at the current time. Throws ScenarioError
    /// if any targeted device is still executing a previous program.
    void install(const Command& cmd, std::uint64_t event_index);

    /// Advance n steps (no recording).
    void advance_steps(std::int64_t n);

    double time_min() const { return static_cast<double>(step_ - step_zero_) * dt_; }
    double dt() const { return dt_; }
    int threads() const { return threads_; }

    Ensemble& ensemble() { return ens_; }
    const Ensemble& ensemble() const { return ens_; }

    double mean_period() const { return mean_period_; }

    /// Track the largest temperature exceedance beyond each device's customer
    /// band, in units of that device's one-step boundary drift. A value <= 1
    /// means no device ever left its band by more than one step's drift.
    void enable_band_monitor(bool on) { band_monitor_ = on; }
    double band_excursion_steps() const { return band_excursion_steps_; }

    /// True when every controller is back on Baseline.
    bool all_baseline() const;

private:
    /// Step devices [d0, d1) through steps [k0, k1); returns the chunk's worst
    /// band excursion (in one-step-drift units) when the monitor is on.
    double run_range(std::size_t d0, std::size_t d1, std::int64_t k0, std::int64_t k1);

    Ensemble ens_;
    double dt_;
    int threads_;
    std::int64_t step_ = 0;      // absolute step counter, RNG key
    std::int64_t step_zero_ = 0; // step index corresponding to t = 0
    double mean_period_ = 0.0;
    bool band_monitor_ = false;
    double band_excursion_steps_ = 0.0;
    std::vector<double> fp_on_;      // per-device ON fixed point
    std::vector<double> decay_;      // exp(-dt / tau) per device
    std::vector<double> sig_sqdt_;   // noise_sigma * sqrt(dt) per device
    std::vector<double> step_drift_; // one-step drift at the band edges, degC
};

} // namespace tclsim
