#pragma once

#include "tclsim/model.hpp"
#include "tclsim/protocol.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace tclsim {

/// Heterogeneous ensemble definition. C, R, P are sampled independently from
/// lognormal distributions moment-matched to (mean, rel_sigma * mean); the
/// deadband [setpoint - delta_band/2, setpoint + delta_band/2] is shared.
struct PopulationSpec {
    std::int64_t n = 10000;
    double mean_C = 3.0;
    double mean_R = 2.0;
    double mean_P = 14.0;
    double rel_sigma = 0.07;
    double theta_amb = 32.0;
    double setpoint = 20.0;
    double delta_band = 1.0;
    double noise_sigma = 0.052;
    std::uint64_t seed = 20260401;

    Deadband band() const {
        return {setpoint - 0.5 * delta_band, setpoint + 0.5 * delta_band};
    }
};

/// Structure-of-arrays device population plus per-device controller memory.
struct Ensemble {
    PopulationSpec spec;
    std::vector<TclParams> params;
    std::vector<Deadband> customer_band; // the band the customer set; never mutated
    std::vector<double> theta;
    std::vector<Mode> mode;
    std::vector<DeviceCtrl> ctrl;
    std::vector<std::uint32_t> switch_count;          // cumulative mode flips
    std::vector<std::uint32_t> switches_at_complete;  // switch_count when a program finished
    int resample_count = 0; // infeasible lognormal draws that were redrawn
    double time_min = 0.0;

    std::size_t size() const { return theta.size(); }
    TclState state(std::size_t i) const { return {theta[i], mode[i]}; }
};

struct Aggregate {
    double power_mw = 0.0;
    double mean_theta = 0.0;
    double frac_on = 0.0;
};

struct HistogramSnapshot {
    std::vector<double> bin_edges;   // size bins + 1
    std::vector<double> density_on;  // probability density per bin, 1/degC
    std::vector<double> density_off;
};

/// Draw the per-device physical parameters. Deterministic in spec.seed and
/// independent of evaluation order. Draws that violate band feasibility are
/// redrawn (counted via resample_count on the ensemble path); after 100
/// attempts for one device a ScenarioError is raised by validation.
std::vector<std::pair<TclParams, Deadband>> sample_population(const PopulationSpec& spec);

/// Place one device at cycle phase u in [0, 1): ON leg first (u < duty, the
/// temperature reached after u*period of cooling from the top), OFF leg after.
TclState phase_state(const TclParams& p, const Deadband& band, double u);

/// Build the ensemble and place every device at an independent uniformly
/// random phase of its own noise-free cycle. The caller (the simulator) then
/// burns in with noise for twice the mean period before t = 0.
Ensemble make_ensemble(const PopulationSpec& spec);

/// Mean of the per-device closed-form cycle periods, minutes.
double mean_period_min(const Ensemble& e);

Aggregate aggregate(const Ensemble& e);

/// Joint (temperature, mode) density, normalized so that
/// sum over bins of (density_on + density_off) * bin_width == 1.
/// Bins cover the union of customer bands padded by 5x the noise spread
/// accumulated over one mean cycle.
HistogramSnapshot histogram(const Ensemble& e, double bin_width);

} // namespace tclsim
