#pragma once

#include "tclsim/analysis.hpp"
#include "tclsim/population.hpp"
#include "tclsim/protocol.hpp"
#include "tclsim/simulator.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

// Scenario files, validation, batch execution and the emitted artifacts
// (trace.csv, summary.json, probe/histogram CSVs, SVG plots).

namespace tclsim {

/// Validation or parse failure; field names the offending scenario key.
class ScenarioError : public std::runtime_error {
public:
    ScenarioError(std::string field, const std::string& message)
        : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

struct ScenarioEvent {
    double t = 0.0;
    Command command;
};

struct OutputOptions {
    bool trace = true;
    std::vector<double> histogram_times;
    std::vector<std::int64_t> device_probe_ids;
    double stride = 0.5;             // minutes between trace samples
    double histogram_bin_width = 0.05; // degC
};

struct Scenario {
    std::string name;
    PopulationSpec population;
    double dt = 1.0 / 60.0; // minutes
    double t_end = 1440.0;  // minutes
    std::vector<ScenarioEvent> events;
    OutputOptions outputs;
    double tolerance_delta_max = 1.0; // degC, customer tolerance for band shifts
    double broadcast_delay = 0.0;     // minutes between sending and acting, uniform
};

Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario_file(const std::string& path);

/// Throws ScenarioError naming the first offending field.
void validate_scenario(const Scenario& sc);

/// Canonical serialization (sorted keys, shortest round-trip numbers); two
/// scenarios are the same run if and only if their canonical forms match.
std::string canonical_json(const Scenario& sc);

/// FNV-1a hash of the canonical form, 16 hex digits.
std::string scenario_hash(const Scenario& sc);

const std::vector<std::string>& bundled_scenario_names();
/// Throws ScenarioError for unknown names.
Scenario bundled_scenario(const std::string& name);

struct EventSummary {
    double t = 0.0;
    std::string label;
    PulseMetrics metrics;
};

struct RunSummary {
    std::string scenario_name;
    std::string scenario_hash;
    std::uint64_t seed = 0;
    double steady_power_mw = 0.0;
    std::vector<EventSummary> events;
    std::optional<double> no_go_gap;          // single-Sp1 homogeneous noise-free runs
    std::optional<double> mean_field_residual; // baseline or Sp2-only runs
    double wall_clock_seconds = 0.0;

    std::string to_json() const;
};

struct RunOptions {
    std::string out_dir;        // empty = write nothing
    bool svg = false;
    bool force = false;         // overwrite existing outputs
    int threads = 1;
    std::optional<std::uint64_t> seed_override;
};

struct RunResult {
    RunSummary summary;
    PowerTrace trace;
    std::vector<DeviceProbe> probes;
    std::map<double, HistogramSnapshot> histograms;
};

/// Validate, simulate, analyze and (optionally) write artifacts.
RunResult run_scenario(Scenario sc, const RunOptions& opts);

void write_trace_csv(const PowerTrace& trace, const std::string& path);
void write_probe_csv(const DeviceProbe& probe, const std::string& path);
void write_histogram_csv(const HistogramSnapshot& h, const std::string& path);

} // namespace tclsim
