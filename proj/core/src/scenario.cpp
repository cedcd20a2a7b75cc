#include "tclsim/scenario.hpp"

#include "tclsim/svg.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace tclsim {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

double number_or(const json& j, const char* key, const std::string& field, double fallback) {
    if (!j.contains(key)) {
        return fallback;
    }
    if (!j.at(key).is_number()) {
        throw ScenarioError(field, "expected a number");
    }
    return j.at(key).get<double>();
}

Command parse_command(const json& j, const std::string& field) {
    if (!j.is_object() || !j.contains("type") || !j.at("type").is_string()) {
        throw ScenarioError(field + ".type", "command needs a string type");
    }
    const std::string type = j.at("type").get<std::string>();
    auto direction = [&](const char* key) {
        if (!j.contains(key) || !j.at(key).is_string()) {
            throw ScenarioError(field + "." + key, "expected \"down\" or \"up\"");
        }
        const std::string d = j.at(key).get<std::string>();
        if (d == "down") {
            return Direction::Down;
        }
        if (d == "up") {
            return Direction::Up;
        }
        throw ScenarioError(field + "." + key, "expected \"down\" or \"up\"");
    };

    if (type == "unsafe_hold") {
        UnsafeHold c;
        if (!j.contains("target_mode") || !j.at("target_mode").is_string()) {
            throw ScenarioError(field + ".target_mode", "expected \"on\" or \"off\"");
        }
        const std::string m = j.at("target_mode").get<std::string>();
        if (m == "on") {
            c.target_mode = Mode::On;
        } else if (m == "off") {
            c.target_mode = Mode::Off;
        } else {
            throw ScenarioError(field + ".target_mode", "expected \"on\" or \"off\"");
        }
        c.hold_min = number_or(j, "hold", field + ".hold", -1.0);
        if (j.contains("restore")) {
            const std::string r = j.at("restore").get<std::string>();
            if (r == "premode") {
                c.restore = UnsafeHold::Restore::PreMode;
            } else if (r == "hysteresis") {
                c.restore = UnsafeHold::Restore::HysteresisOnly;
            } else {
                throw ScenarioError(field + ".restore", "expected \"premode\" or \"hysteresis\"");
            }
        }
        return c;
    }
    if (type == "unsafe_shift") {
        return UnsafeShift{number_or(j, "delta", field + ".delta", 0.0)};
    }
    if (type == "sp1") {
        return Sp1{direction("direction")};
    }
    if (type == "sp2") {
        return Sp2{number_or(j, "delta", field + ".delta", 0.0)};
    }
    if (type == "sp3") {
        return Sp3{direction("direction"), number_or(j, "width", field + ".width", -1.0)};
    }
    if (type == "hybrid") {
        Hybrid c;
        c.p = number_or(j, "p", field + ".p", -1.0);
        c.delta = number_or(j, "delta", field + ".delta", 0.0);
        if (j.contains("sp3_width")) {
            c.sp3_width_min = number_or(j, "sp3_width", field + ".sp3_width", -1.0);
        }
        return c;
    }
    throw ScenarioError(field + ".type", "unknown command type \"" + type + "\"");
}

json command_to_json(const Command& cmd) {
    json j;
    std::visit(
        [&](const auto& c) {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, UnsafeHold>) {
                j["type"] = "unsafe_hold";
                j["target_mode"] = c.target_mode == Mode::On ? "on" : "off";
                j["hold"] = c.hold_min;
                j["restore"] =
                    c.restore == UnsafeHold::Restore::PreMode ? "premode" : "hysteresis";
            } else if constexpr (std::is_same_v<T, UnsafeShift>) {
                j["type"] = "unsafe_shift";
                j["delta"] = c.delta;
            } else if constexpr (std::is_same_v<T, Sp1>) {
                j["type"] = "sp1";
                j["direction"] = c.direction == Direction::Down ? "down" : "up";
            } else if constexpr (std::is_same_v<T, Sp2>) {
                j["type"] = "sp2";
                j["delta"] = c.delta;
            } else if constexpr (std::is_same_v<T, Sp3>) {
                j["type"] = "sp3";
                j["direction"] = c.direction == Direction::Down ? "down" : "up";
                j["width"] = c.width_min;
            } else if constexpr (std::is_same_v<T, Hybrid>) {
                j["type"] = "hybrid";
                j["p"] = c.p;
                j["delta"] = c.delta;
                if (c.sp3_width_min) {
                    j["sp3_width"] = *c.sp3_width_min;
                }
            }
        },
        cmd);
    return j;
}

double command_delta(const Command& cmd) {
    if (const auto* s = std::get_if<UnsafeShift>(&cmd)) {
        return s->delta;
    }
    if (const auto* s = std::get_if<Sp2>(&cmd)) {
        return s->delta;
    }
    if (const auto* s = std::get_if<Hybrid>(&cmd)) {
        return s->delta;
    }
    return 0.0;
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

} // namespace

Scenario parse_scenario(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ScenarioError("(document)", e.what());
    }
    if (!j.is_object()) {
        throw ScenarioError("(document)", "scenario must be a JSON object");
    }

    Scenario sc;
    if (j.contains("name")) {
        sc.name = j.at("name").get<std::string>();
    }
    if (!j.contains("population") || !j.at("population").is_object()) {
        throw ScenarioError("population", "missing required object");
    }
    const json& p = j.at("population");
    PopulationSpec& ps = sc.population;
    ps.n = static_cast<std::int64_t>(number_or(p, "n", "population.n", 0.0));
    ps.mean_C = number_or(p, "mean_C", "population.mean_C", ps.mean_C);
    ps.mean_R = number_or(p, "mean_R", "population.mean_R", ps.mean_R);
    ps.mean_P = number_or(p, "mean_P", "population.mean_P", ps.mean_P);
    ps.rel_sigma = number_or(p, "rel_sigma", "population.rel_sigma", ps.rel_sigma);
    ps.theta_amb = number_or(p, "theta_amb", "population.theta_amb", ps.theta_amb);
    ps.setpoint = number_or(p, "setpoint", "population.setpoint", ps.setpoint);
    ps.delta_band = number_or(p, "delta_band", "population.delta_band", ps.delta_band);
    ps.noise_sigma = number_or(p, "noise_sigma", "population.noise_sigma", ps.noise_sigma);
    if (p.contains("seed")) {
        if (!p.at("seed").is_number_unsigned() && !p.at("seed").is_number_integer()) {
            throw ScenarioError("population.seed", "expected an integer");
        }
        ps.seed = p.at("seed").get<std::uint64_t>();
    }

    sc.dt = number_or(j, "dt", "dt", sc.dt);
    sc.t_end = number_or(j, "t_end", "t_end", sc.t_end);
    sc.tolerance_delta_max =
        number_or(j, "tolerance_delta_max", "tolerance_delta_max", sc.tolerance_delta_max);
    sc.broadcast_delay = number_or(j, "broadcast_delay", "broadcast_delay", sc.broadcast_delay);

    if (j.contains("events")) {
        if (!j.at("events").is_array()) {
            throw ScenarioError("events", "expected an array");
        }
        std::size_t idx = 0;
        for (const json& ev : j.at("events")) {
            const std::string field = "events[" + std::to_string(idx) + "]";
            if (!ev.is_object() || !ev.contains("t") || !ev.contains("command")) {
                throw ScenarioError(field, "needs t and command");
            }
            ScenarioEvent e;
            e.t = number_or(ev, "t", field + ".t", -1.0);
            e.command = parse_command(ev.at("command"), field + ".command");
            sc.events.push_back(e);
            ++idx;
        }
    }

    if (j.contains("outputs")) {
        const json& o = j.at("outputs");
        if (!o.is_object()) {
            throw ScenarioError("outputs", "expected an object");
        }
        if (o.contains("trace")) {
            if (!o.at("trace").is_boolean()) {
                throw ScenarioError("outputs.trace", "expected a boolean");
            }
            sc.outputs.trace = o.at("trace").get<bool>();
        }
        if (o.contains("histogram_times")) {
            for (const json& t : o.at("histogram_times")) {
                sc.outputs.histogram_times.push_back(t.get<double>());
            }
        }
        if (o.contains("device_probe_ids")) {
            for (const json& d : o.at("device_probe_ids")) {
                sc.outputs.device_probe_ids.push_back(d.get<std::int64_t>());
            }
        }
        sc.outputs.stride = number_or(o, "stride", "outputs.stride", sc.outputs.stride);
        sc.outputs.histogram_bin_width = number_or(o, "histogram_bin_width",
                                                   "outputs.histogram_bin_width",
                                                   sc.outputs.histogram_bin_width);
    }
    return sc;
}

Scenario load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ScenarioError("(file)", "cannot open " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    Scenario sc = parse_scenario(ss.str());
    if (sc.name.empty()) {
        sc.name = fs::path(path).stem().string();
    }
    return sc;
}

void validate_scenario(const Scenario& sc) {
    const PopulationSpec& p = sc.population;
    if (p.n < 1) {
        throw ScenarioError("population.n", "must be >= 1");
    }
    if (p.mean_C <= 0 || p.mean_R <= 0 || p.mean_P <= 0) {
        throw ScenarioError("population.mean_C/mean_R/mean_P", "means must be positive");
    }
    if (p.rel_sigma < 0) {
        throw ScenarioError("population.rel_sigma", "must be >= 0");
    }
    if (p.delta_band <= 0) {
        throw ScenarioError("population.delta_band", "must be > 0");
    }
    if (p.noise_sigma < 0) {
        throw ScenarioError("population.noise_sigma", "must be >= 0");
    }
    if (sc.tolerance_delta_max <= 0) {
        throw ScenarioError("tolerance_delta_max", "must be > 0");
    }
    if (sc.broadcast_delay < 0) {
        throw ScenarioError("broadcast_delay", "must be >= 0");
    }

    TclParams mean_params{p.mean_C, p.mean_R, p.mean_P, 1.0, p.theta_amb, p.noise_sigma};
    if (!band_feasible(mean_params, p.band())) {
        throw ScenarioError("population.setpoint/delta_band",
                            "band is infeasible at the mean parameters: need theta_amb - P*R < "
                            "lower limit and upper limit < theta_amb");
    }

    if (!(sc.dt > 0.0) || sc.dt > 0.1) {
        throw ScenarioError("dt", "must satisfy 0 < dt <= 0.1 minutes");
    }
    if (sc.t_end <= 0.0) {
        throw ScenarioError("t_end", "must be > 0");
    }

    const OutputOptions& o = sc.outputs;
    if (o.stride < sc.dt) {
        throw ScenarioError("outputs.stride", "must be >= dt");
    }
    const double ratio = o.stride / sc.dt;
    if (std::abs(ratio - std::round(ratio)) > 1e-6) {
        throw ScenarioError("outputs.stride", "must be an integer multiple of dt");
    }
    const auto steps_total = static_cast<std::int64_t>(std::llround(sc.t_end / sc.dt));
    const auto m = static_cast<std::int64_t>(std::llround(ratio));
    if (std::abs(static_cast<double>(steps_total) * sc.dt - sc.t_end) > 1e-6) {
        throw ScenarioError("t_end", "must be an integer multiple of dt");
    }
    if (steps_total % m != 0) {
        throw ScenarioError("t_end", "must be an integer multiple of outputs.stride");
    }
    if (o.histogram_bin_width <= 0.0) {
        throw ScenarioError("outputs.histogram_bin_width", "must be > 0");
    }
    for (std::int64_t id : o.device_probe_ids) {
        if (id < 0 || id >= p.n) {
            throw ScenarioError("outputs.device_probe_ids",
                                "device " + std::to_string(id) + " out of range");
        }
    }
    for (double t : o.histogram_times) {
        if (t < 0.0 || t > sc.t_end) {
            throw ScenarioError("outputs.histogram_times", "time outside [0, t_end]");
        }
    }

    double prev_t = -1.0;
    std::size_t idx = 0;
    for (const ScenarioEvent& ev : sc.events) {
        const std::string field = "events[" + std::to_string(idx) + "]";
        if (ev.t < 0.0 || ev.t + sc.broadcast_delay >= sc.t_end) {
            throw ScenarioError(field + ".t",
                                "must lie in [0, t_end) including broadcast_delay");
        }
        if (ev.t <= prev_t) {
            throw ScenarioError(field + ".t", "events must be strictly increasing in t");
        }
        prev_t = ev.t;

        std::visit(
            [&](const auto& c) {
                using T = std::decay_t<decltype(c)>;
                if constexpr (std::is_same_v<T, UnsafeHold>) {
                    if (!(c.hold_min > 0.0)) {
                        throw ScenarioError(field + ".command.hold", "must be > 0");
                    }
                } else if constexpr (std::is_same_v<T, Sp3>) {
                    if (!(c.width_min > 0.0)) {
                        throw ScenarioError(field + ".command.width", "must be > 0");
                    }
                } else if constexpr (std::is_same_v<T, Hybrid>) {
                    if (c.p < 0.0 || c.p > 1.0) {
                        throw ScenarioError(field + ".command.p", "must lie in [0, 1]");
                    }
                    if (c.delta == 0.0) {
                        throw ScenarioError(field + ".command.delta", "must be nonzero");
                    }
                    if (c.sp3_width_min && !(*c.sp3_width_min > 0.0)) {
                        throw ScenarioError(field + ".command.sp3_width", "must be > 0");
                    }
                } else if constexpr (std::is_same_v<T, UnsafeShift> || std::is_same_v<T, Sp2>) {
                    if (c.delta == 0.0) {
                        throw ScenarioError(field + ".command.delta", "must be nonzero");
                    }
                }
            },
            ev.command);

        const double delta = command_delta(ev.command);
        if (std::abs(delta) >= sc.tolerance_delta_max) {
            throw ScenarioError(field + ".command.delta",
                                "must be strictly below tolerance_delta_max of " +
                                    std::to_string(sc.tolerance_delta_max));
        }
        if (delta != 0.0 && !band_feasible(mean_params, p.band().shifted(delta))) {
            throw ScenarioError(field + ".command.delta",
                                "shifted band is infeasible at the mean parameters");
        }
        ++idx;
    }
}

std::string canonical_json(const Scenario& sc) {
    json j;
    if (!sc.name.empty()) {
        j["name"] = sc.name;
    }
    json& p = j["population"];
    p["n"] = sc.population.n;
    p["mean_C"] = sc.population.mean_C;
    p["mean_R"] = sc.population.mean_R;
    p["mean_P"] = sc.population.mean_P;
    p["rel_sigma"] = sc.population.rel_sigma;
    p["theta_amb"] = sc.population.theta_amb;
    p["setpoint"] = sc.population.setpoint;
    p["delta_band"] = sc.population.delta_band;
    p["noise_sigma"] = sc.population.noise_sigma;
    p["seed"] = sc.population.seed;
    j["dt"] = sc.dt;
    j["t_end"] = sc.t_end;
    j["tolerance_delta_max"] = sc.tolerance_delta_max;
    j["broadcast_delay"] = sc.broadcast_delay;
    j["events"] = json::array();
    for (const ScenarioEvent& ev : sc.events) {
        json e;
        e["t"] = ev.t;
        e["command"] = command_to_json(ev.command);
        j["events"].push_back(e);
    }
    json& o = j["outputs"];
    o["trace"] = sc.outputs.trace;
    o["stride"] = sc.outputs.stride;
    o["histogram_bin_width"] = sc.outputs.histogram_bin_width;
    o["histogram_times"] = sc.outputs.histogram_times;
    o["device_probe_ids"] = sc.outputs.device_probe_ids;
    return j.dump(2);
}

std::string scenario_hash(const Scenario& sc) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a(canonical_json(sc))));
    return buf;
}

void write_trace_csv(const PowerTrace& trace, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write " + path);
    }
    out << "t_min,power_MW,mean_theta_C,frac_on\n";
    char line[160];
    for (std::size_t i = 0; i < trace.size(); ++i) {
        std::snprintf(line, sizeof(line), "%.6f,%.6f,%.6f,%.6f\n", trace.t_min[i],
                      trace.power_mw[i], trace.mean_theta[i], trace.frac_on[i]);
        out << line;
    }
}

void write_probe_csv(const DeviceProbe& probe, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write " + path);
    }
    out << "t_min,theta_C,mode,band_lo_C,band_hi_C\n";
    char line[160];
    for (std::size_t i = 0; i < probe.t_min.size(); ++i) {
        std::snprintf(line, sizeof(line), "%.6f,%.6f,%d,%.6f,%.6f\n", probe.t_min[i],
                      probe.theta[i], probe.mode[i] == Mode::On ? 1 : 0, probe.band_lo[i],
                      probe.band_hi[i]);
        out << line;
    }
}

void write_histogram_csv(const HistogramSnapshot& h, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write " + path);
    }
    out << "bin_lo_C,bin_hi_C,density_on,density_off\n";
    char line[160];
    for (std::size_t b = 0; b + 1 < h.bin_edges.size(); ++b) {
        std::snprintf(line, sizeof(line), "%.6f,%.6f,%.9f,%.9f\n", h.bin_edges[b],
                      h.bin_edges[b + 1], h.density_on[b], h.density_off[b]);
        out << line;
    }
}

std::string RunSummary::to_json() const {
    json j;
    j["scenario_name"] = scenario_name;
    j["scenario_hash"] = scenario_hash;
    j["seed"] = seed;
    j["steady_power_mw"] = steady_power_mw;
    j["events"] = json::array();
    for (const EventSummary& ev : events) {
        json e;
        e["t"] = ev.t;
        e["command"] = ev.label;
        json m;
        m["p_steady_mw"] = ev.metrics.p_steady;
        m["final_steady_mw"] = ev.metrics.final_steady;
        m["direction"] = ev.metrics.direction == Direction::Down ? "down" : "up";
        m["depth_mw"] = ev.metrics.depth;
        m["width_at_half_min"] = ev.metrics.width_at_half;
        m["rebound_peak_mw"] = ev.metrics.rebound_peak;
        m["settled"] = ev.metrics.settled;
        m["settling_time_min"] = ev.metrics.settling_time;
        m["oscillation_index"] = ev.metrics.oscillation_index;
        m["net_energy_delta_mwh"] = ev.metrics.net_energy_delta_mwh;
        e["metrics"] = m;
        j["events"].push_back(e);
    }
    if (no_go_gap) {
        j["no_go_gap"] = *no_go_gap;
    }
    if (mean_field_residual) {
        j["mean_field_residual"] = *mean_field_residual;
    }
    j["wall_clock_seconds"] = wall_clock_seconds;
    return j.dump(2);
}

RunResult run_scenario(Scenario sc, const RunOptions& opts) {
    if (opts.seed_override) {
        sc.population.seed = *opts.seed_override;
    }
    validate_scenario(sc);

    const auto wall0 = std::chrono::steady_clock::now();
    RunResult res;
    res.summary.scenario_name = sc.name;
    res.summary.scenario_hash = scenario_hash(sc);
    res.summary.seed = sc.population.seed;

    Simulator sim(sc.population, sc.dt, opts.threads);
    sim.init_steady_state();
    Ensemble& ens = sim.ensemble();

    const auto steps_total = static_cast<std::int64_t>(std::llround(sc.t_end / sc.dt));
    const auto m = static_cast<std::int64_t>(std::llround(sc.outputs.stride / sc.dt));

    struct Barrier {
        std::int64_t step;
        int kind; // 0 = event (applied before samples at the same step)
        std::size_t index;
    };
    std::vector<Barrier> barriers;
    for (std::int64_t k = 0; k <= steps_total; k += m) {
        barriers.push_back({k, 1, 0});
    }
    for (std::size_t i = 0; i < sc.events.size(); ++i) {
        // Devices act at the first step boundary after broadcast + latency.
        const double t_effective = sc.events[i].t + sc.broadcast_delay;
        const auto k = static_cast<std::int64_t>(std::ceil(t_effective / sc.dt - 1e-9));
        barriers.push_back({k, 0, i});
        res.trace.events.push_back(
            {static_cast<double>(k) * sc.dt, sc.events[i].command,
             command_label(sc.events[i].command)});
    }
    for (std::size_t i = 0; i < sc.outputs.histogram_times.size(); ++i) {
        const auto k = static_cast<std::int64_t>(
            std::ceil(sc.outputs.histogram_times[i] / sc.dt - 1e-9));
        barriers.push_back({k, 2, i});
    }
    std::stable_sort(barriers.begin(), barriers.end(), [](const Barrier& a, const Barrier& b) {
        return a.step != b.step ? a.step < b.step : a.kind < b.kind;
    });

    res.probes.reserve(sc.outputs.device_probe_ids.size());
    for (std::int64_t id : sc.outputs.device_probe_ids) {
        DeviceProbe probe;
        probe.device = id;
        res.probes.push_back(std::move(probe));
    }

    auto record_sample = [&]() {
        const Aggregate a = aggregate(ens);
        res.trace.t_min.push_back(sim.time_min());
        res.trace.power_mw.push_back(a.power_mw);
        res.trace.mean_theta.push_back(a.mean_theta);
        res.trace.frac_on.push_back(a.frac_on);
        for (DeviceProbe& probe : res.probes) {
            const auto i = static_cast<std::size_t>(probe.device);
            probe.t_min.push_back(sim.time_min());
            probe.theta.push_back(ens.theta[i]);
            probe.mode.push_back(ens.mode[i]);
            probe.band_lo.push_back(ens.ctrl[i].band_lo);
            probe.band_hi.push_back(ens.ctrl[i].band_hi);
        }
    };

    std::int64_t done = 0;
    for (const Barrier& b : barriers) {
        if (b.step > done) {
            sim.advance_steps(b.step - done);
            done = b.step;
        }
        switch (b.kind) {
        case 0:
            sim.install(sc.events[b.index].command, b.index);
            break;
        case 1:
            record_sample();
            break;
        default:
            res.histograms.emplace(sim.time_min(),
                                   histogram(ens, sc.outputs.histogram_bin_width));
            break;
        }
    }

    // Analysis: steady level before the first event (or over the tail).
    const double first_event = sc.events.empty() ? sc.t_end : res.trace.events.front().t;
    const double w0 = std::max(0.0, first_event - 60.0);
    res.summary.steady_power_mw = steady_power(res.trace, w0, first_event - (sc.events.empty() ? 0.0 : 1e-6));

    for (std::size_t i = 0; i < res.trace.events.size(); ++i) {
        const TraceEvent& ev = res.trace.events[i];
        PulseOptions popts;
        if (i + 1 < res.trace.events.size()) {
            popts.horizon_min = res.trace.events[i + 1].t - ev.t;
        }
        EventSummary es;
        es.t = ev.t;
        es.label = ev.label;
        es.metrics = pulse_metrics(res.trace, ev.t, popts);
        res.summary.events.push_back(es);
    }

    // No-Go accounting applies to a lone SP-1 on a homogeneous noise-free
    // population; the averaged linear relation to baseline or SP-2 runs.
    if (sc.events.size() == 1 && std::holds_alternative<Sp1>(sc.events[0].command) &&
        sc.population.rel_sigma == 0.0 && sc.population.noise_sigma == 0.0) {
        const double t_p = sim.mean_period();
        if (res.trace.events[0].t >= t_p && res.trace.events[0].t + t_p <= sc.t_end) {
            res.summary.no_go_gap = no_go_gap(res.trace, res.trace.events[0].t, t_p);
        }
    }
    const bool sp2_only =
        std::all_of(sc.events.begin(), sc.events.end(), [](const ScenarioEvent& ev) {
            return std::holds_alternative<Sp2>(ev.command);
        });
    if (sp2_only && res.trace.size() >= 3) {
        res.summary.mean_field_residual =
            mean_field_residual(res.trace, mean_field_constants(ens));
    }

    res.summary.wall_clock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();

    if (!opts.out_dir.empty()) {
        const fs::path dir(opts.out_dir);
        fs::create_directories(dir);
        const fs::path trace_path = dir / "trace.csv";
        if (fs::exists(trace_path) && !opts.force) {
            throw std::runtime_error(trace_path.string() +
                                     " already exists; pass --force to overwrite");
        }
        if (sc.outputs.trace) {
            write_trace_csv(res.trace, trace_path.string());
        }
        std::ofstream(dir / "summary.json") << res.summary.to_json() << "\n";
        std::ofstream(dir / "scenario_echo.json") << canonical_json(sc) << "\n";
        for (const DeviceProbe& probe : res.probes) {
            write_probe_csv(probe,
                            (dir / ("probe_" + std::to_string(probe.device) + ".csv")).string());
        }
        for (const auto& [t, h] : res.histograms) {
            char name[64];
            std::snprintf(name, sizeof(name), "histogram_%.0fmin.csv", t);
            write_histogram_csv(h, (dir / name).string());
        }
        if (opts.svg) {
            emit_svg(res.trace, res.probes, (dir / "trace.svg").string());
        }
    }
    return res;
}

namespace {

Scenario default_scenario(const std::string& name) {
    Scenario sc;
    sc.name = name;
    sc.population = PopulationSpec{};
    sc.dt = 1.0 / 60.0;
    sc.t_end = 1440.0;
    sc.outputs.trace = true;
    sc.outputs.stride = 0.5;
    sc.outputs.device_probe_ids = {0, 1};
    return sc;
}

} // namespace

const std::vector<std::string>& bundled_scenario_names() {
    static const std::vector<std::string> names = {
        "fig1_baseline",    "fig4_unsafe_off", "fig4_unsafe_on",  "fig6_unsafe_shift",
        "fig8_sp1_down",    "fig8_sp1_up",     "fig10_sp2_up04",  "fig12_sp3_3min",
        "fig13_hybrid_pos", "fig14_hybrid_neg"};
    return names;
}

Scenario bundled_scenario(const std::string& name) {
    Scenario sc = default_scenario(name);
    if (name == "fig1_baseline") {
        sc.outputs.histogram_times = {720.0};
        return sc;
    }
    if (name == "fig4_unsafe_off") {
        sc.events.push_back({900.0, UnsafeHold{Mode::Off, 10.0, UnsafeHold::Restore::PreMode}});
        return sc;
    }
    if (name == "fig4_unsafe_on") {
        sc.events.push_back({900.0, UnsafeHold{Mode::On, 10.0, UnsafeHold::Restore::PreMode}});
        return sc;
    }
    if (name == "fig6_unsafe_shift") {
        sc.events.push_back({900.0, UnsafeShift{0.4}});
        return sc;
    }
    if (name == "fig8_sp1_down") {
        sc.events.push_back({900.0, Sp1{Direction::Down}});
        return sc;
    }
    if (name == "fig8_sp1_up") {
        sc.events.push_back({900.0, Sp1{Direction::Up}});
        return sc;
    }
    if (name == "fig10_sp2_up04") {
        sc.events.push_back({900.0, Sp2{0.4}});
        return sc;
    }
    if (name == "fig12_sp3_3min") {
        // Full-resolution sampling: the 3-minute pulse edges are checked to
        // within two steps.
        sc.outputs.stride = sc.dt;
        sc.events.push_back({900.0, Sp3{Direction::Up, 3.0}});
        sc.events.push_back({1140.0, Sp3{Direction::Down, 3.0}});
        return sc;
    }
    if (name == "fig13_hybrid_pos") {
        sc.events.push_back({900.0, Hybrid{0.3, -0.9, std::nullopt}});
        return sc;
    }
    if (name == "fig14_hybrid_neg") {
        sc.events.push_back({900.0, Hybrid{0.36, 0.9, std::nullopt}});
        return sc;
    }
    throw ScenarioError("(name)", "unknown bundled scenario \"" + name + "\"");
}

} // namespace tclsim
