#include "tclsim/scenario.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitValidation = 2;

tclsim::Scenario resolve_scenario(const std::string& arg) {
    if (fs::exists(arg)) {
        return tclsim::load_scenario_file(arg);
    }
    const auto& names = tclsim::bundled_scenario_names();
    if (std::find(names.begin(), names.end(), arg) != names.end()) {
        return tclsim::bundled_scenario(arg);
    }
    throw tclsim::ScenarioError("(file)",
                                arg + " is neither a scenario file nor a bundled scenario name");
}

void print_summary(const tclsim::RunSummary& summary) {
    std::printf("%-22s steady %7.2f MW  events %zu  wall %.1fs  hash %s\n",
                summary.scenario_name.c_str(), summary.steady_power_mw, summary.events.size(),
                summary.wall_clock_seconds, summary.scenario_hash.c_str());
    for (const tclsim::EventSummary& ev : summary.events) {
        char settle[32];
        if (ev.metrics.settled) {
            std::snprintf(settle, sizeof(settle), "%.1f min", ev.metrics.settling_time);
        } else {
            std::snprintf(settle, sizeof(settle), "unsettled");
        }
        std::printf("  t=%-7.1f %-24s depth %6.2f MW  width %5.2f min  osc %d  settle %s\n",
                    ev.t, ev.label.c_str(), ev.metrics.depth, ev.metrics.width_at_half,
                    ev.metrics.oscillation_index, settle);
    }
}

int run_one(const std::string& arg, const tclsim::RunOptions& opts) {
    const tclsim::Scenario sc = resolve_scenario(arg);
    print_summary(tclsim::run_scenario(sc, opts).summary);
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"tclsim - thermostatic load population pulse simulator"};
    app.require_subcommand(1);

    std::string scenario_arg;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
    bool svg = false;
    bool force = false;
    int threads = 1;

    CLI::App* validate = app.add_subcommand("validate", "Validate a scenario file");
    validate->add_option("scenario", scenario_arg, "Scenario file or bundled name")->required();

    CLI::App* run = app.add_subcommand("run", "Run one scenario");
    run->add_option("scenario", scenario_arg, "Scenario file or bundled name")->required();
    run->add_option("--seed", seed, "Override population.seed")->each([&](const std::string&) {
        seed_set = true;
    });
    run->add_option("--out", out_dir, "Output directory (default runs/<name>)");
    run->add_flag("--svg", svg, "Also render trace.svg");
    run->add_flag("--force", force, "Overwrite existing outputs");
    run->add_option("--threads", threads, "Worker threads (results are thread-count invariant)");

    std::string batch_dir;
    int jobs = 1;
    CLI::App* batch = app.add_subcommand("batch", "Run every *.json scenario in a directory");
    batch->add_option("dir", batch_dir, "Directory of scenario files")->required();
    batch->add_option("--out", out_dir, "Root output directory (default runs/)");
    batch->add_option("--jobs", jobs, "Scenarios to run concurrently");
    batch->add_flag("--svg", svg, "Also render trace.svg");
    batch->add_flag("--force", force, "Overwrite existing outputs");
    batch->add_option("--threads", threads, "Worker threads per scenario");

    bool emit = false;
    std::string emit_dir = "scenarios";
    CLI::App* bundled = app.add_subcommand("bundled", "List or export bundled scenarios");
    bundled->add_flag("--emit", emit, "Write the bundled scenarios as JSON files");
    bundled->add_option("--dir", emit_dir, "Directory for --emit");

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate->parsed()) {
            tclsim::Scenario sc = resolve_scenario(scenario_arg);
            tclsim::validate_scenario(sc);
            std::printf("%s: valid (hash %s)\n", sc.name.c_str(),
                        tclsim::scenario_hash(sc).c_str());
            return kExitOk;
        }

        if (run->parsed()) {
            const tclsim::Scenario sc = resolve_scenario(scenario_arg);
            tclsim::RunOptions opts;
            opts.out_dir = out_dir.empty() ? (fs::path("runs") / sc.name).string() : out_dir;
            opts.svg = svg;
            opts.force = force;
            opts.threads = threads;
            if (seed_set) {
                opts.seed_override = seed;
            }
            print_summary(tclsim::run_scenario(sc, opts).summary);
            return kExitOk;
        }

        if (batch->parsed()) {
            std::vector<std::string> files;
            for (const auto& entry : fs::directory_iterator(batch_dir)) {
                if (entry.path().extension() == ".json") {
                    files.push_back(entry.path().string());
                }
            }
            std::sort(files.begin(), files.end());
            if (files.empty()) {
                std::fprintf(stderr, "no *.json scenarios in %s\n", batch_dir.c_str());
                return kExitValidation;
            }
            const fs::path root = out_dir.empty() ? fs::path("runs") : fs::path(out_dir);
            std::vector<std::future<int>> futs;
            int rc = kExitOk;
            for (const std::string& file : files) {
                tclsim::RunOptions opts;
                opts.out_dir = (root / fs::path(file).stem()).string();
                opts.svg = svg;
                opts.force = force;
                opts.threads = threads;
                futs.push_back(std::async(jobs > 1 ? std::launch::async : std::launch::deferred,
                                          [file, opts] { return run_one(file, opts); }));
                if (static_cast<int>(futs.size()) >= jobs) {
                    rc = std::max(rc, futs.front().get());
                    futs.erase(futs.begin());
                }
            }
            for (auto& f : futs) {
                rc = std::max(rc, f.get());
            }
            return rc;
        }

        if (bundled->parsed()) {
            for (const std::string& name : tclsim::bundled_scenario_names()) {
                if (emit) {
                    fs::create_directories(emit_dir);
                    const fs::path path = fs::path(emit_dir) / (name + ".json");
                    std::ofstream(path) << tclsim::canonical_json(tclsim::bundled_scenario(name))
                                        << "\n";
                    std::printf("wrote %s\n", path.string().c_str());
                } else {
                    std::printf("%s\n", name.c_str());
                }
            }
            return kExitOk;
        }
    } catch (const tclsim::ScenarioError& e) {
        std::fprintf(stderr, "validation error: %s\n", e.what());
        return kExitValidation;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitRuntime;
    }
    return kExitOk;
}
