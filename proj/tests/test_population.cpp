#include "tclsim/population.hpp"
#include "tclsim/scenario.hpp"
#include "tclsim/simulator.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>

using namespace tclsim;

namespace {

PopulationSpec default_spec() {
    return PopulationSpec{}; // n=10^4, means (3, 2, 14), 7% spread, seed fixed
}

double mean_of(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double std_of(const std::vector<double>& v) {
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v) {
        s += (x - m) * (x - m);
    }
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

} // namespace

TEST_CASE("sample_population: zero spread gives exactly the means") {
    PopulationSpec spec = default_spec();
    spec.n = 50;
    spec.rel_sigma = 0.0;
    for (const auto& [p, band] : sample_population(spec)) {
        CHECK(p.C == 3.0);
        CHECK(p.R == 2.0);
        CHECK(p.P == 14.0);
        CHECK(band.lo == doctest::Approx(19.5));
        CHECK(band.hi == doctest::Approx(20.5));
    }
}

TEST_CASE("sample_population: lognormal moments at the default spread") {
    PopulationSpec spec = default_spec();
    const auto pop = sample_population(spec);
    std::vector<double> c, r, p;
    for (const auto& [prm, band] : pop) {
        c.push_back(prm.C);
        r.push_back(prm.R);
        p.push_back(prm.P);
    }
    CHECK(mean_of(c) == doctest::Approx(3.0).epsilon(0.01));
    CHECK(mean_of(r) == doctest::Approx(2.0).epsilon(0.01));
    CHECK(mean_of(p) == doctest::Approx(14.0).epsilon(0.01));
    CHECK(std_of(c) == doctest::Approx(0.07 * 3.0).epsilon(0.10));
    CHECK(std_of(r) == doctest::Approx(0.07 * 2.0).epsilon(0.10));
    CHECK(std_of(p) == doctest::Approx(0.07 * 14.0).epsilon(0.10));
}

TEST_CASE("sample_population: deterministic in the seed") {
    PopulationSpec spec = default_spec();
    spec.n = 200;
    const auto a = sample_population(spec);
    const auto b = sample_population(spec);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].first.C == b[i].first.C);
        CHECK(a[i].first.R == b[i].first.R);
        CHECK(a[i].first.P == b[i].first.P);
    }
    spec.seed += 1;
    const auto c = sample_population(spec);
    int diffs = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        diffs += a[i].first.C != c[i].first.C ? 1 : 0;
    }
    CHECK(diffs == 200);
}

TEST_CASE("sample_population: infeasible spec is rejected") {
    PopulationSpec spec = default_spec();
    spec.n = 10;
    spec.setpoint = 33.0; // band above ambient: no draw can be feasible
    CHECK_THROWS_AS((void)sample_population(spec), ScenarioError);
}

TEST_CASE("sample_population: marginal specs resample and count it") {
    PopulationSpec spec = default_spec();
    spec.n = 2000;
    spec.rel_sigma = 0.30;
    spec.setpoint = 21.0; // lower limit 20.5; ON fixed point 32 - P*R is near it
    spec.mean_P = 6.0;    // mean P*R = 12, fixed point 20: frequent violations
    const Ensemble e = make_ensemble(spec);
    CHECK(e.resample_count > 0);
    for (std::size_t i = 0; i < e.size(); ++i) {
        CHECK(band_feasible(e.params[i], e.customer_band[i]));
    }
}

TEST_CASE("phase_state: phase origin and leg boundaries") {
    const TclParams p{3.0, 2.0, 14.0, 1.0, 32.0, 0.0};
    const Deadband band{19.5, 20.5};
    const CycleTimes ct = cycle_times(p, band);

    const TclState at_zero = phase_state(p, band, 0.0);
    CHECK(at_zero.theta == doctest::Approx(band.hi));
    CHECK(at_zero.mode == Mode::On);

    // Just past the ON leg: at the bottom, OFF.
    const TclState at_duty = phase_state(p, band, ct.duty + 1e-12);
    CHECK(at_duty.theta == doctest::Approx(band.lo).epsilon(1e-6));
    CHECK(at_duty.mode == Mode::Off);

    // Approaching u = 1: nearly back at the top, still OFF.
    const TclState at_end = phase_state(p, band, 1.0 - 1e-9);
    CHECK(at_end.theta == doctest::Approx(band.hi).epsilon(1e-5));
    CHECK(at_end.mode == Mode::Off);
}

TEST_CASE("aggregate: trivial cases") {
    PopulationSpec spec = default_spec();
    spec.n = 100;
    spec.rel_sigma = 0.0;
    spec.noise_sigma = 0.0;
    Ensemble e = make_ensemble(spec);

    for (std::size_t i = 0; i < e.size(); ++i) {
        e.mode[i] = Mode::Off;
    }
    Aggregate a = aggregate(e);
    CHECK(a.power_mw == 0.0);
    CHECK(a.frac_on == 0.0);

    for (std::size_t i = 0; i < e.size(); ++i) {
        e.mode[i] = Mode::On;
    }
    a = aggregate(e);
    CHECK(a.power_mw == doctest::Approx(100 * 14.0 / 1000.0));
    CHECK(a.frac_on == 1.0);
}

TEST_CASE("init: steady state has duty-cycle ON-fraction and ~60 MW at n=10^4") {
    PopulationSpec spec = default_spec();
    Simulator sim(spec, 0.05, 2);
    sim.init_steady_state();
    const Aggregate a = aggregate(sim.ensemble());
    const CycleTimes ct = cycle_times(TclParams{3.0, 2.0, 14.0, 1.0, 32.0, 0.0}, spec.band());
    CHECK(a.frac_on == doctest::Approx(ct.duty).epsilon(0.05));
    CHECK(std::abs(a.frac_on - ct.duty) < 0.02);
    CHECK(a.power_mw == doctest::Approx(60.0).epsilon(0.10));
}

TEST_CASE("histogram: normalization and degenerate cases") {
    PopulationSpec spec = default_spec();
    spec.n = 500;
    spec.noise_sigma = 0.0;
    Ensemble e = make_ensemble(spec);

    HistogramSnapshot h = histogram(e, 0.05);
    double mass = 0.0;
    for (std::size_t b = 0; b < h.density_on.size(); ++b) {
        mass += (h.density_on[b] + h.density_off[b]) * (h.bin_edges[b + 1] - h.bin_edges[b]);
    }
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));

    // Everyone parked at one OFF temperature: a single nonzero OFF bin.
    for (std::size_t i = 0; i < e.size(); ++i) {
        e.theta[i] = 20.0;
        e.mode[i] = Mode::Off;
    }
    h = histogram(e, 0.05);
    int nonzero_off = 0;
    double on_mass = 0.0;
    for (std::size_t b = 0; b < h.density_on.size(); ++b) {
        nonzero_off += h.density_off[b] > 0.0 ? 1 : 0;
        on_mass += h.density_on[b];
    }
    CHECK(nonzero_off == 1);
    CHECK(on_mass == 0.0);
}

TEST_CASE("histogram: noise leaks density beyond the deadband") {
    PopulationSpec spec = default_spec();
    spec.n = 4000;
    Simulator sim(spec, 1.0 / 60.0, 2);
    sim.init_steady_state();
    const HistogramSnapshot h = histogram(sim.ensemble(), 0.05);
    double outside = 0.0;
    const Deadband band = spec.band();
    for (std::size_t b = 0; b + 1 < h.bin_edges.size(); ++b) {
        const double mid = 0.5 * (h.bin_edges[b] + h.bin_edges[b + 1]);
        if (mid < band.lo || mid > band.hi) {
            outside +=
                (h.density_on[b] + h.density_off[b]) * (h.bin_edges[b + 1] - h.bin_edges[b]);
        }
    }
    CHECK(outside > 0.0);
    CHECK(outside < 0.2); // small tails, not a smeared distribution
}

TEST_CASE("histogram: matches occupation-time oracle for a noiseless homogeneous ensemble") {
    PopulationSpec spec = default_spec();
    spec.n = 20000;
    spec.rel_sigma = 0.0;
    spec.noise_sigma = 0.0;
    Simulator sim(spec, 1.0 / 60.0, 2);
    sim.init_steady_state();
    const HistogramSnapshot h = histogram(sim.ensemble(), 0.05);

    // Oracle: occupation times of a single noiseless device over one cycle,
    // accumulated into the same bins with a fine step.
    const TclParams p{3.0, 2.0, 14.0, 1.0, 32.0, 0.0};
    const Deadband band = spec.band();
    const CycleTimes ct = cycle_times(p, band);
    std::vector<double> on_time(h.density_on.size(), 0.0);
    std::vector<double> off_time(h.density_off.size(), 0.0);
    const double fine = 1e-3;
    TclState s{band.lo, Mode::Off};
    for (double t = 0.0; t < ct.period; t += fine) {
        const double lo = h.bin_edges.front();
        const double w = h.bin_edges[1] - h.bin_edges[0];
        const auto b = static_cast<std::size_t>(
            std::min(static_cast<double>(on_time.size() - 1), std::max(0.0, (s.theta - lo) / w)));
        (s.mode == Mode::On ? on_time : off_time)[b] += fine;
        s = step(s, p, band, fine, 0.0);
    }
    const double w = h.bin_edges[1] - h.bin_edges[0];
    double l1 = 0.0;
    for (std::size_t b = 0; b < on_time.size(); ++b) {
        const double oracle_on = on_time[b] / (ct.period * w);
        const double oracle_off = off_time[b] / (ct.period * w);
        l1 += std::abs(oracle_on - h.density_on[b]) * w;
        l1 += std::abs(oracle_off - h.density_off[b]) * w;
    }
    CHECK(l1 < 0.07);

    // The oracle itself agrees with the analytic 1/|dtheta/dt| densities.
    const double tau = time_constant_min(p);
    double l1_analytic = 0.0;
    for (std::size_t b = 0; b < on_time.size(); ++b) {
        const double mid = 0.5 * (h.bin_edges[b] + h.bin_edges[b + 1]);
        double f_on = 0.0;
        double f_off = 0.0;
        if (mid >= band.lo && mid <= band.hi) {
            f_on = tau / (ct.period * (mid - branch_fixed_point(Mode::On, p)));
            f_off = tau / (ct.period * (p.theta_amb - mid));
        }
        l1_analytic += std::abs(f_on - on_time[b] / (ct.period * w)) * w;
        l1_analytic += std::abs(f_off - off_time[b] / (ct.period * w)) * w;
    }
    CHECK(l1_analytic < 0.05);
}

TEST_CASE("stationarity: sliding hourly means stay within finite-population noise") {
    PopulationSpec spec = default_spec();
    spec.n = 2000;
    Scenario sc;
    sc.name = "stationarity";
    sc.population = spec;
    sc.dt = 0.05;
    sc.t_end = 300.0;
    RunOptions opts;
    opts.threads = 2;
    const RunResult res = run_scenario(sc, opts);

    const auto& t = res.trace.t_min;
    const auto& p = res.trace.power_mw;
    std::vector<double> window_means;
    for (double w0 = 0.0; w0 + 60.0 <= sc.t_end + 1e-9; w0 += 10.0) {
        double sum = 0.0;
        int count = 0;
        for (std::size_t i = 0; i < t.size(); ++i) {
            if (t[i] >= w0 && t[i] <= w0 + 60.0) {
                sum += p[i];
                ++count;
            }
        }
        window_means.push_back(sum / count);
    }
    const double duty = 0.4285;
    const double se =
        spec.mean_P * std::sqrt(duty * (1.0 - duty) / static_cast<double>(spec.n)) / 1000.0 *
        static_cast<double>(spec.n);
    double lo = window_means.front();
    double hi = window_means.front();
    for (double m : window_means) {
        lo = std::min(lo, m);
        hi = std::max(hi, m);
    }
    CHECK(hi - lo < 3.0 * se);
}

TEST_CASE("determinism: same spec and seed give identical states") {
    PopulationSpec spec = default_spec();
    spec.n = 300;
    Simulator a(spec, 1.0 / 60.0, 1);
    Simulator b(spec, 1.0 / 60.0, 4);
    a.init_steady_state();
    b.init_steady_state();
    a.advance_steps(600);
    b.advance_steps(600);
    for (std::size_t i = 0; i < a.ensemble().size(); ++i) {
        CHECK(a.ensemble().theta[i] == b.ensemble().theta[i]);
        CHECK(a.ensemble().mode[i] == b.ensemble().mode[i]);
    }
}
