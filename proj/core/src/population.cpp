#include "tclsim/population.hpp"

#include "tclsim/rng.hpp"
#include "tclsim/scenario.hpp"

#include <algorithm>
#include <cmath>

namespace tclsim {

namespace {

// Lognormal moment matching: mean m, standard deviation rel * m, so the
// underlying normal has sigma^2 = ln(1 + rel^2), mu = ln(m) - sigma^2/2.
double lognormal_draw(double mean, double rel_sigma, std::uint64_t seed, std::uint64_t strm,
                      std::uint64_t device, std::uint64_t attempt) {
    if (rel_sigma == 0.0) {
        return mean;
    }
    const double s2 = std::log1p(rel_sigma * rel_sigma);
    const double mu = std::log(mean) - 0.5 * s2;
    const double z = rng::gaussian(seed, strm, device, attempt);
    return std::exp(mu + std::sqrt(s2) * z);
}

TclParams sample_device(const PopulationSpec& spec, std::int64_t i, const Deadband& band,
                        int& resamples) {
    TclParams p;
    p.eta = 1.0;
    p.theta_amb = spec.theta_amb;
    p.noise_sigma = spec.noise_sigma;
    const std::uint64_t dev = static_cast<std::uint64_t>(i);
    for (std::uint64_t attempt = 0; attempt < 100; ++attempt) {
        p.C = lognormal_draw(spec.mean_C, spec.rel_sigma, spec.seed, rng::stream::param_c, dev,
                             attempt);
        p.R = lognormal_draw(spec.mean_R, spec.rel_sigma, spec.seed, rng::stream::param_r, dev,
                             attempt);
        p.P = lognormal_draw(spec.mean_P, spec.rel_sigma, spec.seed, rng::stream::param_p, dev,
                             attempt);
        if (band_feasible(p, band)) {
            resamples += static_cast<int>(attempt);
            return p;
        }
    }
    throw ScenarioError("population", "device " + std::to_string(i) +
                                          " has no feasible parameter draw after 100 attempts");
}

} // namespace

std::vector<std::pair<TclParams, Deadband>> sample_population(const PopulationSpec& spec) {
    std::vector<std::pair<TclParams, Deadband>> out;
    out.reserve(static_cast<std::size_t>(spec.n));
    const Deadband band = spec.band();
    int resamples = 0;
    for (std::int64_t i = 0; i < spec.n; ++i) {
        out.emplace_back(sample_device(spec, i, band, resamples), band);
    }
    return out;
}

TclState phase_state(const TclParams& p, const Deadband& band, double u) {
    const CycleTimes ct = cycle_times(p, band);
    if (u < ct.duty) {
        // ON leg, travelled u * period minutes down from the upper limit.
        return {drift(band.hi, Mode::On, p, u * ct.period), Mode::On};
    }
    return {drift(band.lo, Mode::Off, p, u * ct.period - ct.t_on), Mode::Off};
}

Ensemble make_ensemble(const PopulationSpec& spec) {
    Ensemble e;
    e.spec = spec;
    const std::size_t n = static_cast<std::size_t>(spec.n);
    e.params.reserve(n);
    e.customer_band.reserve(n);
    e.theta.resize(n);
    e.mode.resize(n);
    e.ctrl.resize(n);
    e.switch_count.assign(n, 0);
    e.switches_at_complete.assign(n, 0);

    const Deadband band = spec.band();
    for (std::int64_t i = 0; i < spec.n; ++i) {
        const TclParams p = sample_device(spec, i, band, e.resample_count);
        e.params.push_back(p);
        e.customer_band.push_back(band);

        const double u =
            rng::uniform01(spec.seed, rng::stream::init_phase, static_cast<std::uint64_t>(i), 0);
        const TclState s = phase_state(p, band, u);
        const std::size_t idx = static_cast<std::size_t>(i);
        e.theta[idx] = s.theta;
        e.mode[idx] = s.mode;
        e.ctrl[idx].band_lo = band.lo;
        e.ctrl[idx].band_hi = band.hi;
    }
    return e;
}

double mean_period_min(const Ensemble& e) {
    double sum = 0.0;
    for (std::size_t i = 0; i < e.size(); ++i) {
        sum += cycle_times(e.params[i], e.customer_band[i]).period;
    }
    return sum / static_cast<double>(e.size());
}

Aggregate aggregate(const Ensemble& e) {
    Aggregate a;
    double power_kw = 0.0;
    double theta_sum = 0.0;
    std::int64_t on = 0;
    for (std::size_t i = 0; i < e.size(); ++i) {
        power_kw += grid_power_kw(e.mode[i], e.params[i]);
        theta_sum += e.theta[i];
        on += e.mode[i] == Mode::On ? 1 : 0;
    }
    const double n = static_cast<double>(e.size());
    a.power_mw = power_kw / 1000.0;
    a.mean_theta = theta_sum / n;
    a.frac_on = static_cast<double>(on) / n;
    return a;
}

HistogramSnapshot histogram(const Ensemble& e, double bin_width) {
    double lo = e.customer_band[0].lo;
    double hi = e.customer_band[0].hi;
    for (const Deadband& b : e.customer_band) {
        lo = std::min(lo, b.lo);
        hi = std::max(hi, b.hi);
    }
    // Diffusion accumulated over one cycle sets the scale of the tails.
    const double spread = e.spec.noise_sigma * std::sqrt(mean_period_min(e));
    const double pad = std::max(5.0 * spread, 2.0 * bin_width);
    lo -= pad;
    hi += pad;
    const std::size_t bins = static_cast<std::size_t>(std::ceil((hi - lo) / bin_width));

    HistogramSnapshot h;
    h.bin_edges.resize(bins + 1);
    for (std::size_t b = 0; b <= bins; ++b) {
        h.bin_edges[b] = lo + static_cast<double>(b) * bin_width;
    }
    h.density_on.assign(bins, 0.0);
    h.density_off.assign(bins, 0.0);

    const double w = 1.0 / (bin_width * static_cast<double>(e.size()));
    for (std::size_t i = 0; i < e.size(); ++i) {
        const double pos = (e.theta[i] - lo) / bin_width;
        const std::size_t b =
            pos <= 0.0 ? 0 : std::min(bins - 1, static_cast<std::size_t>(pos));
        (e.mode[i] == Mode::On ? h.density_on : h.density_off)[b] += w;
    }
    return h;
}

} // namespace tclsim
