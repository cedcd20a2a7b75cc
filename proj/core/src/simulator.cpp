#include "tclsim/simulator.hpp"

#include "tclsim/rng.hpp"
#include "tclsim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>
#include <vector>

namespace tclsim {

Simulator::Simulator(const PopulationSpec& spec, double dt_min, int threads)
    : ens_(make_ensemble(spec)), dt_(dt_min), threads_(std::max(1, threads)) {
    const std::size_t n = ens_.size();
    fp_on_.resize(n);
    decay_.resize(n);
    sig_sqdt_.resize(n);
    step_drift_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const TclParams& p = ens_.params[i];
        const double tau = time_constant_min(p);
        fp_on_[i] = branch_fixed_point(Mode::On, p);
        decay_[i] = std::exp(-dt_ / tau);
        sig_sqdt_[i] = p.noise_sigma * std::sqrt(dt_);
        // Fastest boundary approach rate of either leg, times dt: the largest
        // distance a device can drift past a limit before the next decision.
        const Deadband& b = ens_.customer_band[i];
        const double off_rate = (p.theta_amb - b.lo) / tau;
        const double on_rate = (b.hi - fp_on_[i]) / tau;
        step_drift_[i] = dt_ * std::max(off_rate, on_rate);
    }
    mean_period_ = mean_period_min(ens_);
}

void Simulator::init_steady_state() {
    const auto burn_steps = static_cast<std::int64_t>(std::ceil(2.0 * mean_period_ / dt_));
    advance_steps(burn_steps);
    step_zero_ = step_;
    ens_.time_min = 0.0;
}

bool Simulator::all_baseline() const {
    return std::all_of(ens_.ctrl.begin(), ens_.ctrl.end(),
                       [](const DeviceCtrl& c) { return c.program == Program::Baseline; });
}

void Simulator::install(const Command& cmd, std::uint64_t event_index) {
    const double t = time_min();

    for (const DeviceCtrl& c : ens_.ctrl) {
        if (c.program != Program::Baseline) {
            throw ScenarioError("events",
                                "overlapping protocols: a device is still executing a previous "
                                "command at t=" +
                                    std::to_string(t));
        }
    }

    auto flip = [&](std::size_t i, Mode m) {
        if (ens_.mode[i] != m) {
            ens_.mode[i] = m;
            ++ens_.switch_count[i];
        }
    };

    auto install_sp1 = [&](std::size_t i, Direction dir) {
        DeviceCtrl& c = ens_.ctrl[i];
        const double eps = step_drift_[i];
        if (dir == Direction::Down) {
            if (ens_.mode[i] != Mode::On) {
                return; // OFF devices finish immediately: stay Baseline
            }
            flip(i, Mode::Off);
            c.program = Program::Sp1;
            c.phase = sp1_phase::forced;
            c.direction = dir;
            c.saved_theta = std::clamp(ens_.theta[i], c.band_lo + eps, c.band_hi);
        } else {
            if (ens_.mode[i] != Mode::Off) {
                return;
            }
            flip(i, Mode::On);
            c.program = Program::Sp1;
            c.phase = sp1_phase::forced;
            c.direction = dir;
            c.saved_theta = std::clamp(ens_.theta[i], c.band_lo, c.band_hi - eps);
        }
    };

    auto install_sp2 = [&](std::size_t i, double delta) {
        DeviceCtrl& c = ens_.ctrl[i];
        c.program = Program::Sp2;
        c.delta = delta;
        c.saved_lo = c.band_lo;
        c.saved_hi = c.band_hi;
        c.tp_lo = c.band_lo + std::min(0.0, delta);
        c.tp_hi = c.band_hi + std::max(0.0, delta);
    };

    auto install_sp3 = [&](std::size_t i, Direction dir, double width) {
        DeviceCtrl& c = ens_.ctrl[i];
        c.program = Program::Sp3;
        c.direction = dir;
        c.width = width;
        c.saved_lo = c.band_lo;
        c.saved_hi = c.band_hi;
        const Mode pulse_from = dir == Direction::Down ? Mode::On : Mode::Off;
        if (ens_.mode[i] == pulse_from) {
            flip(i, dir == Direction::Down ? Mode::Off : Mode::On);
            c.phase = sp3_phase::pulse_hold;
            c.deadline = t + width;
        } else {
            c.phase = sp3_phase::wait_cross;
            c.deadline = 0.0;
        }
    };

    const std::size_t n = ens_.size();
    std::visit(
        [&](const auto& c) {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, UnsafeHold>) {
                for (std::size_t i = 0; i < n; ++i) {
                    DeviceCtrl& dc = ens_.ctrl[i];
                    dc.saved_mode = ens_.mode[i];
                    dc.program = Program::UnsafeHold;
                    dc.hold_restore = c.restore;
                    dc.deadline = t + c.hold_min;
                    flip(i, c.target_mode);
                }
            } else if constexpr (std::is_same_v<T, UnsafeShift>) {
                for (DeviceCtrl& dc : ens_.ctrl) {
                    dc.band_lo += c.delta;
                    dc.band_hi += c.delta;
                }
                // Stays Baseline: the thermostat acts on the shifted band at
                // the next step and stranded devices switch then.
            } else if constexpr (std::is_same_v<T, Sp1>) {
                for (std::size_t i = 0; i < n; ++i) {
                    install_sp1(i, c.direction);
                }
            } else if constexpr (std::is_same_v<T, Sp2>) {
                for (std::size_t i = 0; i < n; ++i) {
                    install_sp2(i, c.delta);
                }
            } else if constexpr (std::is_same_v<T, Sp3>) {
                for (std::size_t i = 0; i < n; ++i) {
                    install_sp3(i, c.direction, c.width_min);
                }
            } else if constexpr (std::is_same_v<T, Hybrid>) {
                // Deterministic seeded selection of exactly floor(p*n)
                // devices, independent of device state: rank per-event hashes.
                const auto k = static_cast<std::size_t>(c.p * static_cast<double>(n));
                std::vector<std::uint64_t> h(n);
                for (std::size_t i = 0; i < n; ++i) {
                    h[i] = rng::hash4(ens_.spec.seed, rng::stream::hybrid_select, i, event_index);
                }
                std::vector<std::size_t> order(n);
                std::iota(order.begin(), order.end(), std::size_t{0});
                std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k),
                                 order.end(),
                                 [&](std::size_t a, std::size_t b) { return h[a] < h[b]; });
                std::vector<bool> pulse_part(n, false);
                for (std::size_t j = 0; j < k; ++j) {
                    pulse_part[order[j]] = true;
                }
                const Direction dir = c.delta > 0.0 ? Direction::Down : Direction::Up;
                for (std::size_t i = 0; i < n; ++i) {
                    if (pulse_part[i]) {
                        if (c.sp3_width_min) {
                            install_sp3(i, dir, *c.sp3_width_min);
                        } else {
                            install_sp1(i, dir);
                        }
                    } else {
                        install_sp2(i, c.delta);
                    }
                }
            }
        },
        cmd);
}

double Simulator::run_range(std::size_t d0, std::size_t d1, std::int64_t k0, std::int64_t k1) {
    const std::uint64_t seed = ens_.spec.seed;
    const double theta_amb = ens_.spec.theta_amb;
    const bool monitor = band_monitor_;
    double worst = 0.0;

    for (std::size_t i = d0; i < d1; ++i) {
        double th = ens_.theta[i];
        Mode m = ens_.mode[i];
        DeviceCtrl& c = ens_.ctrl[i];
        const double fp_on = fp_on_[i];
        const double decay = decay_[i];
        const double sig = sig_sqdt_[i];
        std::uint32_t switches = ens_.switch_count[i];

        for (std::int64_t k = k0; k < k1; ++k) {
            const double fp = m == Mode::On ? fp_on : theta_amb;
            th = fp + (th - fp) * decay;
            if (sig > 0.0) {
                th += sig * rng::gaussian(seed, rng::stream::noise, i,
                                          static_cast<std::uint64_t>(k));
            }
            const double t_next = static_cast<double>(k + 1 - step_zero_) * dt_;
            const Program before = c.program;
            const Mode m_new = controller_step(c, th, m, t_next);
            if (m_new != m) {
                ++switches;
                m = m_new;
            }
            if (before != Program::Baseline && c.program == Program::Baseline) {
                ens_.switches_at_complete[i] = switches;
            }
            if (monitor) {
                const Deadband& b = ens_.customer_band[i];
                const double exceed = std::max(th - b.hi, b.lo - th);
                if (exceed > 0.0) {
                    worst = std::max(worst, exceed / step_drift_[i]);
                }
            }
        }
        ens_.theta[i] = th;
        ens_.mode[i] = m;
        ens_.switch_count[i] = switches;
    }
    return worst;
}

void Simulator::advance_steps(std::int64_t nsteps) {
    if (nsteps <= 0) {
        return;
    }
    const std::int64_t k0 = step_;
    const std::int64_t k1 = step_ + nsteps;
    const std::size_t n = ens_.size();
    double worst = 0.0;

    // Thread spawns only pay off when a segment carries real work.
    const bool tiny = static_cast<double>(n) * static_cast<double>(nsteps) < 2e5;
    if (threads_ <= 1 || n < 256 || tiny) {
        worst = run_range(0, n, k0, k1);
    } else {
        const std::size_t nt = static_cast<std::size_t>(threads_);
        const std::size_t chunk = (n + nt - 1) / nt;
        std::vector<std::future<double>> futs;
        futs.reserve(nt);
        for (std::size_t c = 0; c < nt; ++c) {
            const std::size_t d0 = c * chunk;
            const std::size_t d1 = std::min(n, d0 + chunk);
            if (d0 >= d1) {
                break;
            }
            futs.push_back(std::async(std::launch::async,
                                      [this, d0, d1, k0, k1] { return run_range(d0, d1, k0, k1); }));
        }
        for (auto& f : futs) {
            worst = std::max(worst, f.get());
        }
    }

    band_excursion_steps_ = std::max(band_excursion_steps_, worst);
    step_ = k1;
    ens_.time_min = time_min();
}

} // namespace tclsim
