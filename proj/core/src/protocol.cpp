#include "tclsim/protocol.hpp"

#include <cstdio>

namespace tclsim {

namespace {

std::string fmt_delta(double delta) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%+.3f", delta);
    return buf;
}

} // namespace

std::string command_label(const Command& cmd) {
    struct Labeler {
        std::string operator()(const UnsafeHold& c) const {
            return std::string("unsafe_hold_") + (c.target_mode == Mode::Off ? "off" : "on") +
                   "_" + std::to_string(static_cast<int>(c.hold_min)) + "min";
        }
        std::string operator()(const UnsafeShift& c) const {
            return "unsafe_shift" + fmt_delta(c.delta);
        }
        std::string operator()(const Sp1& c) const {
            return c.direction == Direction::Down ? "sp1_down" : "sp1_up";
        }
        std::string operator()(const Sp2& c) const { return "sp2_delta" + fmt_delta(c.delta); }
        std::string operator()(const Sp3& c) const {
            return std::string("sp3_") + (c.direction == Direction::Down ? "down" : "up") + "_" +
                   std::to_string(static_cast<int>(c.width_min)) + "min";
        }
        std::string operator()(const Hybrid& c) const {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "hybrid_p%.2f_delta%+.2f", c.p, c.delta);
            return buf;
        }
    };
    return std::visit(Labeler{}, cmd);
}

ControllerView view_of(const DeviceCtrl& c) {
    ControllerView v;
    v.program = c.program;
    v.phase = c.phase;
    v.active_band = {c.band_lo, c.band_hi};
    if (c.program == Program::Sp1) {
        v.saved_theta = c.saved_theta;
    }
    if (c.program == Program::Sp2 || c.program == Program::Sp3) {
        v.saved_band = Deadband{c.saved_lo, c.saved_hi};
    }
    if (c.program == Program::UnsafeHold) {
        v.hold_until = c.deadline;
    }
    if (c.program == Program::Sp3 &&
        (c.phase == sp3_phase::pulse_hold || c.phase == sp3_phase::timer_armed)) {
        v.timer_deadline = c.deadline;
    }
    return v;
}

} // namespace tclsim
