#pragma once

#include "tclsim/analysis.hpp"
#include "tclsim/simulator.hpp"

#include <string>
#include <vector>

namespace tclsim {

/// Render the trace (one panel per event window, or the full series when the
/// schedule is empty) plus one temperature panel per probed device, with the
/// deadband limits drawn as horizontal guides. Output is a single
/// self-contained SVG document with no external assets.
std::string render_svg(const PowerTrace& trace, const std::vector<DeviceProbe>& probes);

void emit_svg(const PowerTrace& trace, const std::vector<DeviceProbe>& probes,
              const std::string& path);

} // namespace tclsim
