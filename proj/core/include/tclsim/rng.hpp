#pragma once

#include <cstdint>
#include <cmath>

// Counter-based random streams. Every draw is a pure hash of
// (seed, stream, device index, counter), so serial and parallel execution
// produce bit-identical noise sequences and any draw can be regenerated
// without storing generator state.

namespace tclsim::rng {

namespace stream {
// Substream ids; keep stable, they are part of the reproducibility contract.
inline constexpr std::uint64_t noise = 0;
inline constexpr std::uint64_t param_c = 1;
inline constexpr std::uint64_t param_r = 2;
inline constexpr std::uint64_t param_p = 3;
inline constexpr std::uint64_t init_phase = 4;
inline constexpr std::uint64_t hybrid_select = 5;
} // namespace stream

inline constexpr std::uint64_t golden = 0x9E3779B97F4A7C15ull;

/// SplitMix64 finalizer (Stafford mix13).
inline std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
}

/// Hash of the full draw coordinate.
inline std::uint64_t hash4(std::uint64_t seed, std::uint64_t strm, std::uint64_t device,
                           std::uint64_t counter) {
    std::uint64_t h = mix64(seed + golden);
    h = mix64(h ^ (strm * golden + 0x632BE59BD9B4E019ull));
    h = mix64(h ^ (device * golden + 0xC2B2AE3D27D4EB4Full));
    h = mix64(h ^ (counter * golden + 0x165667B19E3779F9ull));
    return h;
}

/// Uniform in [0, 1).
inline double uniform01(std::uint64_t seed, std::uint64_t strm, std::uint64_t device,
                        std::uint64_t counter) {
    return static_cast<double>(hash4(seed, strm, device, counter) >> 11) * 0x1.0p-53;
}

/// Standard normal via Box-Muller on two hashed uniforms.
inline double gaussian(std::uint64_t seed, std::uint64_t strm, std::uint64_t device,
                       std::uint64_t counter) {
    const std::uint64_t h0 = hash4(seed, strm, device, 2 * counter);
    const std::uint64_t h1 = hash4(seed, strm, device, 2 * counter + 1);
    // u1 in (0, 1] so the log is finite.
    const double u1 = (static_cast<double>(h0 >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = static_cast<double>(h1 >> 11) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
}

} // namespace tclsim::rng
