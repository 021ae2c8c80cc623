#pragma once

// Physical constants (CODATA 2018 exact values) and unit helpers.
// All angular frequencies are stored in rad/s internally; user-facing I/O is
// in Hz with an explicit 2*pi conversion at the boundary.

#include <numbers>

namespace smpd {

namespace constants {

inline constexpr double hbar = 1.054571817e-34;        // J s
inline constexpr double planck_h = 6.62607015e-34;     // J s
inline constexpr double boltzmann_k = 1.380649e-23;    // J/K
inline constexpr double flux_quantum = 2.067833848e-15;  // Wb, h/2e

inline constexpr double two_pi = 2.0 * std::numbers::pi;

}  // namespace constants

/// Hz -> rad/s
[[nodiscard]] constexpr double from_hz(double f) { return constants::two_pi * f; }
/// rad/s -> Hz
[[nodiscard]] constexpr double to_hz(double omega) { return omega / constants::two_pi; }

[[nodiscard]] constexpr double from_ghz(double f) { return from_hz(f * 1e9); }
[[nodiscard]] constexpr double from_mhz(double f) { return from_hz(f * 1e6); }
[[nodiscard]] constexpr double from_khz(double f) { return from_hz(f * 1e3); }
[[nodiscard]] constexpr double to_ghz(double omega) { return to_hz(omega) / 1e9; }
[[nodiscard]] constexpr double to_mhz(double omega) { return to_hz(omega) / 1e6; }
[[nodiscard]] constexpr double to_khz(double omega) { return to_hz(omega) / 1e3; }

}  // namespace smpd
