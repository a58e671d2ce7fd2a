// constants.hpp — unit conventions shared by the whole library.
//
// Energies and frequencies are in GHz with hbar = 1, magnetic fields in Tesla.
// The conjugate time unit is then 1/GHz = 1 ns; the public dynamics API takes
// seconds and converts at the boundary.

#pragma once

namespace spincavity {

// Bohr magneton over Planck constant, GHz per Tesla
inline constexpr double kMuB = 13.9962449;

inline constexpr double kInvGHzPerSecond = 1e9;  // 1 s = 1e9 ns

inline constexpr double seconds_to_internal(double t_seconds) {
    return t_seconds * kInvGHzPerSecond;
}

inline constexpr double internal_to_seconds(double t_inv_ghz) {
    return t_inv_ghz / kInvGHzPerSecond;
}

}  // namespace spincavity
