#pragma once

#include <numbers>

namespace pdcsim::constants {

// CODATA 2018 values. h, e, k_B are exact by SI definition; derived values are
// computed (not rounded) so identities like flux_quantum == pi*hbar/e hold to
// machine precision.
inline constexpr double pi = std::numbers::pi;
inline constexpr double planck = 6.62607015e-34;            // J*s
inline constexpr double hbar = planck / (2.0 * pi);         // J*s
inline constexpr double elementary_charge = 1.602176634e-19; // C
inline constexpr double flux_quantum = planck / (2.0 * elementary_charge); // Wb
inline constexpr double vacuum_permeability = 1.25663706212e-6; // H/m
inline constexpr double boltzmann = 1.380649e-23;            // J/K

} // namespace pdcsim::constants
