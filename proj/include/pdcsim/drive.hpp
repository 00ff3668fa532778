#pragma once

#include <pdcsim/constants.hpp>
#include <pdcsim/errors.hpp>

namespace pdcsim {

/// Parameters of the pump drive applied to the coupler mode and of the
/// dissipative environment seen by the two modes.  All rates are angular
/// frequencies in rad/s.
struct DriveParameters {
    /// Pump amplitude driving the coupler mode (rad/s).
    double rabi_frequency = 2.0 * constants::pi * 0.03e6;
    /// Energy decay rate of the primary mode (rad/s).
    double kappa_a = 2.0 * constants::pi * 2.0e6;
    /// Energy decay rate of the coupler mode (rad/s).
    double kappa_b = 2.0 * constants::pi * 0.2e6;
    /// Mean thermal occupation of the bath attached to the primary mode.
    double thermal_na = 0.0;
    /// Mean thermal occupation of the bath attached to the coupler mode.
    double thermal_nb = 0.0;

    /// Validates positivity constraints.  Throws ConfigError on violation.
    void validate() const {
        if (!(kappa_a > 0.0)) throw ConfigError("kappa_a must be positive");
        if (!(kappa_b > 0.0)) throw ConfigError("kappa_b must be positive");
        if (rabi_frequency < 0.0)
            throw ConfigError("rabi_frequency must be non-negative");
        if (thermal_na < 0.0 || thermal_nb < 0.0)
            throw ConfigError("thermal occupations must be non-negative");
    }
};

}  // namespace pdcsim
