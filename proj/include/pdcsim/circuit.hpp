#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "pdcsim/constants.hpp"
#include "pdcsim/errors.hpp"

namespace pdcsim {

/// Full input record for the two-resonator circuit. SI units throughout;
/// the Josephson and charging energies are angular frequencies (rad/s),
/// i.e. energy divided by hbar.
struct CircuitParameters {
    double half_length_a = 6.0e-3;          // l_a [m]; resonator A spans [-l_a, l_a]
    double capacitance_per_length = 1.8e-10; // C0 [F/m]
    double inductance_per_length = 4.5e-7;  // L0 [H/m]
    double josephson_energy = 2.0 * constants::pi * 600.0e9; // E_J [rad/s]
    double charging_energy = 2.0 * constants::pi * 1.0e9;    // E_C [rad/s]
    double squid_position = 1.5e-3;         // x_J [m]; |x_J| < l_a
    double external_flux_ratio = 0.45;      // f = Phi'_e / Phi_0
    double loop_length = 6.0e-4;            // s [m]
    double loop_width = 1.0e-5;             // b1 [m]
    double loop_offset = 5.0e-6;            // b2 [m]
    double half_length_b = 0.0;             // l_b [m]; <= 0 means auto (omega_b = 2 omega_a)
    bool allow_extreme_flux = false;        // permit f in (0.49, 0.5)
};

/// Lumped quantities derived from CircuitParameters at the given flux bias.
struct DerivedCircuit {
    double effective_josephson_energy; // E_J(f) = E_J cos(pi f) [rad/s]
    double josephson_inductance;       // L_J [H]
    double junction_capacitance;       // C_J [F]
    double total_capacitance;          // C_Sigma = 2 C0 l_a + C_J [F]
    double group_velocity;             // v = 1/sqrt(C0 L0) [m/s]
};

inline void check_flux_ratio(double f) {
    if (!(f >= 0.0 && f < 0.5))
        throw FluxOutOfRange("flux ratio out of range: f = " + std::to_string(f) +
                             " not in [0, 0.5)");
}

/// Validate a parameter record for use in configuration-driven runs.
/// Throws ConfigError with a message naming the offending field.
inline void validate(const CircuitParameters& p) {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0))
            throw ConfigError(std::string(name) + " must be positive");
    };
    positive(p.half_length_a, "half_length_a");
    positive(p.capacitance_per_length, "capacitance_per_length");
    positive(p.inductance_per_length, "inductance_per_length");
    positive(p.josephson_energy, "josephson_energy");
    positive(p.charging_energy, "charging_energy");
    positive(p.loop_length, "loop_length");
    positive(p.loop_width, "loop_width");
    positive(p.loop_offset, "loop_offset");
    if (!(std::abs(p.squid_position) < p.half_length_a))
        throw ConfigError("squid_position must satisfy |x_J| < half_length_a");
    if (!(p.external_flux_ratio >= 0.0 && p.external_flux_ratio < 0.5))
        throw ConfigError("flux ratio out of range: external_flux_ratio must lie in [0, 0.5)");
    // tan(pi f) amplifies parameter noise near 0.5; the band (0.49, 0.5) needs
    // an explicit override.
    if (p.external_flux_ratio > 0.49 && !p.allow_extreme_flux)
        throw ConfigError("flux ratio out of range: external_flux_ratio > 0.49 requires "
                          "allow_extreme_flux");
}

/// E_J(f) = E_J cos(pi f) [rad/s]; strictly decreasing on [0, 0.5).
inline double effective_josephson_energy(const CircuitParameters& p) {
    check_flux_ratio(p.external_flux_ratio);
    return p.josephson_energy * std::cos(constants::pi * p.external_flux_ratio);
}

/// L_J = (Phi0/2pi)^2 / (hbar E_J(f)) [H]; diverges as f -> 0.5.
inline double josephson_inductance(const CircuitParameters& p) {
    const double ej = effective_josephson_energy(p); // rad/s
    const double phi0_bar = constants::flux_quantum / (2.0 * constants::pi);
    return phi0_bar * phi0_bar / (constants::hbar * ej);
}

/// All lumped derived quantities at the record's flux bias.
inline DerivedCircuit derive(const CircuitParameters& p) {
    DerivedCircuit d;
    d.effective_josephson_energy = effective_josephson_energy(p);
    d.josephson_inductance = josephson_inductance(p);
    // E_C = (2e)^2 / (2 C_J), with E_C stored as an angular frequency.
    const double two_e = 2.0 * constants::elementary_charge;
    d.junction_capacitance = two_e * two_e / (2.0 * constants::hbar * p.charging_energy);
    d.total_capacitance = 2.0 * p.capacitance_per_length * p.half_length_a + d.junction_capacitance;
    d.group_velocity = 1.0 / std::sqrt(p.capacitance_per_length * p.inductance_per_length);
    return d;
}

/// Bose-Einstein occupation 1/(exp(hbar w / k_B T) - 1); exact 0 at T = 0.
inline double thermal_occupation(double omega, double temperature) {
    if (temperature == 0.0)
        return 0.0;
    return 1.0 / std::expm1(constants::hbar * omega /
                            (constants::boltzmann * temperature));
}

/// Validity flags for the approximations behind the model. Pure diagnostic:
/// never throws, only reports.
struct RegimeDiagnostics {
    bool phase_regime_ok;   // E_J(f)/E_C >= 10
    bool flux_hierarchy_ok; // drive flux amplitude << static bias flux
    bool rwa_ok;            // chi / omega_a <= 1e-2
    double phase_regime_ratio;   // E_J(f)/E_C
    double flux_hierarchy_ratio; // phi_b * 2*beta_scale / (f * Phi0); inf at f = 0
    double rwa_ratio;            // chi / omega_a
};

inline RegimeDiagnostics validate_regime(const CircuitParameters& p,
                                         double phi_b, double chi, double omega_a,
                                         double beta_scale) {
    RegimeDiagnostics d;
    d.phase_regime_ratio = effective_josephson_energy(p) / p.charging_energy;
    d.phase_regime_ok = d.phase_regime_ratio >= 10.0;
    const double bias_flux = p.external_flux_ratio * constants::flux_quantum;
    if (bias_flux > 0.0) {
        d.flux_hierarchy_ratio = phi_b * 2.0 * beta_scale / bias_flux;
        d.flux_hierarchy_ok = d.flux_hierarchy_ratio <= 1e-2;
    } else {
        d.flux_hierarchy_ratio = std::numeric_limits<double>::infinity();
        d.flux_hierarchy_ok = false; // undefined at zero bias
    }
    d.rwa_ratio = chi / omega_a;
    d.rwa_ok = d.rwa_ratio <= 1e-2;
    return d;
}

} // namespace pdcsim
