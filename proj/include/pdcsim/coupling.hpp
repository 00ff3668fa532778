#pragma once

#include <cmath>
#include <cstddef>
#include <exception>
#include <string>
#include <vector>

#include <pdcsim/circuit.hpp>
#include <pdcsim/constants.hpp>
#include <pdcsim/errors.hpp>
#include <pdcsim/mode_solver.hpp>
#include <pdcsim/parallel.hpp>

namespace pdcsim {

/// Flux-pump and nonlinearity constants of one resolved circuit
/// configuration.  All rates are angular frequencies in rad/s.
struct CouplingConstants {
    double phi_b = 0.0;         ///< Drive-flux amplitude threading the loop [Wb].
    double chi = 0.0;           ///< Parametric down-conversion strength [rad/s].
    double kerr = 0.0;          ///< Self-Kerr coefficient of the primary mode [rad/s].
    double omega_a = 0.0;       ///< Fundamental frequency of the primary resonator [rad/s].
    double omega_b = 0.0;       ///< Coupler-resonator frequency [rad/s].
    double resolved_l_b = 0.0;  ///< Coupler half-length realizing omega_b [m].
};

/// Magnetic flux amplitude coupled into the junction loop by the coupler
/// mode's zero-point current:
///   phi_b = (mu0 s / 2pi) sqrt(hbar omega_b / (2 L0 l_b)) ln((b1+b2)/b2)
/// with s the loop segment length, b1 its width and b2 its offset from the
/// coupler's center conductor.
inline double drive_flux_amplitude(const CircuitParameters& p,
                                   double omega_b, double l_b) {
    if (!(omega_b > 0.0) || !(l_b > 0.0))
        throw ConfigError("drive_flux_amplitude requires omega_b > 0 and l_b > 0");
    const double geometry =
        std::log((p.loop_width + p.loop_offset) / p.loop_offset);
    const double current_scale = std::sqrt(
        constants::hbar * omega_b / (2.0 * p.inductance_per_length * l_b));
    return constants::vacuum_permeability * p.loop_length /
           (2.0 * constants::pi) * current_scale * geometry;
}

/// Parametric coupling strength chi [rad/s] for the given fundamental mode.
/// Grows as tan(pi f) toward the half-quantum bias and quadratically in the
/// mode amplitude jump across the junction.
inline double coupling_strength(const CircuitParameters& p,
                                const ModeSolution& mode, double phi_b) {
    check_flux_ratio(p.external_flux_ratio);
    const DerivedCircuit d = derive(p);
    const double delta2 = mode.gap_amplitude * mode.gap_amplitude;
    return std::tan(constants::pi * p.external_flux_ratio) *
           (phi_b / constants::flux_quantum) * constants::pi * delta2 /
           (4.0 * d.josephson_inductance * d.total_capacitance * mode.frequency);
}

/// Self-Kerr coefficient K [rad/s] of the primary mode induced by the quartic
/// junction potential.  The factor 6 counts the normally-ordered quartic
/// pairings that survive in the rotating frame; flux_zpf_sq is the squared
/// zero-point flux amplitude of the mode across the junction.
inline double kerr_coefficient(const CircuitParameters& p,
                               const ModeSolution& mode) {
    check_flux_ratio(p.external_flux_ratio);
    const DerivedCircuit d = derive(p);
    const double delta2 = mode.gap_amplitude * mode.gap_amplitude;
    const double reduced = 2.0 * constants::pi / constants::flux_quantum;
    const double flux_zpf_sq = constants::hbar * delta2 /
                               (2.0 * d.total_capacitance * mode.frequency);
    return 6.0 * reduced * reduced * flux_zpf_sq * flux_zpf_sq /
           (24.0 * d.josephson_inductance * constants::hbar);
}

/// Coupler half-length placing the coupler fundamental at twice the primary
/// frequency: pi v / (2 l_b) = 2 omega_a.
inline double resolve_coupler_length(const CircuitParameters& p,
                                     double omega_a) {
    if (!(omega_a > 0.0))
        throw ConfigError("resolve_coupler_length requires omega_a > 0");
    return constants::pi * derive(p).group_velocity / (4.0 * omega_a);
}

/// Resolves the fundamental mode, the coupler length (unless fixed in the
/// parameters), the drive flux, chi and K for one circuit configuration.
inline CouplingConstants compute_coupling(const CircuitParameters& p) {
    validate(p);
    const ModeSolution mode = fundamental_mode(p);
    CouplingConstants out;
    out.omega_a = mode.frequency;
    out.resolved_l_b = p.half_length_b > 0.0
                           ? p.half_length_b
                           : resolve_coupler_length(p, mode.frequency);
    out.omega_b = constants::pi * derive(p).group_velocity /
                  (2.0 * out.resolved_l_b);
    out.phi_b = drive_flux_amplitude(p, out.omega_b, out.resolved_l_b);
    out.chi = coupling_strength(p, mode, out.phi_b);
    out.kerr = kerr_coefficient(p, mode);
    return out;
}

/// One cell of the two-axis (flux x junction position) coupling sweep.
struct CouplingMapCell {
    double flux_ratio = 0.0;
    double position_ratio = 0.0;  ///< x_J / l_a
    double chi = 0.0;             ///< rad/s; 0 when the cell errored
    double kerr = 0.0;            ///< rad/s; 0 when the cell errored
    double omega_a = 0.0;         ///< rad/s; 0 when the cell errored
    std::string error;            ///< empty when the cell resolved cleanly
};

/// Evaluates chi, K and omega_a over the outer product of flux and position
/// grids.  The mode is re-solved at every cell because the junction
/// inductance shifts the spectrum with flux.  Cell failures are recorded
/// in-place and do not abort the sweep.  Cells are independent; jobs > 1
/// fans them out with block-deterministic output placement.
inline std::vector<CouplingMapCell> coupling_map(
    const CircuitParameters& base, const std::vector<double>& flux_grid,
    const std::vector<double>& position_grid, int jobs = 1) {
    std::vector<CouplingMapCell> cells(flux_grid.size() * position_grid.size());
    parallel_for(cells.size(), jobs, [&](std::size_t idx) {
        const std::size_t i = idx / position_grid.size();
        const std::size_t j = idx % position_grid.size();
        CouplingMapCell& cell = cells[idx];
        cell.flux_ratio = flux_grid[i];
        cell.position_ratio = position_grid[j];
        try {
            CircuitParameters p = base;
            p.external_flux_ratio = flux_grid[i];
            p.squid_position = position_grid[j] * p.half_length_a;
            const CouplingConstants cc = compute_coupling(p);
            cell.chi = cc.chi;
            cell.kerr = cc.kerr;
            cell.omega_a = cc.omega_a;
        } catch (const std::exception& e) {
            cell.error = e.what();
        }
    });
    return cells;
}

}  // namespace pdcsim
