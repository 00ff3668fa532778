#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "pdcsim/circuit.hpp"
#include "pdcsim/errors.hpp"

namespace pdcsim {

/// One normal mode of the junction-loaded resonator A.
///
/// The mode function is piecewise sinusoidal,
///   mu(x) = -A cos[k (x + l_a)]      for -l_a <= x <= x_J,
///   mu(x) =  A B cos[k (x - l_a)]    for  x_J <= x <= +l_a,
/// open at both ends, with a flux jump Delta = mu(x_J+) - mu(x_J-) across the
/// junction. Normalization: C0 Int mu^2 dx + C_J Delta^2 = C_Sigma, A > 0.
struct ModeSolution {
    int index;                 // m >= 1
    double wavevector;         // k_m [1/m]
    double frequency;          // omega_m = k_m * v [rad/s]
    double relative_amplitude; // B_m
    double normalization;      // A_m > 0
    double gap_amplitude;      // Delta_m = mu(x_J+) - mu(x_J-)
    double effective_inductance; // L_m, 1/L_m = C_Sigma * omega_m^2 [H]
};

namespace detail {

// Dimensionless pieces of the wave-vector equation at z = k*l_a, xt = x_J/l_a:
//   S-(z) = sin[z(1-xt)], S+(z) = sin[z(1+xt)],
//   J(z)  = L0*l_a/L_J - z^2 * C_J/(C0*l_a).
struct ResidualParts {
    double s_minus, s_plus, sin2z, j;
};

inline ResidualParts residual_parts(double z, double xt,
                                    double l0_la_over_lj, double cj_over_c0la) {
    ResidualParts r;
    r.s_minus = std::sin(z * (1.0 - xt));
    r.s_plus = std::sin(z * (1.0 + xt));
    r.sin2z = std::sin(2.0 * z);
    r.j = l0_la_over_lj - z * z * cj_over_c0la;
    return r;
}

// Entire (pole-free) residual R(z) = z S+ S- - J(z) sin(2z). Multiplying the
// cotangent form of the wave-vector equation by S+ S- turns its tan/cot poles
// into ordinary zeros; R's sign changes are exactly the equation's roots.
inline double residual_z(double z, double xt,
                         double l0_la_over_lj, double cj_over_c0la) {
    const ResidualParts r = residual_parts(z, xt, l0_la_over_lj, cj_over_c0la);
    return z * r.s_plus * r.s_minus - r.j * r.sin2z;
}

// Relative junction-current residual at a candidate root, evaluated with the
// division-free null vector (c_left, c_right) = (S-, S+): both sides of the
// current-matching condition compared on a common scale. Pole-safe.
inline double kirchhoff_residual_z(double z, double xt,
                                   double l0_la_over_lj, double cj_over_c0la) {
    const ResidualParts r = residual_parts(z, xt, l0_la_over_lj, cj_over_c0la);
    const double lhs = z * r.s_plus * r.s_minus; // segment current through the gap
    const double rhs = r.j * r.sin2z;            // junction branch current
    const double scale = std::max(std::abs(lhs), std::abs(rhs));
    if (scale < 1e-30)
        return 0.0; // degenerate coincidence: both halves resonate; genuine root
    return std::abs(lhs - rhs) / scale;
}

// A refined root is kept when the back-substituted current balance holds, or
// when the residual is within a Newton step of 1e-10 of a true zero. The
// second path matters in the stiff-junction limit, where the residual slope
// at a genuine root is ~L0*l_a/L_J and the balance test loses all precision.
inline bool accept_root(double z, double xt,
                        double l0_la_over_lj, double cj_over_c0la) {
    if (kirchhoff_residual_z(z, xt, l0_la_over_lj, cj_over_c0la) < 1e-6)
        return true;
    const double h = 1e-8;
    const double r = residual_z(z, xt, l0_la_over_lj, cj_over_c0la);
    const double slope = (residual_z(z + h, xt, l0_la_over_lj, cj_over_c0la) -
                          residual_z(z - h, xt, l0_la_over_lj, cj_over_c0la)) /
                         (2.0 * h);
    return std::abs(r) <= std::abs(slope) * 1e-10;
}

struct ZProblem {
    double xt;             // x_J / l_a
    double l0_la_over_lj;  // L0 * l_a / L_J
    double cj_over_c0la;   // C_J / (C0 * l_a)
};

inline ZProblem z_problem(const CircuitParameters& p, const DerivedCircuit& d) {
    ZProblem zp;
    zp.xt = p.squid_position / p.half_length_a;
    zp.l0_la_over_lj = p.inductance_per_length * p.half_length_a / d.josephson_inductance;
    zp.cj_over_c0la = d.junction_capacitance /
                      (p.capacitance_per_length * p.half_length_a);
    return zp;
}

// Bracketing bisection on the residual; assumes a sign change in [lo, hi].
inline double bisect_z(double lo, double hi, const ZProblem& zp) {
    double flo = residual_z(lo, zp.xt, zp.l0_la_over_lj, zp.cj_over_c0la);
    for (int i = 0; i < 200 && hi - lo > 1e-12; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fmid = residual_z(mid, zp.xt, zp.l0_la_over_lj, zp.cj_over_c0la);
        if ((flo <= 0.0) == (fmid <= 0.0)) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace detail

/// Pole-free residual of the wave-vector equation at wavevector k [1/m].
/// Sign changes occur exactly at the normal-mode wavevectors. C0 and L0 are
/// recovered from the derived record (C_Sigma, C_J, v).
inline double transcendental_residual(double k, const DerivedCircuit& d,
                                      double x_J, double l_a) {
    const double z = k * l_a;
    const double xt = x_J / l_a;
    const double c0 = (d.total_capacitance - d.junction_capacitance) / (2.0 * l_a);
    const double l0 = 1.0 / (c0 * d.group_velocity * d.group_velocity);
    return detail::residual_z(z, xt, l0 * l_a / d.josephson_inductance,
                              d.junction_capacitance / (c0 * l_a));
}

/// Smallest n_modes positive roots k_m, ascending, each refined to
/// |dk|*l_a < 1e-12. Scan: 1e4 points per pi of k*l_a over (0, 3pi],
/// auto-extended once; candidates are filtered by back-substituting the
/// division-free null vector into the junction current condition.
inline std::vector<double> solve_wavevectors(const CircuitParameters& p, int n_modes) {
    if (n_modes < 1)
        throw ConfigError("n_modes must be >= 1");
    const DerivedCircuit d = derive(p);
    const detail::ZProblem zp = detail::z_problem(p, d);

    const double points_per_pi = 1e4;
    double z_max = std::max(3.0 * constants::pi,
                            (0.5 * n_modes + 1.0) * constants::pi);
    std::vector<double> roots;
    for (int attempt = 0; attempt < 2; ++attempt) {
        roots.clear();
        const long n_pts = std::lround(points_per_pi * z_max / constants::pi);
        const double dz = z_max / static_cast<double>(n_pts);
        double z_prev = dz;
        double f_prev = detail::residual_z(z_prev, zp.xt, zp.l0_la_over_lj, zp.cj_over_c0la);
        for (long i = 2; i <= n_pts && static_cast<int>(roots.size()) < n_modes; ++i) {
            const double z = dz * static_cast<double>(i);
            const double f = detail::residual_z(z, zp.xt, zp.l0_la_over_lj, zp.cj_over_c0la);
            if ((f_prev <= 0.0) != (f <= 0.0)) {
                const double root = detail::bisect_z(z_prev, z, zp);
                // Reject spurious sign changes of the reformulated residual.
                if (detail::accept_root(root, zp.xt, zp.l0_la_over_lj,
                                        zp.cj_over_c0la))
                    roots.push_back(root / p.half_length_a);
            }
            z_prev = z;
            f_prev = f;
        }
        if (static_cast<int>(roots.size()) >= n_modes)
            return roots;
        z_max *= 2.0; // one window extension before giving up
    }
    throw RootNotFound("found " + std::to_string(roots.size()) + " of " +
                       std::to_string(n_modes) + " modes in k*l_a window (0, " +
                       std::to_string(z_max) + "]");
}

/// Amplitude ratio B_m of the right segment to the left segment,
/// B = sin[k(x_J + l_a)] / sin[k(l_a - x_J)].
inline double relative_amplitude(double k_m, double x_J, double l_a) {
    const double num = std::sin(k_m * (x_J + l_a));
    const double den = std::sin(k_m * (l_a - x_J));
    if (std::abs(den) < 1e-12)
        throw DegenerateMode("relative amplitude undefined: left-segment factor "
                             "vanishes at k*l_a = " + std::to_string(k_m * l_a));
    return num / den;
}

/// Normalization A_m > 0 and junction gap amplitude Delta_m, from the
/// closed-form piecewise integral of the squared mode function:
///   C0 [I_left + B^2 I_right] + C_J Delta_hat^2 = C_Sigma / A^2,
/// with I = u/2 + sin(2u)/4 over each segment (antiderivative of cos^2).
inline std::pair<double, double> normalize_mode(double k_m, double B_m,
                                                const CircuitParameters& p) {
    const DerivedCircuit d = derive(p);
    const double u_plus = k_m * (p.squid_position + p.half_length_a);
    const double u_minus = k_m * (p.half_length_a - p.squid_position);
    const double i_left = (0.5 * u_plus + 0.25 * std::sin(2.0 * u_plus)) / k_m;
    const double i_right = B_m * B_m *
                           (0.5 * u_minus + 0.25 * std::sin(2.0 * u_minus)) / k_m;
    const double delta_hat = B_m * std::cos(u_minus) + std::cos(u_plus);
    const double norm_hat = p.capacitance_per_length * (i_left + i_right) +
                            d.junction_capacitance * delta_hat * delta_hat;
    const double A = std::sqrt(d.total_capacitance / norm_hat);
    return {A, A * delta_hat};
}

/// Evaluate the mode function mu(x) on [-l_a, l_a].
inline double mode_function(const ModeSolution& m, double x_J, double l_a, double x) {
    if (x <= x_J)
        return -m.normalization * std::cos(m.wavevector * (x + l_a));
    return m.normalization * m.relative_amplitude * std::cos(m.wavevector * (x - l_a));
}

/// The first n_modes full mode solutions, ascending in k.
inline std::vector<ModeSolution> mode_spectrum(const CircuitParameters& p, int n_modes) {
    const DerivedCircuit d = derive(p);
    const std::vector<double> ks = solve_wavevectors(p, n_modes);
    std::vector<ModeSolution> modes;
    modes.reserve(ks.size());
    for (int m = 0; m < n_modes; ++m) {
        ModeSolution s;
        s.index = m + 1;
        s.wavevector = ks[static_cast<size_t>(m)];
        s.frequency = s.wavevector * d.group_velocity;
        s.relative_amplitude = relative_amplitude(s.wavevector, p.squid_position,
                                                  p.half_length_a);
        const auto [A, delta] = normalize_mode(s.wavevector, s.relative_amplitude, p);
        s.normalization = A;
        s.gap_amplitude = delta;
        s.effective_inductance = 1.0 / (d.total_capacitance * s.frequency * s.frequency);
        modes.push_back(s);
    }
    return modes;
}

/// The m = 1 mode; the dynamics modules use only this one.
inline ModeSolution fundamental_mode(const CircuitParameters& p) {
    return mode_spectrum(p, 1).front();
}

} // namespace pdcsim
