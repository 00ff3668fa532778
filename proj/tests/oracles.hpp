#pragma once

// Independent numerical cross-checks used only by the test suite: brute-force
// quadrature of the mode inner products and a from-scratch root finder built
// on the raw junction-matching determinant.  These deliberately re-derive
// what the library computes in closed form.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include <pdcsim/circuit.hpp>
#include <pdcsim/errors.hpp>
#include <pdcsim/mode_solver.hpp>

namespace oracle {

/// Composite Simpson rule; `panels` is rounded up to the next even count.
inline double simpson(const std::function<double(double)>& f, double a,
                      double b, int panels) {
    if (panels % 2) ++panels;
    const double h = (b - a) / panels;
    double acc = f(a) + f(b);
    for (int i = 1; i < panels; ++i) acc += f(a + h * i) * (i % 2 ? 4.0 : 2.0);
    return acc * h / 3.0;
}

/// Mode function evaluated on an explicit segment, so the one-sided limits at
/// the junction are under the caller's control (the library's evaluator is
/// left-continuous there, which would bias the segment quadratures).
inline double mode_value(const pdcsim::ModeSolution& m, double l_a, double x,
                         bool right_segment) {
    if (right_segment)
        return m.normalization * m.relative_amplitude *
               std::cos(m.wavevector * (x - l_a));
    return -m.normalization * std::cos(m.wavevector * (x + l_a));
}

/// Spatial derivative of the mode function on an explicit segment.
inline double mode_slope(const pdcsim::ModeSolution& m, double l_a, double x,
                         bool right_segment) {
    if (right_segment)
        return -m.normalization * m.relative_amplitude * m.wavevector *
               std::sin(m.wavevector * (x - l_a));
    return m.normalization * m.wavevector * std::sin(m.wavevector * (x + l_a));
}

/// Capacitive inner product <mu_m, mu_n> = Int C0 mu_m mu_n dx
/// + C_J Delta_m Delta_n, quadrature split at the junction.
inline double capacitive_overlap(const pdcsim::CircuitParameters& p,
                                 const pdcsim::ModeSolution& m,
                                 const pdcsim::ModeSolution& n,
                                 int panels_per_side = 100000) {
    const double la = p.half_length_a, xj = p.squid_position;
    const auto left = [&](double x) {
        return mode_value(m, la, x, false) * mode_value(n, la, x, false);
    };
    const auto right = [&](double x) {
        return mode_value(m, la, x, true) * mode_value(n, la, x, true);
    };
    const double line = simpson(left, -la, xj, panels_per_side) +
                        simpson(right, xj, la, panels_per_side);
    return p.capacitance_per_length * line +
           pdcsim::derive(p).junction_capacitance * m.gap_amplitude *
               n.gap_amplitude;
}

/// Inverse-inductive inner product <mu_m', mu_n'> = Int (1/L0) mu_m' mu_n' dx
/// + (1/L_J) Delta_m Delta_n; equals delta_mn * C_Sigma * omega_m^2.
inline double inductive_overlap(const pdcsim::CircuitParameters& p,
                                const pdcsim::ModeSolution& m,
                                const pdcsim::ModeSolution& n,
                                int panels_per_side = 100000) {
    const double la = p.half_length_a, xj = p.squid_position;
    const auto left = [&](double x) {
        return mode_slope(m, la, x, false) * mode_slope(n, la, x, false);
    };
    const auto right = [&](double x) {
        return mode_slope(m, la, x, true) * mode_slope(n, la, x, true);
    };
    const pdcsim::DerivedCircuit d = pdcsim::derive(p);
    const double line = (simpson(left, -la, xj, panels_per_side) +
                         simpson(right, xj, la, panels_per_side)) /
                        p.inductance_per_length;
    return line +
           m.gap_amplitude * n.gap_amplitude / d.josephson_inductance;
}

/// Determinant of the 2x2 junction-matching system assembled directly from
/// the segment-current continuity and branch-current balance conditions, in
/// the unknown segment amplitudes.  Vanishes exactly at the normal modes.
inline double matching_determinant(double k,
                                   const pdcsim::CircuitParameters& p) {
    const pdcsim::DerivedCircuit d = pdcsim::derive(p);
    const double la = p.half_length_a, xj = p.squid_position;
    const double l0 = p.inductance_per_length;
    const double up = k * (xj + la), um = k * (la - xj);
    const double omega = k * d.group_velocity;
    const double g =
        1.0 / d.josephson_inductance - d.junction_capacitance * omega * omega;
    const double a11 = (k / l0) * std::sin(up);
    const double a12 = -(k / l0) * std::sin(um);
    const double a21 = (k / l0) * std::sin(up) - g * std::cos(up);
    const double a22 = -g * std::cos(um);
    return a11 * a22 - a12 * a21;
}

/// Scan-and-bisect root finder over the matching determinant, independent of
/// the library's reformulated residual, filter and scan density.  Returns the
/// first `n_roots` wavevectors [1/m], ascending.
inline std::vector<double> scan_roots(const pdcsim::CircuitParameters& p,
                                      double z_max, std::size_t n_roots,
                                      int points_per_pi = 20000) {
    const double la = p.half_length_a;
    const auto det = [&](double z) { return matching_determinant(z / la, p); };
    const long n_pts = std::lround(points_per_pi * z_max / pdcsim::constants::pi);
    const double dz = z_max / static_cast<double>(n_pts);
    std::vector<double> roots;
    double z_prev = dz, f_prev = det(z_prev);
    for (long i = 2; i <= n_pts && roots.size() < n_roots; ++i) {
        const double z = dz * static_cast<double>(i);
        const double f = det(z);
        if ((f_prev <= 0.0) != (f <= 0.0)) {
            double lo = z_prev, hi = z, flo = f_prev;
            for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double fm = det(mid);
                if ((flo <= 0.0) == (fm <= 0.0)) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            roots.push_back(0.5 * (lo + hi) / la);
        }
        z_prev = z;
        f_prev = f;
    }
    if (roots.size() < n_roots)
        throw pdcsim::RootNotFound("oracle scan exhausted its window");
    return roots;
}

/// Poles z = k*l_a of the tangent form of the wave-vector equation (zeros of
/// either segment sine), ascending up to z_max.
inline std::vector<double> tangent_poles(double xt, double z_max) {
    std::vector<double> poles;
    for (double denom : {1.0 - xt, 1.0 + xt}) {
        if (denom <= 0.0) continue;
        for (int n = 1;; ++n) {
            const double z = n * pdcsim::constants::pi / denom;
            if (z > z_max) break;
            poles.push_back(z);
        }
    }
    std::sort(poles.begin(), poles.end());
    return poles;
}

}  // namespace oracle
