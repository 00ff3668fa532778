#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include <pdcsim/drive.hpp>
#include <pdcsim/errors.hpp>
#include <pdcsim/parallel.hpp>
#include <pdcsim/steady_state.hpp>

namespace pdcsim {

/// Mean fields and second moments of the linearized two-mode model.
/// A1 = <da^2>, A2 = <da^+ da> + <da da^+>, A3 = <da^+2>; B1..B3 likewise
/// for the coupler mode; C1 = <da db>, C2 = <da^+ db>.
struct MomentState {
    std::complex<double> alpha{0.0, 0.0};
    std::complex<double> beta{0.0, 0.0};
    std::complex<double> A1{0.0, 0.0};
    std::complex<double> A2{0.0, 0.0};
    std::complex<double> A3{0.0, 0.0};
    std::complex<double> B1{0.0, 0.0};
    std::complex<double> B2{0.0, 0.0};
    std::complex<double> B3{0.0, 0.0};
    std::complex<double> C1{0.0, 0.0};
    std::complex<double> C2{0.0, 0.0};
};

/// Fixed flat layout of MomentState used by the integrator and dumps:
/// (Re, Im) pairs in the order alpha, beta, A1, A2, A3, B1, B2, B3, C1, C2.
using FlatState = std::array<double, 20>;

inline FlatState flatten(const MomentState& m) {
    return {m.alpha.real(), m.alpha.imag(), m.beta.real(), m.beta.imag(),
            m.A1.real(),    m.A1.imag(),    m.A2.real(),   m.A2.imag(),
            m.A3.real(),    m.A3.imag(),    m.B1.real(),   m.B1.imag(),
            m.B2.real(),    m.B2.imag(),    m.B3.real(),   m.B3.imag(),
            m.C1.real(),    m.C1.imag(),    m.C2.real(),   m.C2.imag()};
}

inline MomentState unflatten(const FlatState& v) {
    MomentState m;
    m.alpha = {v[0], v[1]};
    m.beta = {v[2], v[3]};
    m.A1 = {v[4], v[5]};
    m.A2 = {v[6], v[7]};
    m.A3 = {v[8], v[9]};
    m.B1 = {v[10], v[11]};
    m.B2 = {v[12], v[13]};
    m.B3 = {v[14], v[15]};
    m.C1 = {v[16], v[17]};
    m.C2 = {v[18], v[19]};
    return m;
}

/// Mean-field equations of motion:
///   d alpha = 2 i chi conj(alpha) beta + 2 i K |alpha|^2 alpha - ka/2 alpha
///   d beta  = i chi alpha^2 - i Omega_d - kb/2 beta.
inline std::pair<std::complex<double>, std::complex<double>> mean_field_rhs(
    std::complex<double> alpha, std::complex<double> beta, double chi,
    double kerr, const DriveParameters& drive) {
    const std::complex<double> i1(0.0, 1.0);
    const std::complex<double> da = 2.0 * i1 * chi * std::conj(alpha) * beta +
                                    2.0 * i1 * kerr * std::norm(alpha) * alpha -
                                    (drive.kappa_a / 2.0) * alpha;
    const std::complex<double> db = i1 * chi * alpha * alpha -
                                    i1 * drive.rabi_frequency -
                                    (drive.kappa_b / 2.0) * beta;
    return {da, db};
}

/// Time derivative of the full mean + second-moment state.  Thermal baths
/// enter only the inhomogeneous A2/B2 terms as kappa (2 n + 1).
///
/// The pair (A1, A3) and (B1, B3) equations are written as exact term-by-term
/// mirrors and A2/B2 derivatives are forced real, so conjugate-symmetric
/// initial data stay conjugate-symmetric to the last bit.
inline MomentState moment_rhs(const MomentState& s, double chi, double kerr,
                              const DriveParameters& drive) {
    const std::complex<double> i1(0.0, 1.0);
    const std::complex<double> a = s.alpha, b = s.beta;
    const std::complex<double> ac = std::conj(a);
    const double n2 = std::norm(a);
    const double ka2 = drive.kappa_a / 2.0, kb2 = drive.kappa_b / 2.0;
    const double g = 4.0 * kerr * n2;
    // Parametric gain coefficients of da^+ in d(da) and of da in d(da^+).
    const std::complex<double> P = i1 * (chi * b + kerr * a * a);
    const std::complex<double> Pb = i1 * (chi * std::conj(b) + kerr * ac * ac);

    MomentState d;
    d.alpha = 2.0 * i1 * chi * ac * b + 2.0 * i1 * kerr * n2 * a - ka2 * a;
    d.beta = i1 * chi * a * a - i1 * drive.rabi_frequency - kb2 * b;

    d.A1 = 4.0 * i1 * chi * ac * s.C1 + 2.0 * P * s.A2 +
           2.0 * std::complex<double>(-ka2, g) * s.A1;
    d.A2 = {2.0 * std::real(4.0 * i1 * chi * ac * s.C2 + 4.0 * P * s.A3) -
                drive.kappa_a * s.A2.real() +
                drive.kappa_a * (2.0 * drive.thermal_na + 1.0),
            0.0};
    d.A3 = -4.0 * i1 * chi * a * std::conj(s.C1) - 2.0 * Pb * s.A2 -
           2.0 * std::complex<double>(ka2, g) * s.A3;

    d.B1 = 4.0 * i1 * chi * a * s.C1 - drive.kappa_b * s.B1;
    d.B2 = {2.0 * std::real(4.0 * i1 * chi * a * std::conj(s.C2)) -
                drive.kappa_b * s.B2.real() +
                drive.kappa_b * (2.0 * drive.thermal_nb + 1.0),
            0.0};
    d.B3 = -4.0 * i1 * chi * ac * std::conj(s.C1) - drive.kappa_b * s.B3;

    d.C1 = 2.0 * i1 * chi * ac * s.B1 + 2.0 * i1 * chi * a * s.A1 +
           2.0 * P * s.C2 + std::complex<double>(-ka2 - kb2, g) * s.C1;
    d.C2 = -i1 * chi * a * (s.B2 - 1.0) + i1 * chi * a * (s.A2 - 1.0) -
           2.0 * Pb * s.C1 - std::complex<double>(ka2 + kb2, g) * s.C2;
    return d;
}

/// Coherent-state start used throughout: alpha = 0.01, beta = 0.01i,
/// vacuum-level fluctuations (A2 = B2 = 1, all other correlators zero).
inline MomentState default_initial_state() {
    MomentState m;
    m.alpha = {0.01, 0.0};
    m.beta = {0.0, 0.01};
    m.A2 = {1.0, 0.0};
    m.B2 = {1.0, 0.0};
    return m;
}

/// Mean fields pinned to the physical branch at this coupling, fluctuations
/// at the vacuum level.  Used for relaxation checks that must start on the
/// attracting branch rather than near the unstable origin.
inline MomentState steady_initial_state(double chi,
                                        const DriveParameters& drive) {
    const double chi_c = critical_coupling(drive);
    const auto [alpha, beta] =
        branch_means(chi, drive, chi > chi_c ? Branch::above : Branch::below);
    MomentState m;
    m.alpha = {alpha, 0.0};
    m.beta = beta;
    m.A2 = {1.0, 0.0};
    m.B2 = {1.0, 0.0};
    return m;
}

/// Quadrature variances of both modes derived from the moments.
struct QuadratureVariances {
    double xa, ya, xb, yb;
};

inline QuadratureVariances quadrature_variances(const MomentState& m) {
    return {(m.A1 + m.A2 + m.A3).real(), (m.A2 - m.A1 - m.A3).real(),
            (m.B1 + m.B2 + m.B3).real(), (m.B2 - m.B1 - m.B3).real()};
}

/// Largest imaginary residue of the nominally real variance combinations.
inline double conjugacy_residue(const MomentState& m) {
    return std::max(std::abs((m.A1 + m.A2 + m.A3).imag()),
                    std::abs((m.B1 + m.B2 + m.B3).imag()));
}

/// Uniformly sampled trajectory of the variances and mean-field magnitudes.
struct VarianceTrace {
    std::vector<double> times;  ///< s; first sample 0, last exactly horizon.
    std::vector<double> var_xa, var_ya, var_xb, var_yb;
    std::vector<double> mean_abs_alpha, mean_abs_beta;
    double min_var_ya = 0.0;  ///< Quadratic-refined when interior.
    std::optional<double> t_min;  ///< Absent when the minimum sits at the horizon.
};

namespace detail {

// Dormand-Prince 5(4) tableau; stage 7 equals the accepted solution (FSAL).
inline constexpr double dp_a21 = 1.0 / 5.0;
inline constexpr double dp_a31 = 3.0 / 40.0, dp_a32 = 9.0 / 40.0;
inline constexpr double dp_a41 = 44.0 / 45.0, dp_a42 = -56.0 / 15.0,
                        dp_a43 = 32.0 / 9.0;
inline constexpr double dp_a51 = 19372.0 / 6561.0, dp_a52 = -25360.0 / 2187.0,
                        dp_a53 = 64448.0 / 6561.0, dp_a54 = -212.0 / 729.0;
inline constexpr double dp_a61 = 9017.0 / 3168.0, dp_a62 = -355.0 / 33.0,
                        dp_a63 = 46732.0 / 5247.0, dp_a64 = 49.0 / 176.0,
                        dp_a65 = -5103.0 / 18656.0;
inline constexpr double dp_b1 = 35.0 / 384.0, dp_b3 = 500.0 / 1113.0,
                        dp_b4 = 125.0 / 192.0, dp_b5 = -2187.0 / 6784.0,
                        dp_b6 = 11.0 / 84.0;
inline constexpr double dp_e1 = 71.0 / 57600.0, dp_e3 = -71.0 / 16695.0,
                        dp_e4 = 71.0 / 1920.0, dp_e5 = -17253.0 / 339200.0,
                        dp_e6 = 22.0 / 525.0, dp_e7 = -1.0 / 40.0;

/// Advances y from t_begin to t_end with embedded 5(4) error control.
/// `h` carries the suggested step across calls; steps clamped to hit t_end
/// do not feed back into the suggestion.
template <typename RHS>
inline void advance(const RHS& f, FlatState& y, double t_begin, double t_end,
                    double rtol, double atol, double& h) {
    if (!(t_end > t_begin)) return;
    FlatState k1, k2, k3, k4, k5, k6, k7, tmp, y5;
    f(y, k1);
    double t = t_begin;
    std::size_t steps = 0;
    while (t < t_end) {
        if (++steps > 50'000'000)
            throw ToleranceFailure("integrator exceeded the step budget");
        bool clamped = false;
        double hs = h;
        if (t + hs >= t_end) {
            hs = t_end - t;
            clamped = true;
        }
        if (t + hs == t)
            throw ToleranceFailure("integrator step size collapsed to zero");

        for (std::size_t i = 0; i < 20; ++i)
            tmp[i] = y[i] + hs * dp_a21 * k1[i];
        f(tmp, k2);
        for (std::size_t i = 0; i < 20; ++i)
            tmp[i] = y[i] + hs * (dp_a31 * k1[i] + dp_a32 * k2[i]);
        f(tmp, k3);
        for (std::size_t i = 0; i < 20; ++i)
            tmp[i] = y[i] +
                     hs * (dp_a41 * k1[i] + dp_a42 * k2[i] + dp_a43 * k3[i]);
        f(tmp, k4);
        for (std::size_t i = 0; i < 20; ++i)
            tmp[i] = y[i] + hs * (dp_a51 * k1[i] + dp_a52 * k2[i] +
                                  dp_a53 * k3[i] + dp_a54 * k4[i]);
        f(tmp, k5);
        for (std::size_t i = 0; i < 20; ++i)
            tmp[i] = y[i] + hs * (dp_a61 * k1[i] + dp_a62 * k2[i] +
                                  dp_a63 * k3[i] + dp_a64 * k4[i] +
                                  dp_a65 * k5[i]);
        f(tmp, k6);
        for (std::size_t i = 0; i < 20; ++i)
            y5[i] = y[i] + hs * (dp_b1 * k1[i] + dp_b3 * k3[i] +
                                 dp_b4 * k4[i] + dp_b5 * k5[i] + dp_b6 * k6[i]);
        f(y5, k7);

        double sumsq = 0.0;
        for (std::size_t i = 0; i < 20; ++i) {
            const double err_i =
                hs * (dp_e1 * k1[i] + dp_e3 * k3[i] + dp_e4 * k4[i] +
                      dp_e5 * k5[i] + dp_e6 * k6[i] + dp_e7 * k7[i]);
            const double scale =
                atol + rtol * std::max(std::abs(y[i]), std::abs(y5[i]));
            sumsq += (err_i / scale) * (err_i / scale);
        }
        const double err = std::sqrt(sumsq / 20.0);

        if (!std::isfinite(err)) {
            h = hs * 0.2;
            continue;
        }
        if (err <= 1.0) {
            t = clamped ? t_end : t + hs;
            y = y5;
            k1 = k7;
            if (!clamped) {
                const double fac =
                    0.9 * std::pow(std::max(err, 1e-300), -0.2);
                h = hs * std::min(5.0, std::max(0.2, fac));
            }
        } else {
            h = hs * std::max(0.2, 0.9 * std::pow(err, -0.2));
        }
    }
}

/// Vertex of the parabola through three bracketing samples; falls back to the
/// middle sample when the bracket is degenerate (flat or inverted).
inline std::pair<double, double> parabolic_minimum(double t0, double v0,
                                                   double t1, double v1,
                                                   double t2, double v2) {
    const double num =
        (t1 - t0) * (t1 - t0) * (v1 - v2) - (t1 - t2) * (t1 - t2) * (v1 - v0);
    const double den = (t1 - t0) * (v1 - v2) - (t1 - t2) * (v1 - v0);
    // A genuine bracketed minimum makes den < 0; anything else is degenerate.
    if (den >= 0.0) return {t1, v1};
    const double ts = t1 - 0.5 * num / den;
    if (!(ts >= t0 && ts <= t2)) return {t1, v1};
    const double l0 = (ts - t1) * (ts - t2) / ((t0 - t1) * (t0 - t2));
    const double l1 = (ts - t0) * (ts - t2) / ((t1 - t0) * (t1 - t2));
    const double l2 = (ts - t0) * (ts - t1) / ((t2 - t0) * (t2 - t1));
    return {ts, v0 * l0 + v1 * l1 + v2 * l2};
}

}  // namespace detail

/// Integrates the moment equations with adaptive 5(4) stepping (relative
/// tolerance 1e-9, absolute 1e-12 by default) and records uniform samples
/// every `sampling` seconds plus a final sample exactly at `horizon`.
/// Throws ToleranceFailure if step control stalls and NonPhysical if a
/// variance drops below -1e-6 or the conjugacy residue exceeds 1e-9.
inline VarianceTrace integrate(const MomentState& initial, double chi,
                               double kerr, const DriveParameters& drive,
                               double horizon, double sampling,
                               double rtol = 1e-9, double atol = 1e-12) {
    if (!(horizon > 0.0)) throw ConfigError("horizon must be positive");
    if (!(sampling > 0.0)) throw ConfigError("sampling must be positive");
    drive.validate();

    VarianceTrace trace;
    for (std::size_t i = 0;; ++i) {
        const double t = static_cast<double>(i) * sampling;
        if (t >= horizon * (1.0 - 1e-12)) break;
        trace.times.push_back(t);
    }
    trace.times.push_back(horizon);
    const std::size_t n = trace.times.size();
    trace.var_xa.reserve(n);
    trace.var_ya.reserve(n);
    trace.var_xb.reserve(n);
    trace.var_yb.reserve(n);
    trace.mean_abs_alpha.reserve(n);
    trace.mean_abs_beta.reserve(n);

    const auto record = [&trace](const MomentState& m) {
        if (conjugacy_residue(m) > 1e-9)
            throw NonPhysical(
                "conjugate-symmetry residue exceeded 1e-9 along trajectory");
        const QuadratureVariances v = quadrature_variances(m);
        for (double value : {v.xa, v.ya, v.xb, v.yb})
            if (value < -1e-6)
                throw NonPhysical("variance dropped below -1e-6");
        trace.var_xa.push_back(v.xa);
        trace.var_ya.push_back(v.ya);
        trace.var_xb.push_back(v.xb);
        trace.var_yb.push_back(v.yb);
        trace.mean_abs_alpha.push_back(std::abs(m.alpha));
        trace.mean_abs_beta.push_back(std::abs(m.beta));
    };

    const auto rhs = [&](const FlatState& v, FlatState& dv) {
        dv = flatten(moment_rhs(unflatten(v), chi, kerr, drive));
    };

    FlatState y = flatten(initial);
    record(initial);
    double h = sampling / 100.0;
    for (std::size_t i = 1; i < n; ++i) {
        detail::advance(rhs, y, trace.times[i - 1], trace.times[i], rtol, atol,
                        h);
        record(unflatten(y));
    }

    std::size_t arg = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (trace.var_ya[i] < trace.var_ya[arg]) arg = i;
    if (arg + 1 == n) {
        trace.min_var_ya = trace.var_ya[arg];
        trace.t_min.reset();
    } else if (arg == 0) {
        trace.min_var_ya = trace.var_ya[0];
        trace.t_min = trace.times[0];
    } else {
        const auto [ts, vs] = detail::parabolic_minimum(
            trace.times[arg - 1], trace.var_ya[arg - 1], trace.times[arg],
            trace.var_ya[arg], trace.times[arg + 1], trace.var_ya[arg + 1]);
        trace.min_var_ya = vs;
        trace.t_min = ts;
    }
    return trace;
}

/// One row of the minimum-squeezing scan.
struct MinimumVarianceRow {
    double chi_ratio = 0.0;
    double min_var_ya = 0.0;
    std::optional<double> t_min;  ///< s
};

/// Integrates one trajectory per coupling ratio and reports the deepest
/// var_ya excursion.  Ratios below threshold never turn around within the
/// horizon; their minimum is the closed-form steady value and t_min is
/// absent.  kerr_values must be empty (Kerr-free) or one value per ratio.
inline std::vector<MinimumVarianceRow> minimum_variance_scan(
    const std::vector<double>& chi_ratios, const DriveParameters& drive,
    double chi_c, const std::vector<double>& kerr_values, double horizon,
    double sampling, int jobs = 1) {
    if (!kerr_values.empty() && kerr_values.size() != chi_ratios.size())
        throw ConfigError(
            "kerr_values must be empty or match chi_ratios in length");
    if (!(chi_c > 0.0)) throw ConfigError("chi_c must be positive");
    std::vector<MinimumVarianceRow> rows(chi_ratios.size());
    parallel_for(rows.size(), jobs, [&](std::size_t i) {
        const double ratio = chi_ratios[i];
        if (!(ratio > 0.0))
            throw ConfigError("coupling ratios must be positive");
        const double chi = ratio * chi_c;
        const double kerr = kerr_values.empty() ? 0.0 : kerr_values[i];
        const VarianceTrace trace = integrate(default_initial_state(), chi,
                                              kerr, drive, horizon, sampling);
        rows[i].chi_ratio = ratio;
        rows[i].min_var_ya = trace.min_var_ya;
        rows[i].t_min = trace.t_min;
        if (!trace.t_min && ratio < 1.0)
            rows[i].min_var_ya = steady_variances_a(chi, drive).second;
    });
    return rows;
}

/// Paired integration with and without the Kerr correction on one time grid.
struct KerrComparison {
    VarianceTrace without_kerr;
    VarianceTrace with_kerr;
    double max_var_ya_difference = 0.0;
};

inline KerrComparison kerr_comparison(double chi, double kerr,
                                      const DriveParameters& drive,
                                      double horizon, double sampling) {
    KerrComparison out;
    out.without_kerr = integrate(default_initial_state(), chi, 0.0, drive,
                                 horizon, sampling);
    out.with_kerr = integrate(default_initial_state(), chi, kerr, drive,
                              horizon, sampling);
    for (std::size_t i = 0; i < out.without_kerr.times.size(); ++i)
        out.max_var_ya_difference = std::max(
            out.max_var_ya_difference,
            std::abs(out.with_kerr.var_ya[i] - out.without_kerr.var_ya[i]));
    return out;
}

}  // namespace pdcsim
