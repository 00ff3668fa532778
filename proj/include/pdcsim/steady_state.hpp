#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <utility>

#include <Eigen/Eigenvalues>

#include <pdcsim/drive.hpp>
#include <pdcsim/errors.hpp>

namespace pdcsim {

/// Fixed-point family of the mean-field equations.
enum class Branch { below, above };

/// Closed-form steady state at one coupling strength: physical branch,
/// mean fields, quadrature variances of both modes, linear stability.
struct SteadyStateSolution {
    Branch branch = Branch::below;
    double alpha_s = 0.0;  ///< Real; the + root is reported (observables are
                           ///< even under alpha_s -> -alpha_s).
    std::complex<double> beta_s{0.0, 0.0};  ///< Pure imaginary.
    double chi_c = 0.0;                     ///< Critical coupling [rad/s].
    double var_xa_s = 1.0;  ///< +inf marker exactly at the critical point.
    double var_ya_s = 1.0;
    double var_xb_s = 1.0;
    double var_yb_s = 1.0;
    bool stable = true;
    bool marginal = false;  ///< Largest eigenvalue within +-1e-9 kappa_a of 0.
    double jacobian_eigen_real_max = 0.0;  ///< [1/s]
};

/// chi_c = kappa_a kappa_b / (8 Omega_d): the pump-referred coupling at which
/// the zero-amplitude solution loses stability.
inline double critical_coupling(const DriveParameters& drive) {
    drive.validate();
    if (drive.rabi_frequency == 0.0)
        throw ZeroDrive("critical coupling undefined at zero pump amplitude");
    return drive.kappa_a * drive.kappa_b / (8.0 * drive.rabi_frequency);
}

/// Mean-field fixed point of the requested branch.  The above branch only
/// exists for chi >= chi_c; requesting it further down throws ConfigError.
inline std::pair<double, std::complex<double>> branch_means(
    double chi, const DriveParameters& drive, Branch branch) {
    if (!(chi >= 0.0))
        throw ConfigError("coupling strength must be non-negative");
    if (branch == Branch::below)
        return {0.0, std::complex<double>(
                         0.0, -2.0 * drive.rabi_frequency / drive.kappa_b)};
    const double chi_c = critical_coupling(drive);
    if (chi < chi_c)
        throw ConfigError(
            "above-threshold branch does not exist below the critical coupling");
    const double alpha =
        std::sqrt(drive.rabi_frequency * (chi - chi_c)) / chi;
    return {alpha, std::complex<double>(0.0, -drive.kappa_a / (4.0 * chi))};
}

/// Outcome of the eigenvalue test of one fixed point.
struct StabilityResult {
    bool stable = false;
    bool marginal = false;
    double max_real_eigenvalue = 0.0;  ///< [1/s]
};

/// Largest real part of the 4x4 mean-field Jacobian (Kerr-free model) at the
/// requested branch, in the real representation (Re a, Im a, Re b, Im b).
/// stable iff the spectrum is strictly in the left half-plane; a largest
/// eigenvalue within +-1e-9 kappa_a of zero is flagged marginal instead.
inline StabilityResult linear_stability(double chi,
                                        const DriveParameters& drive,
                                        Branch branch) {
    const auto [alpha, beta] = branch_means(chi, drive, branch);
    const double x1 = alpha, x2 = 0.0;
    const double x3 = beta.real(), x4 = beta.imag();
    const double c = 2.0 * chi;
    Eigen::Matrix4d jac;
    jac << -drive.kappa_a / 2.0 - c * x4, c * x3, c * x2, -c * x1,
           c * x3, c * x4 - drive.kappa_a / 2.0, c * x1, c * x2,
           -c * x2, -c * x1, -drive.kappa_b / 2.0, 0.0,
           c * x1, -c * x2, 0.0, -drive.kappa_b / 2.0;
    const Eigen::EigenSolver<Eigen::Matrix4d> es(jac, false);
    double max_real = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < 4; ++i)
        max_real = std::max(max_real, es.eigenvalues()[i].real());
    StabilityResult result;
    result.max_real_eigenvalue = max_real;
    const double tol = 1e-9 * drive.kappa_a;
    result.marginal = std::abs(max_real) <= tol;
    result.stable = max_real < 0.0 && !result.marginal;
    return result;
}

/// Steady quadrature variances (var_x, var_y) of the primary mode.  Within
/// |chi/chi_c - 1| < 1e-9 the antisqueezed variance is reported as the +inf
/// marker and the squeezed one as its critical value 1/2.
inline std::pair<double, double> steady_variances_a(
    double chi, const DriveParameters& drive) {
    if (!(chi >= 0.0))
        throw ConfigError("coupling strength must be non-negative");
    const double chi_c = critical_coupling(drive);
    const double r = chi / chi_c;
    if (std::abs(r - 1.0) < 1e-9)
        return {std::numeric_limits<double>::infinity(), 0.5};
    if (r < 1.0) return {1.0 / (1.0 - r), 1.0 / (1.0 + r)};
    const double ka = drive.kappa_a, kb = drive.kappa_b;
    return {1.0 + ka / kb + 1.0 / (2.0 * (r - 1.0)),
            (2.0 * r * (ka + kb) - kb) / (2.0 * r * (2.0 * ka + kb))};
}

/// Steady quadrature variances (var_x, var_y) of the coupler mode: vacuum up
/// to the critical point, pinned closed forms beyond it.
inline std::pair<double, double> steady_variances_b(
    double chi, const DriveParameters& drive) {
    if (!(chi >= 0.0))
        throw ConfigError("coupling strength must be non-negative");
    const double chi_c = critical_coupling(drive);
    const double r = chi / chi_c;
    if (r <= 1.0 + 1e-9) return {1.0, 1.0};
    const double ka = drive.kappa_a, kb = drive.kappa_b;
    return {(r * (ka + kb) + ka) / (r * (2.0 * ka + kb)),
            (ka + kb) / kb};
}

/// Full closed-form steady solution at one coupling strength.
inline SteadyStateSolution steady_solution(double chi,
                                           const DriveParameters& drive) {
    SteadyStateSolution s;
    s.chi_c = critical_coupling(drive);
    s.branch = chi > s.chi_c ? Branch::above : Branch::below;
    const auto [alpha, beta] = branch_means(chi, drive, s.branch);
    s.alpha_s = alpha;
    s.beta_s = beta;
    const auto [vxa, vya] = steady_variances_a(chi, drive);
    const auto [vxb, vyb] = steady_variances_b(chi, drive);
    s.var_xa_s = vxa;
    s.var_ya_s = vya;
    s.var_xb_s = vxb;
    s.var_yb_s = vyb;
    const StabilityResult st = linear_stability(chi, drive, s.branch);
    s.stable = st.stable;
    s.marginal = st.marginal;
    s.jacobian_eigen_real_max = st.max_real_eigenvalue;
    return s;
}

/// Steady squeezing of the single-resonator parametric baseline.
struct JpaBaseline {
    double var_ya_s = 1.0;
    bool stable = true;
};

/// Single flux-pumped resonator with pump amplitude Omega_d and decay
/// kappa_a: var_y = kappa_a/(kappa_a + 4 Omega_d), unstable from
/// Omega_d/kappa_a = 1/4 on (the boundary itself is inaccessible).
inline JpaBaseline jpa_baseline(double rabi_frequency, double kappa_a) {
    if (rabi_frequency < 0.0)
        throw ConfigError("rabi_frequency must be non-negative");
    if (!(kappa_a > 0.0)) throw ConfigError("kappa_a must be positive");
    return {kappa_a / (kappa_a + 4.0 * rabi_frequency),
            rabi_frequency / kappa_a < 0.25};
}

/// Pump amplitude of the single-resonator baseline that reproduces the
/// two-resonator below-threshold squeezing at reduced coupling r = chi/chi_c:
/// Omega_d = r kappa_a / 4, giving var_y = 1/(1+r) and the same instability
/// point r = 1.
inline double jpa_equivalent_drive(double chi_ratio, double kappa_a) {
    if (!(chi_ratio >= 0.0))
        throw ConfigError("coupling ratio must be non-negative");
    return chi_ratio * kappa_a / 4.0;
}

}  // namespace pdcsim
