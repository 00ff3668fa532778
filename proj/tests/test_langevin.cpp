#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include <pdcsim/drive.hpp>
#include <pdcsim/errors.hpp>
#include <pdcsim/langevin.hpp>
#include <pdcsim/steady_state.hpp>

using namespace pdcsim;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

DriveParameters reference_drive() { return DriveParameters{}; }

double horizon_8kb(const DriveParameters& d) { return 8.0 / d.kappa_b; }

}  // namespace

TEST_CASE("flat state layout round-trips bitwise") {
    MomentState m;
    m.alpha = {0.25, -1.5};
    m.beta = {3.0, 0.125};
    m.A1 = {1e-3, -2e-3};
    m.A2 = {1.75, 0.0};
    m.A3 = {1e-3, 2e-3};
    m.B1 = {-0.5, 0.25};
    m.B2 = {2.5, 0.0};
    m.B3 = {-0.5, -0.25};
    m.C1 = {0.75, 0.5};
    m.C2 = {-0.125, 1.0};
    const MomentState back = unflatten(flatten(m));
    const FlatState a = flatten(m), b = flatten(back);
    for (int i = 0; i < 20; ++i) CHECK(a[i] == b[i]);
}

TEST_CASE("moment derivatives reproduce the documented coefficients") {
    DriveParameters d;
    d.rabi_frequency = 0.0;
    d.kappa_a = 2.0;
    d.kappa_b = 4.0;

    SECTION("parametric gain feeds the pair correlator") {
        MomentState s;
        s.beta = {0.0, 1.0};
        s.A2 = {1.0, 0.0};
        const MomentState ds = moment_rhs(s, 2.0, 0.0, d);
        // dA1 = 2 P A2 with P = i chi beta = 2i * i = -2 -> dA1 = -4.
        CHECK(ds.A1.real() == -4.0);
        CHECK(ds.A1.imag() == 0.0);
        // dA2 at vacuum balances damping against the bath exactly.
        CHECK(ds.A2.real() == 0.0);
        CHECK(ds.A2.imag() == 0.0);
        // dbeta = -kb/2 beta.
        CHECK(ds.beta.real() == 0.0);
        CHECK(ds.beta.imag() == -2.0);
    }

    SECTION("Kerr term shifts the mean field and the pair correlator") {
        MomentState s;
        s.alpha = {1.0, 0.0};
        s.A2 = {1.0, 0.0};
        const MomentState ds = moment_rhs(s, 0.0, 3.0, d);
        // dalpha = 2iK|a|^2 a - ka/2 a = -1 + 6i.
        CHECK(ds.alpha.real() == -1.0);
        CHECK(ds.alpha.imag() == 6.0);
        // P = i K a^2 = 3i -> dA1 = 2 P A2 = 6i.
        CHECK(ds.A1.real() == 0.0);
        CHECK(ds.A1.imag() == 6.0);
        // dbeta = i chi a^2 = 0 here.
        CHECK(ds.beta.real() == 0.0);
        CHECK(ds.beta.imag() == 0.0);
    }

    SECTION("thermal baths enter only the occupancy inhomogeneities") {
        DriveParameters warm = d;
        warm.thermal_na = 0.5;
        warm.thermal_nb = 0.25;
        MomentState s;
        s.A2 = {1.0, 0.0};
        s.B2 = {1.0, 0.0};
        const MomentState ds = moment_rhs(s, 0.0, 0.0, warm);
        // dA2 = -ka A2 + ka(2 na + 1) = -2 + 4; dB2 = -kb B2 + kb(2 nb + 1).
        CHECK(ds.A2.real() == 2.0);
        CHECK(ds.B2.real() == 2.0);
        CHECK(ds.A1 == std::complex<double>(0.0, 0.0));
        CHECK(ds.B1 == std::complex<double>(0.0, 0.0));
    }
}

TEST_CASE("mean-field block of the moment equations matches the bare form") {
    const DriveParameters drive = reference_drive();
    MomentState s = default_initial_state();
    s.alpha = {0.02, -0.01};
    s.beta = {-0.005, 0.03};
    s.C1 = {1e-4, -2e-4};
    const double chi = 0.7e6, kerr = 0.02e6;
    const auto [da, db] = mean_field_rhs(s.alpha, s.beta, chi, kerr, drive);
    const MomentState ds = moment_rhs(s, chi, kerr, drive);
    CHECK(ds.alpha == da);
    CHECK(ds.beta == db);
}

TEST_CASE("conjugate-symmetric states stay conjugate-symmetric bit for bit") {
    const DriveParameters drive = reference_drive();
    MomentState s;
    s.alpha = {0.013, -0.007};
    s.beta = {0.21, 0.11};
    s.A1 = {0.4, -0.9};
    s.A3 = std::conj(s.A1);
    s.A2 = {1.7, 0.0};
    s.B1 = {-0.3, 0.05};
    s.B3 = std::conj(s.B1);
    s.B2 = {2.1, 0.0};
    s.C1 = {0.12, -0.34};
    s.C2 = {-0.56, 0.78};
    const MomentState ds = moment_rhs(s, 1.3e6, 0.2e5, drive);
    CHECK(ds.A3.real() == ds.A1.real());
    CHECK(ds.A3.imag() == -ds.A1.imag());
    CHECK(ds.B3.real() == ds.B1.real());
    CHECK(ds.B3.imag() == -ds.B1.imag());
    CHECK(ds.A2.imag() == 0.0);
    CHECK(ds.B2.imag() == 0.0);
}

TEST_CASE("decoupled thermal relaxation matches the analytic exponential") {
    DriveParameters drive = reference_drive();
    drive.rabi_frequency = 0.0;
    drive.thermal_na = 0.3;
    const double ka = drive.kappa_a;
    const double horizon = 5.0 / ka;
    MomentState init = default_initial_state();
    const VarianceTrace trace =
        integrate(init, 0.0, 0.0, drive, horizon, horizon / 200.0);
    const double target = 2.0 * 0.3 + 1.0;
    for (std::size_t i = 0; i < trace.times.size(); ++i) {
        const double expected =
            target + (1.0 - target) * std::exp(-ka * trace.times[i]);
        CHECK_THAT(trace.var_xa[i], WithinAbs(expected, 1e-8));
        CHECK_THAT(trace.var_ya[i], WithinAbs(expected, 1e-8));
    }
}

TEST_CASE("below-threshold trajectory relaxes onto the closed-form state") {
    const DriveParameters drive = reference_drive();
    const double chi_c = critical_coupling(drive);
    const double horizon = horizon_8kb(drive);
    const VarianceTrace trace =
        integrate(default_initial_state(), 0.3 * chi_c, 0.0, drive, horizon,
                  horizon / 2000.0);

    CHECK(trace.mean_abs_alpha.back() < 1e-8);
    CHECK_THAT(trace.mean_abs_beta.back(),
               WithinRel(0.2943216669870045, 1e-6));
    CHECK_THAT(trace.var_ya.back(), WithinAbs(1.0 / 1.3, 5e-3));

    // |beta| rises monotonically once the brief initial-phase dip (near
    // t = 0.06/kappa_b) has passed.
    for (std::size_t i = 1; i < trace.times.size(); ++i)
        if (trace.times[i - 1] >= 0.2 / drive.kappa_b)
            CHECK(trace.mean_abs_beta[i] >= trace.mean_abs_beta[i - 1] - 1e-12);

    // Squeezing never beats the closed-form optimum below threshold.
    const double floor = 1.0 / (1.0 + 0.3) - 1e-9;
    for (double v : trace.var_ya) CHECK(v >= floor);
}

TEST_CASE("above-threshold trajectory: transient squeezing beyond the steady value") {
    const DriveParameters drive = reference_drive();
    const double chi_c = critical_coupling(drive);
    const double horizon = horizon_8kb(drive);
    const VarianceTrace trace =
        integrate(default_initial_state(), 4.0 * chi_c, 0.0, drive, horizon,
                  horizon / 2000.0);
    REQUIRE(trace.t_min.has_value());
    CHECK_THAT(trace.min_var_ya, WithinAbs(0.3322521730963217, 2e-3));
    CHECK_THAT(*trace.t_min, WithinAbs(1.266873347011487e-6, 2e-8));
    CHECK(trace.min_var_ya <
          steady_variances_a(4.0 * chi_c, drive).second);
    // The refined minimum cannot exceed the best grid sample.
    double grid_min = std::numeric_limits<double>::infinity();
    for (double v : trace.var_ya) grid_min = std::min(grid_min, v);
    CHECK(trace.min_var_ya <= grid_min + 1e-12);
}

TEST_CASE("uncertainty products stay above the quantum limit along trajectories") {
    const DriveParameters drive = reference_drive();
    const double chi_c = critical_coupling(drive);
    const double horizon = horizon_8kb(drive);
    for (double r : {0.9, 4.0}) {
        const VarianceTrace trace =
            integrate(default_initial_state(), r * chi_c, 0.0, drive, horizon,
                      horizon / 1000.0);
        for (std::size_t i = 0; i < trace.times.size(); ++i) {
            CHECK(trace.var_xa[i] * trace.var_ya[i] >= 1.0 - 1e-6);
            CHECK(trace.var_xb[i] * trace.var_yb[i] >= 1.0 - 1e-6);
        }
    }
}

TEST_CASE("sample grid is uniform with an exact final time") {
    const DriveParameters drive = reference_drive();
    const VarianceTrace a =
        integrate(default_initial_state(), 0.0, 0.0, drive, 1.0e-6, 1.0e-7);
    REQUIRE(a.times.size() == 11);
    for (std::size_t i = 0; i + 1 < a.times.size(); ++i)
        CHECK(a.times[i] == static_cast<double>(i) * 1.0e-7);
    CHECK(a.times.back() == 1.0e-6);

    const VarianceTrace b =
        integrate(default_initial_state(), 0.0, 0.0, drive, 1.05e-6, 1.0e-7);
    REQUIRE(b.times.size() == 12);
    CHECK(b.times.back() == 1.05e-6);
}

TEST_CASE("integration is insensitive to halving the tolerances") {
    const DriveParameters drive = reference_drive();
    const double chi_c = critical_coupling(drive);
    const double horizon = horizon_8kb(drive);
    const MomentState init = default_initial_state();
    const VarianceTrace tight = integrate(init, 2.0 * chi_c, 0.0, drive,
                                          horizon, horizon / 500.0, 1e-9,
                                          1e-12);
    const VarianceTrace tighter = integrate(init, 2.0 * chi_c, 0.0, drive,
                                            horizon, horizon / 500.0, 5e-10,
                                            5e-13);
    CHECK(std::abs(tight.min_var_ya - tighter.min_var_ya) < 1e-6);
    CHECK(std::abs(tight.var_ya.back() - tighter.var_ya.back()) < 1e-6);
}

TEST_CASE("minimum-variance scan: closed-form substitution and monotone trend") {
    const DriveParameters drive = reference_drive();
    const double chi_c = critical_coupling(drive);
    const double horizon = horizon_8kb(drive);
    const std::vector<double> ratios = {0.5, 1.5, 2.0, 3.0, 4.0};
    const auto rows = minimum_variance_scan(ratios, drive, chi_c, {}, horizon,
                                            horizon / 2000.0);
    REQUIRE(rows.size() == 5);

    // Below threshold the minimum sits at the horizon, so the closed-form
    // steady value is substituted and no interior time is reported.
    CHECK_FALSE(rows[0].t_min.has_value());
    CHECK(rows[0].min_var_ya == steady_variances_a(0.5 * chi_c, drive).second);

    for (std::size_t i = 1; i < rows.size(); ++i) {
        REQUIRE(rows[i].t_min.has_value());
        CHECK(rows[i].min_var_ya <
              steady_variances_a(ratios[i] * chi_c, drive).second);
        if (i > 1) {
            CHECK(rows[i].min_var_ya < rows[i - 1].min_var_ya);
            CHECK(*rows[i].t_min < *rows[i - 1].t_min);
        }
    }
}

TEST_CASE("scan results are independent of the worker count") {
    const DriveParameters drive = reference_drive();
    const double chi_c = critical_coupling(drive);
    const double horizon = 2.0 / drive.kappa_b;
    const std::vector<double> ratios = {0.5, 1.5, 3.0, 4.0};
    const auto serial = minimum_variance_scan(ratios, drive, chi_c, {},
                                              horizon, horizon / 400.0, 1);
    const auto parallel = minimum_variance_scan(ratios, drive, chi_c, {},
                                                horizon, horizon / 400.0, 3);
    REQUIRE(serial.size() == parallel.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
        CHECK(serial[i].min_var_ya == parallel[i].min_var_ya);
        CHECK(serial[i].t_min.has_value() == parallel[i].t_min.has_value());
        if (serial[i].t_min)
            CHECK(*serial[i].t_min == *parallel[i].t_min);
    }
}

TEST_CASE("Kerr comparison: negligible below threshold, zero when disabled") {
    const DriveParameters drive = reference_drive();
    const double chi_c = critical_coupling(drive);
    const double horizon = horizon_8kb(drive);
    const KerrComparison off = kerr_comparison(0.3 * chi_c, 0.0, drive,
                                               horizon, horizon / 500.0);
    CHECK(off.max_var_ya_difference == 0.0);

    const KerrComparison weak =
        kerr_comparison(0.3 * chi_c, 0.008 * 0.3 * chi_c, drive, horizon,
                        horizon / 500.0);
    CHECK(weak.max_var_ya_difference < 1e-4);

    // Far above threshold the quartic correction visibly shifts the
    // squeezing transient; the perturbative picture degrades.
    const KerrComparison strong =
        kerr_comparison(4.0 * chi_c, 0.027 * 4.0 * chi_c, drive, horizon,
                        horizon / 500.0);
    CHECK(strong.max_var_ya_difference > 0.1);
}

TEST_CASE("input validation and failure modes") {
    const DriveParameters drive = reference_drive();
    const double chi_c = critical_coupling(drive);
    CHECK_THROWS_AS(
        integrate(default_initial_state(), chi_c, 0.0, drive, 0.0, 1.0),
        ConfigError);
    CHECK_THROWS_AS(
        integrate(default_initial_state(), chi_c, 0.0, drive, 1.0, 0.0),
        ConfigError);
    CHECK_THROWS_AS(minimum_variance_scan({0.5, -1.0}, drive, chi_c, {}, 1e-6,
                                          1e-7),
                    ConfigError);
    CHECK_THROWS_AS(minimum_variance_scan({0.5}, drive, chi_c, {1.0, 2.0},
                                          1e-6, 1e-7),
                    ConfigError);
    CHECK_THROWS_AS(minimum_variance_scan({0.5}, drive, -chi_c, {}, 1e-6,
                                          1e-7),
                    ConfigError);

    // A drive that poisons the right-hand side stalls the step controller,
    // which must surface as a tolerance failure rather than a hang.
    DriveParameters poisoned = drive;
    poisoned.rabi_frequency = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(integrate(default_initial_state(), chi_c, 0.0, poisoned,
                              1e-6, 1e-7),
                    ToleranceFailure);
}

TEST_CASE("on-branch start pins the mean fields to the fixed point") {
    const DriveParameters drive = reference_drive();
    const double chi_c = critical_coupling(drive);
    const MomentState below = steady_initial_state(0.5 * chi_c, drive);
    CHECK(below.alpha == std::complex<double>(0.0, 0.0));
    CHECK_THAT(std::abs(below.beta), WithinRel(0.3, 1e-12));
    const MomentState above = steady_initial_state(4.0 * chi_c, drive);
    CHECK_THAT(above.alpha.real(), WithinRel(0.058094750193111264, 1e-12));
    CHECK(above.alpha.imag() == 0.0);
    CHECK_THAT(std::abs(above.beta), WithinRel(0.075, 1e-12));
    CHECK(above.A2 == std::complex<double>(1.0, 0.0));
    CHECK(above.B2 == std::complex<double>(1.0, 0.0));
}
