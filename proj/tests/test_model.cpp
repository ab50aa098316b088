#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "omx/model.hpp"
#include "omx/units.hpp"

#include <cmath>
#include <random>

using namespace omx;

namespace {

constexpr double kappa_ref = two_pi * 30e6;   // (kappa1, kappa2)/2pi ~ 30 MHz
constexpr double gamma_ref = two_pi * 20e3;   // gamma_m/2pi ~ 20 kHz
constexpr double omega_ref = two_pi * 101e6;  // omega_m/2pi ~ 101 MHz

// Brute-force argmax of f over [0, hi] with the given step.
template <class F>
double grid_argmax(F&& f, double hi, double step)
{
    double best_x = 0.0;
    double best_v = f(0.0);
    for (double x = step; x <= hi + 0.5 * step; x += step) {
        const double v = f(x);
        if (v > best_v) {
            best_v = v;
            best_x = x;
        }
    }
    return best_x;
}

} // namespace

TEST_CASE("cooperativity: zero coupling, device-scale value, quadratic scaling")
{
    CHECK(cooperativity(0.0, gamma_ref, kappa_ref) == 0.0);

    // g chosen by inverting C = 4g^2/(gamma kappa) at C = 1.
    const double g_unit = 0.5 * std::sqrt(gamma_ref * kappa_ref);
    CHECK(rad_to_hz(g_unit) == doctest::Approx(387.298e3).epsilon(1e-4));
    CHECK(cooperativity(g_unit, gamma_ref, kappa_ref) == doctest::Approx(1.0).epsilon(1e-14));

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> dist(1e3, 1e8);
    for (int trial = 0; trial < 50; ++trial) {
        const double g = dist(rng);
        const double c1 = cooperativity(g, gamma_ref, kappa_ref);
        const double c2 = cooperativity(2.0 * g, gamma_ref, kappa_ref);
        CHECK(c2 == doctest::Approx(4.0 * c1).epsilon(1e-13));
    }

    CHECK_THROWS_AS(cooperativity(1.0, 0.0, kappa_ref), std::domain_error);
    CHECK_THROWS_AS(cooperativity(1.0, gamma_ref, -1.0), std::domain_error);
    CHECK_THROWS_AS(cooperativity(-1.0, gamma_ref, kappa_ref), std::domain_error);
}

TEST_CASE("coupling_from_cooperativity: inverse pair")
{
    CHECK(coupling_from_cooperativity(0.0, gamma_ref, kappa_ref) == 0.0);

    const double g1 = coupling_from_cooperativity(1.0, gamma_ref, kappa_ref);
    CHECK(rad_to_hz(g1) == doctest::Approx(387.298e3).epsilon(1e-4));

    for (double g_hz : {10e3, 1e6}) {
        const double g = hz_to_rad(g_hz);
        const double c = cooperativity(g, gamma_ref, kappa_ref);
        CHECK(coupling_from_cooperativity(c, gamma_ref, kappa_ref) ==
              doctest::Approx(g).epsilon(1e-13));
    }

    CHECK_THROWS_AS(coupling_from_cooperativity(-0.5, gamma_ref, kappa_ref),
                    std::domain_error);
}

TEST_CASE("steady_state_efficiency: anchors, symmetry, range")
{
    CHECK(steady_state_efficiency(0.0, 3.7, 1.0, 1.0) == 0.0);
    CHECK(steady_state_efficiency(1.0, 1.0, 0.5, 0.5) ==
          doctest::Approx(0.25 * 4.0 / 9.0).epsilon(1e-14));
    // Direct evaluation: 4*100*100 / 201^2
    CHECK(steady_state_efficiency(100.0, 100.0, 1.0, 1.0) ==
          doctest::Approx(40000.0 / 40401.0).epsilon(1e-14));

    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> cdist(0.0, 30.0);
    std::uniform_real_distribution<double> edist(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const double c1 = cdist(rng), c2 = cdist(rng);
        const double e1 = edist(rng), e2 = edist(rng);
        const double chi = steady_state_efficiency(c1, c2, e1, e2);
        CHECK(chi >= 0.0);
        CHECK(chi <= e1 * e2 + 1e-15);
        CHECK(chi == doctest::Approx(steady_state_efficiency(c2, c1, e2, e1)).epsilon(1e-14));
    }

    // sup over C1 = C2 -> infinity approaches eta1*eta2
    double prev = 0.0;
    for (double c : {1.0, 10.0, 100.0, 1000.0}) {
        const double chi = steady_state_efficiency(c, c, 0.9, 0.7);
        CHECK(chi > prev);
        prev = chi;
    }
    CHECK(prev == doctest::Approx(0.9 * 0.7).epsilon(1e-2));
}

TEST_CASE("optimal_c1: closed form against brute-force scan")
{
    CHECK(optimal_c1(0.0) == 1.0);
    CHECK(optimal_c1(1.0) == 2.0);

    for (double c2 : {0.0, 0.5, 1.0, 5.0}) {
        // The C1-dependent factor of the efficiency; identical argmax for
        // every positive C2 and well-defined in the C2 -> 0 limit.
        auto shape = [c2](double c1) {
            const double d = 1.0 + c1 + c2;
            return c1 / (d * d);
        };
        const double scanned = grid_argmax(shape, 20.0, 1e-3);
        CHECK(std::abs(scanned - optimal_c1(c2)) <= 1e-3 + 1e-12);
    }
}

TEST_CASE("steady_state_amplitudes: zero input, matched flux ratio, G2=0 closed form")
{
    SystemParams params = make_system(1.0, 1.0, 0.45, 0.45, kappa_ref, kappa_ref,
                                      omega_ref, gamma_ref);

    const ModeState zero = steady_state_amplitudes(params, omega_ref, Complex(0.0, 0.0));
    CHECK(std::abs(zero.alpha1) == 0.0);
    CHECK(std::abs(zero.alpha2) == 0.0);
    CHECK(std::abs(zero.beta) == 0.0);

    const Complex s_in(3.2e6, 0.0);
    const ModeState ss = steady_state_amplitudes(params, omega_ref, s_in);
    const double out_flux = std::norm(std::sqrt(params.mode2.kappa_ext) * ss.alpha2);
    CHECK(out_flux / std::norm(s_in) ==
          doctest::Approx(0.45 * 0.45 * 4.0 / 9.0).epsilon(1e-12));

    // G2 = 0: |beta|^2 = eta1 * C1 * 4 |s_in|^2 / (gamma (1+C1)^2), by hand
    // elimination of alpha1 from the steady-state equations.
    SystemParams solo = make_system(2.5, 0.0, 0.45, 0.45, kappa_ref, kappa_ref,
                                    omega_ref, gamma_ref);
    const ModeState ss2 = steady_state_amplitudes(solo, omega_ref, s_in);
    const double expected =
        0.45 * 2.5 * 4.0 * std::norm(s_in) / (gamma_ref * (1.0 + 2.5) * (1.0 + 2.5));
    CHECK(std::norm(ss2.beta) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("steady-state amplitudes agree with the closed forms across the grid")
{
    const double grid[] = {0.1, 0.5, 1.0, 2.0, 5.0, 10.0};
    const Complex s_in(1.0, 0.0);
    for (double c1 : grid) {
        for (double c2 : grid) {
            SystemParams params = make_system(c1, c2, 0.45, 0.45, kappa_ref,
                                              kappa_ref, omega_ref, gamma_ref);
            const ModeState ss = steady_state_amplitudes(params, omega_ref, s_in);
            const double chi_direct =
                std::norm(std::sqrt(params.mode2.kappa_ext) * ss.alpha2) / std::norm(s_in);
            const double chi_formula = steady_state_efficiency(c1, c2, 0.45, 0.45);
            CHECK(chi_direct == doctest::Approx(chi_formula).epsilon(1e-12));

            const double beta_formula =
                mechanical_intensity_ss(c1, c2, 0.45, gamma_ref, std::norm(s_in));
            CHECK(std::norm(ss.beta) == doctest::Approx(beta_formula).epsilon(1e-12));
        }
    }
}

TEST_CASE("steady-state amplitudes are linear in the input")
{
    SystemParams params = make_system(0.8, 1.7, 0.45, 0.45, kappa_ref, kappa_ref,
                                      omega_ref, gamma_ref);
    const Complex s_in(1.1e3, -0.4e3);
    const Complex scale(1.7, 0.3);
    const ModeState a = steady_state_amplitudes(params, omega_ref, s_in);
    const ModeState b = steady_state_amplitudes(params, omega_ref, scale * s_in);
    CHECK(std::abs(b.alpha1 - scale * a.alpha1) <= 1e-12 * std::abs(b.alpha1));
    CHECK(std::abs(b.alpha2 - scale * a.alpha2) <= 1e-12 * std::abs(b.alpha2));
    CHECK(std::abs(b.beta - scale * a.beta) <= 1e-12 * std::abs(b.beta));
}

TEST_CASE("mechanical_intensity_ss: zero coupling, peak location, monotone in C2")
{
    CHECK(mechanical_intensity_ss(0.0, 1.0, 0.45, gamma_ref, 1e12) == 0.0);

    auto intensity_c2_zero = [](double c1) {
        return mechanical_intensity_ss(c1, 0.0, 0.45, gamma_ref, 1e12);
    };
    CHECK(grid_argmax(intensity_c2_zero, 20.0, 1e-3) == doctest::Approx(1.0).epsilon(2e-3));

    double prev = mechanical_intensity_ss(0.2, 0.0, 0.45, gamma_ref, 1e12);
    for (double c2 = 0.1; c2 <= 3.0; c2 += 0.1) {
        const double cur = mechanical_intensity_ss(0.2, c2, 0.45, gamma_ref, 1e12);
        CHECK(cur < prev);
        prev = cur;
    }
}

TEST_CASE("parameter validation: invariants and resolved-sideband warning")
{
    SystemParams good = make_system(1.0, 1.0, 0.45, 0.45, kappa_ref, kappa_ref,
                                    omega_ref, gamma_ref);
    CHECK(validate(good).empty());

    SystemParams sideband = good;
    sideband.mech.omega_m = 0.5 * kappa_ref;  // warn, do not reject
    CHECK(validate(sideband).size() == 1);

    SystemParams bad_eta = good;
    bad_eta.mode1.kappa_ext = 2.0 * bad_eta.mode1.kappa_total;
    CHECK_THROWS_AS(validate(bad_eta), std::invalid_argument);

    SystemParams bad_gamma = good;
    bad_gamma.mech.gamma_m = 0.0;
    CHECK_THROWS_AS(validate(bad_gamma), std::invalid_argument);
}
