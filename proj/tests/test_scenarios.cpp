#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "omx/errors.hpp"
#include "omx/model.hpp"
#include "omx/scenarios.hpp"
#include "omx/units.hpp"

#include <algorithm>
#include <cmath>

using namespace omx;

namespace {

RunConfig small_efficiency_config()
{
    RunConfig cfg;
    cfg.sweep_variable = "p1";
    cfg.sweep_start = 0.0;
    cfg.sweep_stop = 30.0;
    cfg.sweep_points = 7;
    cfg.efficiency_p2_mw = {11.0};
    cfg.efficiency_eta_products = {0.2025};
    return cfg;
}

} // namespace

TEST_CASE("efficiency sweep: steady column matches the closed form")
{
    const RunConfig cfg = small_efficiency_config();
    const auto curves = run_efficiency_sweep(cfg);
    REQUIRE(curves.size() == 1);
    const EfficiencyCurve& c = curves[0];
    REQUIRE(c.p1_mw.size() == 7);
    for (std::size_t i = 0; i < c.p1_mw.size(); ++i) {
        const double c1 = cfg.k1_per_mw * c.p1_mw[i];
        const double c2 = cfg.k2_per_mw * 11.0;
        const double eta = std::sqrt(0.2025);
        CHECK(c.chi_steady[i] ==
              doctest::Approx(steady_state_efficiency(c1, c2, eta, eta)).epsilon(1e-12));
        // The gated value sits below steady state (finite-pulse rise) but
        // stays non-negative.
        CHECK(c.chi_gated[i] >= 0.0);
        CHECK(c.chi_gated[i] <= c.chi_steady[i] * 1.0001 + 1e-15);
    }
    CHECK(c.chi_gated[0] == 0.0);  // P1 = 0 converts nothing
}

TEST_CASE("efficiency sweep: gated value approaches steady state once the gate "
          "sits well past the rise")
{
    RunConfig cfg = small_efficiency_config();
    // gamma_eff t_gate >> 1: C1 + C2 = 16.4 settles within ~1 us.
    cfg.sweep_start = 75.0;
    cfg.sweep_stop = 80.0;
    cfg.sweep_points = 2;
    cfg.efficiency_p2_mw = {21.0};
    cfg.efficiency_eta_products = {0.25};
    const auto curves = run_efficiency_sweep(cfg);
    for (std::size_t i = 0; i < curves[0].p1_mw.size(); ++i)
        CHECK(curves[0].chi_gated[i] ==
              doctest::Approx(curves[0].chi_steady[i]).epsilon(0.05));
}

TEST_CASE("efficiency sweep: serial and parallel execution agree bitwise")
{
    RunConfig cfg = small_efficiency_config();
    // Thermal noise on: per-point RNG seeds must not depend on scheduling.
    cfg.thermal_enabled = true;
    cfg.thermal_n_th = 500.0;
    const auto serial = run_efficiency_sweep(cfg, Exec::serial);
    const auto parallel = run_efficiency_sweep(cfg, Exec::parallel);
    REQUIRE(serial.size() == parallel.size());
    for (std::size_t c = 0; c < serial.size(); ++c)
        for (std::size_t i = 0; i < serial[c].p1_mw.size(); ++i) {
            CHECK(serial[c].chi_steady[i] == parallel[c].chi_steady[i]);
            CHECK(serial[c].chi_gated[i] == parallel[c].chi_gated[i]);
        }
}

TEST_CASE("efficiency sweep: repeated runs render byte-identical CSV")
{
    const RunConfig cfg = small_efficiency_config();
    const std::string a = efficiency_csv(run_efficiency_sweep(cfg)[0]);
    const std::string b = efficiency_csv(run_efficiency_sweep(cfg)[0]);
    CHECK(a == b);
    CHECK(a.rfind("p1_mw,chi_steady,chi_gated\n", 0) == 0);
}

TEST_CASE("efficiency sweep: no second drive, no conversion anywhere")
{
    RunConfig cfg = small_efficiency_config();
    cfg.efficiency_p2_mw = {0.0};
    cfg.efficiency_eta_products = {0.2025};
    const auto curves = run_efficiency_sweep(cfg);
    for (std::size_t i = 0; i < curves[0].p1_mw.size(); ++i) {
        CHECK(curves[0].chi_steady[i] == 0.0);
        CHECK(curves[0].chi_gated[i] <= 1e-300);
    }
}

TEST_CASE("efficiency sweep: wrong sweep variable is a config error")
{
    RunConfig cfg = small_efficiency_config();
    cfg.sweep_variable = "delta";
    CHECK_THROWS_AS(run_efficiency_sweep(cfg), ConfigError);
}

TEST_CASE("transient: zero signal input gives zero output at every delay")
{
    RunConfig cfg;
    cfg.pin_mw = 0.0;
    cfg.transient_durations_us = {3.0};
    const auto curves = run_transient(cfg);
    REQUIRE(curves.size() == 1);
    CHECK(!curves[0].gate_delay_us.empty());
    for (double p : curves[0].output_power_w)
        CHECK(p == 0.0);
}

TEST_CASE("transient: output rises monotonically through the pulse")
{
    RunConfig cfg;
    cfg.transient_durations_us = {6.0};
    cfg.transient_gate_step_us = 0.5;
    const auto curve = run_transient(cfg)[0];
    double prev = -1.0;
    for (std::size_t i = 0; i < curve.gate_delay_us.size(); ++i) {
        if (curve.gate_delay_us[i] + cfg.transient_gate_length_us > 6.0)
            break;  // gate starts to leave the pulse
        CHECK(curve.output_power_w[i] > prev);
        prev = curve.output_power_w[i];
    }
    // After the pulse the output collapses with the cavity field.
    CHECK(curve.output_power_w.back() < 0.01 * prev);
}

TEST_CASE("spectral response: resonance at omega_m, symmetric, sharp")
{
    RunConfig cfg;
    cfg.sweep_variable = "delta";
    cfg.sweep_start = 100.7e6;
    cfg.sweep_stop = 101.3e6;
    cfg.sweep_points = 13;
    cfg.spectral_durations_us = {6.0};
    cfg.p1_mw = 16.0;
    cfg.p2_mw = 3.0;
    const auto curves = run_spectral_response(cfg);
    REQUIRE(curves.size() == 1);
    const SpectralCurve& c = curves[0];

    const auto peak = static_cast<std::size_t>(
        std::max_element(c.output_power_w.begin(), c.output_power_w.end()) -
        c.output_power_w.begin());
    CHECK(c.delta_hz[peak] == doctest::Approx(101e6).epsilon(1e-9));

    // Symmetry about omega_m within 1%.
    for (std::size_t i = 0; i < c.delta_hz.size() / 2; ++i) {
        const double lo = c.output_power_w[i];
        const double hi = c.output_power_w[c.delta_hz.size() - 1 - i];
        CHECK(lo == doctest::Approx(hi).epsilon(0.01));
    }
}

TEST_CASE("spectral response: far-detuned output is buried")
{
    RunConfig cfg;
    cfg.sweep_variable = "delta";
    cfg.sweep_start = 101e6;
    cfg.sweep_stop = 181e6;  // up to 80 MHz off the mechanical resonance
    cfg.sweep_points = 2;
    cfg.spectral_durations_us = {6.0};
    cfg.p1_mw = 16.0;
    cfg.p2_mw = 3.0;
    const auto c = run_spectral_response(cfg)[0];
    CHECK(c.output_power_w[1] <= 1e-4 * c.output_power_w[0]);
}

TEST_CASE("mechanical probe: no first drive, no coherent excitation")
{
    RunConfig cfg;
    cfg.sweep_variable = "p1";
    cfg.sweep_start = 0.0;
    cfg.sweep_stop = 8.0;
    cfg.sweep_points = 3;
    cfg.p2_mw = 0.0;
    cfg.probe_drive_duration_us = 12.0;  // short run, shape not under test here
    const ProbeCurve curve = run_mechanical_probe(cfg);
    REQUIRE(curve.power_mw.size() == 3);
    // Only the evanescent cavity tail survives at P1 = 0.
    CHECK(curve.intensity[0] <= 1e-30 * curve.intensity[1]);
    CHECK(curve.intensity[1] > 0.0);
    CHECK(probe_csv(curve).rfind("p1_mw_or_p2_mw,mech_intensity\n", 0) == 0);
}

TEST_CASE("ringdown: lifetime, linewidth and their consistency")
{
    RunConfig cfg;
    cfg.ringdown_beta0 = 500.0;
    cfg.ringdown_record_us = 320.0;
    cfg.ringdown_delay_count = 14;
    const RingdownResult r = run_ringdown(cfg);

    const double gamma = two_pi * cfg.gamma_m_hz;
    CHECK(r.decay.lifetime == doctest::Approx(1.0 / gamma).epsilon(0.01));
    CHECK(two_pi * r.line.fwhm == doctest::Approx(gamma).epsilon(0.01));
    CHECK(r.line.center == doctest::Approx(cfg.heterodyne_offset_hz).epsilon(1e-6));

    // Linewidth-lifetime product: 2 pi fwhm tau = 1 within 5%.
    CHECK(two_pi * r.line.fwhm * r.decay.lifetime == doctest::Approx(1.0).epsilon(0.05));

    CHECK(ringdown_decay_csv(r).rfind("gate_delay_us,mech_intensity\n", 0) == 0);
}

TEST_CASE("ringdown: 16 kHz device variant")
{
    RunConfig cfg;
    cfg.gamma_m_hz = 16e3;
    cfg.ringdown_beta0 = 500.0;
    cfg.ringdown_record_us = 400.0;
    cfg.ringdown_delay_count = 14;
    const RingdownResult r = run_ringdown(cfg);
    CHECK(r.line.fwhm == doctest::Approx(16e3).epsilon(0.01));
    CHECK(r.decay.lifetime == doctest::Approx(1.0 / (two_pi * 16e3)).epsilon(0.01));
}

TEST_CASE("ringdown: zero excitation fails with a clean fit diagnostic")
{
    RunConfig cfg;
    cfg.ringdown_beta0 = 0.0;
    CHECK_THROWS_AS(run_ringdown(cfg), FitError);
}
