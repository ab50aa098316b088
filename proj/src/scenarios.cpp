#include "omx/scenarios.hpp"

#include "omx/errors.hpp"
#include "omx/model.hpp"
#include "omx/units.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace omx {

namespace {

std::size_t record_stride(std::size_t n_steps, std::size_t cap = 1 << 18)
{
    return std::max<std::size_t>(1, n_steps / cap);
}

ComplexSeries output_series(const Trajectory& traj, const SystemParams& params)
{
    ComplexSeries s;
    s.t0 = traj.t0;
    s.dt = traj.dt;
    s.samples.resize(traj.size());
    const double root_kappa = std::sqrt(params.mode2.kappa_ext);
    for (std::size_t i = 0; i < traj.size(); ++i)
        s.samples[i] = root_kappa * traj.samples[i].alpha2;
    return s;
}

std::string format_row(double a, double b)
{
    char buf[80];
    std::snprintf(buf, sizeof buf, "%.12g,%.12g\n", a, b);
    return buf;
}

std::string format_row(double a, double b, double c)
{
    char buf[120];
    std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g\n", a, b, c);
    return buf;
}

// Copies of the config's system parameters with the output-coupling ratios
// replaced by the symmetric split of the requested eta product.
SystemParams params_with_eta(const RunConfig& cfg, double p1_mw, double p2_mw,
                             double eta_product)
{
    SystemParams p = system_params_for_powers(cfg, p1_mw, p2_mw);
    const double eta = std::sqrt(eta_product);
    p.mode1.kappa_ext = eta * p.mode1.kappa_total;
    p.mode2.kappa_ext = eta * p.mode2.kappa_total;
    return p;
}

} // namespace

double gated_output_flux(const Trajectory& traj, const SystemParams& params,
                         const GateWindow& gate, const SpectrumOptions& opts)
{
    const ComplexSeries out = output_series(traj, params);
    const PowerSpectrum spec = gated_power_spectrum(out, gate, opts);
    return integrated_power(spec, spec.f0, spec.f0 + spec.span());
}

std::vector<EfficiencyCurve> run_efficiency_sweep(const RunConfig& cfg, Exec exec)
{
    if (cfg.sweep_variable != "p1")
        throw ConfigError("sweep.variable: efficiency-sweep requires 'p1'");
    const std::vector<double> p1_grid = sweep_grid(cfg);
    const Complex s_in = input_amplitude(cfg);
    const double input_flux = std::norm(s_in);
    const GateWindow gate{cfg.gate_start_us * 1e-6, cfg.gate_length_us * 1e-6};
    const SpectrumOptions opts = spectrum_options(cfg);

    std::vector<EfficiencyCurve> curves(cfg.efficiency_p2_mw.size());
    for (std::size_t c = 0; c < curves.size(); ++c) {
        curves[c].p2_mw = cfg.efficiency_p2_mw[c];
        curves[c].eta_product = cfg.efficiency_eta_products[c];
        curves[c].p1_mw = p1_grid;
        curves[c].chi_steady.resize(p1_grid.size());
        curves[c].chi_gated.resize(p1_grid.size());
    }

    const std::size_t per_curve = p1_grid.size();
    for_indexed(curves.size() * per_curve, [&](std::size_t job) {
        const std::size_t c = job / per_curve;
        const std::size_t i = job % per_curve;
        EfficiencyCurve& curve = curves[c];
        const double p1 = p1_grid[i];
        const double c1 = cfg.k1_per_mw * p1;
        const double c2 = cfg.k2_per_mw * curve.p2_mw;
        const double eta = std::sqrt(curve.eta_product);
        curve.chi_steady[i] = steady_state_efficiency(c1, c2, eta, eta);

        const SystemParams params = params_with_eta(cfg, p1, curve.p2_mw,
                                                    curve.eta_product);
        const PulseProgram program = pulse_program(cfg, cfg.pulse_duration_us, false);
        IntegrationOptions iopt;
        iopt.dt = integration_dt(cfg, params, program);
        iopt.t_end = std::max(cfg.pulse_duration_us * 1e-6,
                              (gate.start + gate.length) + 2.0 * iopt.dt);
        const auto n_steps = static_cast<std::size_t>(iopt.t_end / iopt.dt);
        iopt.record_stride = record_stride(n_steps);
        iopt.thermal.enabled = cfg.thermal_enabled;
        iopt.thermal.n_th = cfg.thermal_n_th;
        iopt.thermal.seed = derive_seed(cfg.seed, job);
        const Trajectory traj = integrate(params, program, s_in, iopt);
        const double flux = gated_output_flux(traj, params, gate, opts);
        curve.chi_gated[i] = input_flux > 0.0 ? flux / input_flux : 0.0;
    }, exec, cfg.threads);
    return curves;
}

std::vector<TransientCurve> run_transient(const RunConfig& cfg, Exec exec)
{
    const Complex s_in = input_amplitude(cfg);
    const double photon_energy = output_photon_energy(cfg);
    const SpectrumOptions opts = spectrum_options(cfg);
    const double gate_len = cfg.transient_gate_length_us * 1e-6;
    const double gate_step = cfg.transient_gate_step_us * 1e-6;

    std::vector<TransientCurve> curves(cfg.transient_durations_us.size());
    for_indexed(curves.size(), [&](std::size_t c) {
        const double duration_us = cfg.transient_durations_us[c];
        TransientCurve& curve = curves[c];
        curve.duration_us = duration_us;

        const SystemParams params = system_params(cfg);
        const PulseProgram program = pulse_program(cfg, duration_us, false);
        IntegrationOptions iopt;
        iopt.dt = integration_dt(cfg, params, program);
        iopt.t_end = duration_us * 1e-6 + 2e-6 + gate_len;
        const auto n_steps = static_cast<std::size_t>(iopt.t_end / iopt.dt);
        iopt.record_stride = record_stride(n_steps);
        iopt.thermal.enabled = cfg.thermal_enabled;
        iopt.thermal.n_th = cfg.thermal_n_th;
        iopt.thermal.seed = derive_seed(cfg.seed, c);
        const Trajectory traj = integrate(params, program, s_in, iopt);

        for (double d = 0.0; d + gate_len <= iopt.t_end + 1e-15; d += gate_step) {
            const GateWindow gate{d, gate_len};
            const double flux = gated_output_flux(traj, params, gate, opts);
            curve.gate_delay_us.push_back(d * 1e6);
            curve.output_power_w.push_back(flux * photon_energy);
        }
        if (cfg.transient_dump_trajectory)
            curve.trajectory = traj;
    }, exec, cfg.threads);
    return curves;
}

std::vector<SpectralCurve> run_spectral_response(const RunConfig& cfg, Exec exec)
{
    if (cfg.sweep_variable != "delta")
        throw ConfigError("sweep.variable: spectral-response requires 'delta'");
    const std::vector<double> delta_grid = sweep_grid(cfg);
    const Complex s_in = input_amplitude(cfg);
    const double photon_energy = output_photon_energy(cfg);
    const SpectrumOptions opts = spectrum_options(cfg);

    std::vector<SpectralCurve> curves(cfg.spectral_durations_us.size());
    for (std::size_t c = 0; c < curves.size(); ++c) {
        curves[c].duration_us = cfg.spectral_durations_us[c];
        curves[c].delta_hz = delta_grid;
        curves[c].output_power_w.resize(delta_grid.size());
    }

    const std::size_t per_curve = delta_grid.size();
    for_indexed(curves.size() * per_curve, [&](std::size_t job) {
        const std::size_t c = job / per_curve;
        const std::size_t i = job % per_curve;
        SpectralCurve& curve = curves[c];
        const double duration = curve.duration_us * 1e-6;

        const SystemParams params = system_params(cfg);
        PulseProgram program = pulse_program(cfg, curve.duration_us, false);
        program.signal_detuning = hz_to_rad(curve.delta_hz[i]);

        // 1 us gate centered in the second half of the signal pulse.
        const double glen = std::min(cfg.gate_length_us * 1e-6, 0.5 * duration);
        const GateWindow gate{0.75 * duration - 0.5 * glen, glen};

        IntegrationOptions iopt;
        iopt.dt = integration_dt(cfg, params, program);
        iopt.t_end = duration;
        const auto n_steps = static_cast<std::size_t>(iopt.t_end / iopt.dt);
        iopt.record_stride = record_stride(n_steps);
        iopt.thermal.enabled = cfg.thermal_enabled;
        iopt.thermal.n_th = cfg.thermal_n_th;
        iopt.thermal.seed = derive_seed(cfg.seed, job);
        const Trajectory traj = integrate(params, program, s_in, iopt);
        const double flux = gated_output_flux(traj, params, gate, opts);
        curve.output_power_w[i] = flux * photon_energy;
    }, exec, cfg.threads);
    return curves;
}

ProbeCurve run_mechanical_probe(const RunConfig& cfg, Exec exec)
{
    if (cfg.sweep_variable != "p1" && cfg.sweep_variable != "p2")
        throw ConfigError("sweep.variable: mechanical-probe requires 'p1' or 'p2'");
    const std::vector<double> grid = sweep_grid(cfg);
    const Complex s_in = input_amplitude(cfg);
    const SpectrumOptions opts = spectrum_options(cfg);

    ProbeCurve curve;
    curve.axis = cfg.sweep_variable;
    curve.power_mw = grid;
    curve.intensity.resize(grid.size());

    for_indexed(grid.size(), [&](std::size_t i) {
        const double p1 = curve.axis == "p1" ? grid[i] : cfg.p1_mw;
        const double p2 = curve.axis == "p2" ? grid[i] : cfg.p2_mw;
        const SystemParams params = system_params_for_powers(cfg, p1, p2);
        const PulseProgram program =
            pulse_program(cfg, cfg.probe_drive_duration_us, true);
        IntegrationOptions iopt;
        iopt.dt = integration_dt(cfg, params, program);
        iopt.t_end = program.probe->window.stop;
        const auto n_steps = static_cast<std::size_t>(iopt.t_end / iopt.dt);
        iopt.record_stride = record_stride(n_steps);
        iopt.thermal.enabled = cfg.thermal_enabled;
        iopt.thermal.n_th = cfg.thermal_n_th;
        iopt.thermal.seed = derive_seed(cfg.seed, i);
        const Trajectory traj = integrate(params, program, s_in, iopt);
        curve.intensity[i] = mechanical_intensity_probe(
            params, program, traj, cfg.heterodyne_offset_hz, opts,
            cfg.probe_gate_length_us * 1e-6);
    }, exec, cfg.threads);
    return curve;
}

RingdownResult run_ringdown(const RunConfig& cfg)
{
    const SystemParams params = system_params(cfg);

    // Free decay: every envelope stays closed, only the initial excitation
    // and the gated detection chain are exercised.
    PulseProgram program = PulseProgram::synchronized(0.0, hz_to_rad(cfg.omega_m_hz));
    program.drive1 = {0.0, 0.0};
    program.drive2 = {0.0, 0.0};
    program.signal = {0.0, 0.0};
    program.repetition_period = std::max(cfg.repetition_period_us, cfg.ringdown_record_us) * 1e-6;

    IntegrationOptions iopt;
    iopt.dt = integration_dt(cfg, params, program);
    iopt.t_end = cfg.ringdown_record_us * 1e-6;
    const auto n_steps = static_cast<std::size_t>(iopt.t_end / iopt.dt);
    iopt.record_stride = record_stride(n_steps);
    iopt.thermal.enabled = cfg.thermal_enabled;
    iopt.thermal.n_th = cfg.thermal_n_th;
    iopt.thermal.seed = cfg.seed;
    iopt.initial = ModeState{0.0, 0.0, Complex(cfg.ringdown_beta0, 0.0)};
    const Trajectory traj = integrate(params, program, Complex(0.0, 0.0), iopt);

    // Displacement record at the heterodyne offset.
    ComplexSeries record;
    record.t0 = traj.t0;
    record.dt = traj.dt;
    record.samples.resize(traj.size());
    const double w0 = two_pi * cfg.heterodyne_offset_hz;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const double t = traj.time_at(i);
        record.samples[i] =
            traj.samples[i].beta * Complex(std::cos(w0 * t), std::sin(w0 * t));
    }
    const SpectrumOptions opts = spectrum_options(cfg);

    RingdownResult result;
    const double glen = cfg.probe_gate_length_us * 1e-6;
    for (int k = 0; k < cfg.ringdown_delay_count; ++k) {
        const double d = static_cast<double>(k) * cfg.ringdown_delay_step_us * 1e-6;
        if (d + glen > iopt.t_end)
            break;
        const PowerSpectrum spec = gated_power_spectrum(record, GateWindow{d, glen}, opts);
        result.gate_delay_us.push_back(d * 1e6);
        result.intensity.push_back(
            integrated_power(spec, spec.f0, spec.f0 + spec.span()));
    }
    std::vector<double> t_s(result.gate_delay_us.size());
    for (std::size_t i = 0; i < t_s.size(); ++i)
        t_s[i] = result.gate_delay_us[i] * 1e-6;
    result.decay = fit_exponential(t_s, result.intensity);

    // Mechanical line from the full record, sliced around the peak.
    const PowerSpectrum full =
        gated_power_spectrum(record, GateWindow{0.0, iopt.t_end}, opts);
    const std::size_t peak = static_cast<std::size_t>(
        std::max_element(full.density.begin(), full.density.end()) -
        full.density.begin());
    const double slice_half = std::max(1e6, 100.0 * cfg.gamma_m_hz);
    const auto lo = static_cast<std::size_t>(std::max(
        0.0, std::floor((full.f_at(peak) - slice_half - full.f0) / full.df)));
    const auto hi = static_cast<std::size_t>(std::min(
        static_cast<double>(full.density.size() - 1),
        std::ceil((full.f_at(peak) + slice_half - full.f0) / full.df)));
    PowerSpectrum slice;
    slice.f0 = full.f_at(lo);
    slice.df = full.df;
    slice.density.assign(full.density.begin() + static_cast<long>(lo),
                         full.density.begin() + static_cast<long>(hi) + 1);
    result.spectrum = std::move(slice);
    result.line = fit_lorentzian(result.spectrum);
    return result;
}

std::string efficiency_csv(const EfficiencyCurve& curve)
{
    std::string out = "p1_mw,chi_steady,chi_gated\n";
    for (std::size_t i = 0; i < curve.p1_mw.size(); ++i)
        out += format_row(curve.p1_mw[i], curve.chi_steady[i], curve.chi_gated[i]);
    return out;
}

std::string transient_csv(const TransientCurve& curve)
{
    std::string out = "gate_delay_us,output_power_w\n";
    for (std::size_t i = 0; i < curve.gate_delay_us.size(); ++i)
        out += format_row(curve.gate_delay_us[i], curve.output_power_w[i]);
    return out;
}

std::string spectral_csv(const SpectralCurve& curve)
{
    std::string out = "delta_hz,output_power_w\n";
    for (std::size_t i = 0; i < curve.delta_hz.size(); ++i)
        out += format_row(curve.delta_hz[i], curve.output_power_w[i]);
    return out;
}

std::string probe_csv(const ProbeCurve& curve)
{
    std::string out = "p1_mw_or_p2_mw,mech_intensity\n";
    for (std::size_t i = 0; i < curve.power_mw.size(); ++i)
        out += format_row(curve.power_mw[i], curve.intensity[i]);
    return out;
}

std::string ringdown_decay_csv(const RingdownResult& r)
{
    std::string out = "gate_delay_us,mech_intensity\n";
    for (std::size_t i = 0; i < r.gate_delay_us.size(); ++i)
        out += format_row(r.gate_delay_us[i], r.intensity[i]);
    return out;
}

} // namespace omx
