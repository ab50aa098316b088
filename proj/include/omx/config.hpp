#pragma once

#include "omx/detection.hpp"
#include "omx/dynamics.hpp"
#include "omx/params.hpp"
#include "omx/pulse.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace omx {

// Flat key = value configuration with dotted section prefixes. Frequencies in
// Hz, times in us, powers in mW; conversion to angular rates happens when the
// domain structs are built. Defaults describe the reference device.
struct RunConfig {
    // system
    double kappa1_hz = 30e6;
    double kappa1_ext_hz = 13.5e6;
    double kappa2_hz = 30e6;
    double kappa2_ext_hz = 13.5e6;
    double omega_m_hz = 101e6;
    double gamma_m_hz = 20e3;
    double delta1_hz = -101e6;
    double delta2_hz = -101e6;
    double lambda1_nm = 800.0;
    double lambda2_nm = 637.0;

    // calibration
    double k1_per_mw = 0.2;
    double k2_per_mw = 1.0 / 15.0;

    // drive
    double p1_mw = 25.0;
    double p2_mw = 6.0;
    double pin_mw = 0.2;

    // pulse
    double pulse_duration_us = 6.0;
    std::string pulse_shape = "rectangular";
    double rise_time_ns = 50.0;
    double signal_detuning_hz = 101e6;
    double repetition_period_us = 200.0;

    // probe
    double probe_delay_us = 1.0;
    double probe_duration_us = 3.0;
    double probe_gate_length_us = 1.0;
    double probe_cooperativity = 0.02;
    double probe_drive_duration_us = 60.0;  // long enough to settle the mechanics

    // detection
    double gate_start_us = 4.0;
    double gate_length_us = 1.0;
    int zero_pad_factor = 8;
    std::string spectrum_window = "rectangular";
    double rbw_hz = 0.0;
    double heterodyne_offset_hz = 101e6;
    double calibration_scale = 1.0;

    // sweep
    std::string sweep_variable = "p1";
    double sweep_start = 0.0;
    double sweep_stop = 30.0;
    int sweep_points = 61;
    std::string sweep_scale = "linear";

    // efficiency
    std::vector<double> efficiency_p2_mw = {2.0, 11.0, 21.0};
    std::vector<double> efficiency_eta_products = {0.2025, 0.2025, 0.25};

    // transient
    std::vector<double> transient_durations_us = {6.0, 3.0};
    double transient_gate_length_us = 0.5;
    double transient_gate_step_us = 0.25;
    bool transient_dump_trajectory = false;

    // spectral
    std::vector<double> spectral_durations_us = {6.0, 3.0};

    // ringdown
    double ringdown_beta0 = 1000.0;
    double ringdown_record_us = 320.0;
    double ringdown_delay_step_us = 1.0;
    int ringdown_delay_count = 17;

    // thermal
    bool thermal_enabled = false;
    double thermal_n_th = 0.0;

    // run
    std::uint64_t seed = 1;
    int threads = 0;  // 0 = all available cores
    double dt_factor = 0.08;
    double dt_ns = 0.0;  // 0 = derive from the fastest rate
};

RunConfig parse_config(std::istream& in);
RunConfig parse_config_file(const std::string& path);
std::string serialize_config(const RunConfig& cfg);

// Hard invariants (throws ConfigError with the offending key) and soft
// warnings (returned).
std::vector<std::string> validate_config(const RunConfig& cfg);

// Domain-struct builders (Hz -> rad/s happens here).
SystemParams system_params(const RunConfig& cfg);
SystemParams system_params_for_powers(const RunConfig& cfg, double p1_mw, double p2_mw);
PowerCalibration power_calibration(const RunConfig& cfg);
PulseProgram pulse_program(const RunConfig& cfg, double duration_us, bool with_probe);
Complex input_amplitude(const RunConfig& cfg);   // sqrt of the input photon flux
double output_photon_energy(const RunConfig& cfg);
SpectrumOptions spectrum_options(const RunConfig& cfg);
std::vector<double> sweep_grid(const RunConfig& cfg);
double integration_dt(const RunConfig& cfg, const SystemParams& params,
                      const PulseProgram& program);

} // namespace omx
