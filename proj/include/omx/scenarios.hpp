#pragma once

#include "omx/calibration.hpp"
#include "omx/config.hpp"
#include "omx/detection.hpp"
#include "omx/fits.hpp"
#include "omx/sweep.hpp"

#include <string>
#include <vector>

namespace omx {

// Mean output photon flux |sqrt(kappa2_ext) alpha2|^2 within the gate,
// evaluated through the gated-spectrum chain (Parseval makes this the gate
// average of the output flux).
double gated_output_flux(const Trajectory& traj, const SystemParams& params,
                         const GateWindow& gate, const SpectrumOptions& opts = {});

struct EfficiencyCurve {
    double p2_mw = 0.0;
    double eta_product = 0.0;
    std::vector<double> p1_mw;
    std::vector<double> chi_steady;
    std::vector<double> chi_gated;
};

// Conversion efficiency vs P1 at each configured P2: closed-form steady state
// next to the transient-plus-gated-detection value.
std::vector<EfficiencyCurve> run_efficiency_sweep(const RunConfig& cfg,
                                                  Exec exec = Exec::parallel);

struct TransientCurve {
    double duration_us = 0.0;
    std::vector<double> gate_delay_us;
    std::vector<double> output_power_w;
    Trajectory trajectory;  // retained when cfg.transient_dump_trajectory
};

std::vector<TransientCurve> run_transient(const RunConfig& cfg,
                                          Exec exec = Exec::parallel);

struct SpectralCurve {
    double duration_us = 0.0;
    std::vector<double> delta_hz;
    std::vector<double> output_power_w;
};

// Gated output power vs signal detuning for each configured pulse duration.
std::vector<SpectralCurve> run_spectral_response(const RunConfig& cfg,
                                                 Exec exec = Exec::parallel);

struct ProbeCurve {
    std::string axis;  // "p1" or "p2"
    std::vector<double> power_mw;
    std::vector<double> intensity;
};

// Gated-probe mechanical intensity along the configured power sweep.
ProbeCurve run_mechanical_probe(const RunConfig& cfg, Exec exec = Exec::parallel);

struct RingdownResult {
    std::vector<double> gate_delay_us;
    std::vector<double> intensity;
    ExponentialFit decay;
    PowerSpectrum spectrum;  // sliced around the mechanical line
    LorentzianFit line;
};

RingdownResult run_ringdown(const RunConfig& cfg);

// CSV renderers (LF line endings, header row first).
std::string efficiency_csv(const EfficiencyCurve& curve);
std::string transient_csv(const TransientCurve& curve);
std::string spectral_csv(const SpectralCurve& curve);
std::string probe_csv(const ProbeCurve& curve);
std::string ringdown_decay_csv(const RingdownResult& r);

} // namespace omx
