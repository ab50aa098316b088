#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace omx {

// One optical cavity mode. All rates angular (rad/s).
struct OpticalModeParams {
    double kappa_total = 0.0;   // total cavity decay rate
    double kappa_ext = 0.0;     // output coupling rate, 0 <= kappa_ext <= kappa_total
    double resonance = 0.0;     // cavity resonance frequency
    double drive_detuning = 0.0; // drive minus resonance; negative = red-detuned

    double eta() const { return kappa_ext / kappa_total; }
};

struct MechanicalModeParams {
    double omega_m = 0.0;  // mechanical frequency (rad/s)
    double gamma_m = 0.0;  // intrinsic damping rate (rad/s); intensity decays at gamma_m
};

// Effective drive-enhanced coupling rates. Real and non-negative; drive
// phases are absorbed into the mode amplitudes.
struct CouplingParams {
    double g1 = 0.0;
    double g2 = 0.0;
};

struct SystemParams {
    OpticalModeParams mode1;
    OpticalModeParams mode2;
    MechanicalModeParams mech;
    CouplingParams coupling;
};

// Proportionality between drive power (mW) and cooperativity: C_i = k_i * P_i.
struct PowerCalibration {
    double k1 = 0.0;  // 1/mW
    double k2 = 0.0;  // 1/mW
};

inline void validate(const OpticalModeParams& m, const std::string& name)
{
    if (!(m.kappa_total > 0.0))
        throw std::invalid_argument(name + ": kappa_total must be > 0");
    if (m.kappa_ext < 0.0 || m.kappa_ext > m.kappa_total)
        throw std::invalid_argument(name + ": kappa_ext must lie in [0, kappa_total]");
}

inline void validate(const MechanicalModeParams& m)
{
    if (!(m.omega_m > 0.0))
        throw std::invalid_argument("mech: omega_m must be > 0");
    if (!(m.gamma_m > 0.0))
        throw std::invalid_argument("mech: gamma_m must be > 0");
}

inline void validate(const CouplingParams& c)
{
    if (c.g1 < 0.0 || c.g2 < 0.0)
        throw std::invalid_argument("coupling: g1, g2 must be >= 0");
}

inline void validate(const PowerCalibration& c)
{
    if (!(c.k1 > 0.0) || !(c.k2 > 0.0))
        throw std::invalid_argument("calibration: k1, k2 must be > 0");
}

// Validates hard invariants; returns soft warnings (does not reject them).
inline std::vector<std::string> validate(const SystemParams& p)
{
    validate(p.mode1, "mode1");
    validate(p.mode2, "mode2");
    validate(p.mech);
    validate(p.coupling);

    std::vector<std::string> warnings;
    if (p.mech.omega_m <= p.mode1.kappa_total || p.mech.omega_m <= p.mode2.kappa_total)
        warnings.push_back("not in the resolved-sideband regime: omega_m <= kappa");
    return warnings;
}

} // namespace omx
