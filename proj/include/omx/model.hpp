#pragma once

#include "omx/params.hpp"
#include "omx/units.hpp"

namespace omx {

// Instantaneous complex amplitudes of the two optical signal fields
// (sqrt-photon units) and the mechanical mode (sqrt-phonon units).
struct ModeState {
    Complex alpha1{};
    Complex alpha2{};
    Complex beta{};

    double excitation_number() const
    {
        return std::norm(alpha1) + std::norm(alpha2) + std::norm(beta);
    }
};

// C = 4 g^2 / (gamma_m * kappa)
double cooperativity(double g, double gamma_m, double kappa);

// Inverse of cooperativity(): g = sqrt(C * gamma_m * kappa) / 2
double coupling_from_cooperativity(double C, double gamma_m, double kappa);

// chi = eta1 * eta2 * 4 C1 C2 / (1 + C1 + C2)^2
double steady_state_efficiency(double C1, double C2, double eta1, double eta2);

// |beta|^2 = eta1 * C1 * 4 * input_flux / (gamma_m * (1 + C1 + C2)^2)
double mechanical_intensity_ss(double C1, double C2, double eta1, double gamma_m,
                               double input_flux);

// C1 that maximizes the conversion efficiency at fixed C2: 1 + C2.
double optimal_c1(double C2);

// Steady-state amplitudes for a CW input at detuning signal_detuning from
// drive 1 (rad/s), with |s_in|^2 the input photon flux. Solves the 3x3
// linear system obtained from the equations of motion at d/dt = 0.
ModeState steady_state_amplitudes(const SystemParams& params, double signal_detuning,
                                  Complex s_in);

// Convenience builders used by scenarios and tests.
SystemParams make_system(double C1, double C2, double eta1, double eta2,
                         double kappa1, double kappa2, double omega_m, double gamma_m);

double efficiency_from_params(const SystemParams& params);

} // namespace omx
