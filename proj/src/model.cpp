#include "omx/model.hpp"

#include "omx/errors.hpp"

#include <cmath>
#include <stdexcept>

namespace omx {

double cooperativity(double g, double gamma_m, double kappa)
{
    if (!(gamma_m > 0.0))
        throw std::domain_error("cooperativity: gamma_m must be > 0");
    if (!(kappa > 0.0))
        throw std::domain_error("cooperativity: kappa must be > 0");
    if (g < 0.0)
        throw std::domain_error("cooperativity: g must be >= 0");
    return 4.0 * g * g / (gamma_m * kappa);
}

double coupling_from_cooperativity(double C, double gamma_m, double kappa)
{
    if (C < 0.0)
        throw std::domain_error("coupling_from_cooperativity: C must be >= 0");
    if (!(gamma_m > 0.0) || !(kappa > 0.0))
        throw std::domain_error("coupling_from_cooperativity: rates must be > 0");
    return 0.5 * std::sqrt(C * gamma_m * kappa);
}

double steady_state_efficiency(double C1, double C2, double eta1, double eta2)
{
    if (C1 < 0.0 || C2 < 0.0)
        throw std::domain_error("steady_state_efficiency: cooperativities must be >= 0");
    if (eta1 < 0.0 || eta1 > 1.0 || eta2 < 0.0 || eta2 > 1.0)
        throw std::domain_error("steady_state_efficiency: eta must lie in [0,1]");
    const double denom = 1.0 + C1 + C2;
    return eta1 * eta2 * 4.0 * C1 * C2 / (denom * denom);
}

double mechanical_intensity_ss(double C1, double C2, double eta1, double gamma_m,
                               double input_flux)
{
    if (C1 < 0.0 || C2 < 0.0)
        throw std::domain_error("mechanical_intensity_ss: cooperativities must be >= 0");
    if (!(gamma_m > 0.0))
        throw std::domain_error("mechanical_intensity_ss: gamma_m must be > 0");
    const double denom = 1.0 + C1 + C2;
    return eta1 * C1 * 4.0 * input_flux / (gamma_m * denom * denom);
}

double optimal_c1(double C2)
{
    if (C2 < 0.0)
        throw std::domain_error("optimal_c1: C2 must be >= 0");
    return 1.0 + C2;
}

namespace {

// Gaussian elimination with partial pivoting on a 3x3 complex system.
void solve3(Complex a[3][3], Complex b[3], Complex x[3])
{
    int perm[3] = {0, 1, 2};
    for (int col = 0; col < 3; ++col) {
        int pivot = col;
        for (int r = col + 1; r < 3; ++r)
            if (std::abs(a[perm[r]][col]) > std::abs(a[perm[pivot]][col]))
                pivot = r;
        std::swap(perm[col], perm[pivot]);
        const Complex diag = a[perm[col]][col];
        if (std::abs(diag) == 0.0)
            throw NumericalError("steady_state_amplitudes: singular system matrix");
        for (int r = col + 1; r < 3; ++r) {
            const Complex f = a[perm[r]][col] / diag;
            for (int c = col; c < 3; ++c)
                a[perm[r]][c] -= f * a[perm[col]][c];
            b[perm[r]] -= f * b[perm[col]];
        }
    }
    for (int row = 2; row >= 0; --row) {
        Complex acc = b[perm[row]];
        for (int c = row + 1; c < 3; ++c)
            acc -= a[perm[row]][c] * x[c];
        x[row] = acc / a[perm[row]][row];
    }
}

} // namespace

ModeState steady_state_amplitudes(const SystemParams& params, double signal_detuning,
                                  Complex s_in)
{
    const Complex i(0.0, 1.0);
    const double delta = signal_detuning;
    const double delta_s = delta + params.mode1.drive_detuning;
    const double delta_2 = delta_s + params.mode2.drive_detuning - params.mode1.drive_detuning;
    const double g1 = params.coupling.g1;
    const double g2 = params.coupling.g2;

    // 0 = (i*Delta_s - kappa1/2) a1 - i g1 b + sqrt(kappa1_ext) s_in
    // 0 = (i*Delta_2 - kappa2/2) a2 - i g2 b
    // 0 = (i*(delta - omega_m) - gamma_m/2) b - i (g1 a1 + g2 a2)
    Complex a[3][3] = {
        {i * delta_s - 0.5 * params.mode1.kappa_total, 0.0, -i * g1},
        {0.0, i * delta_2 - 0.5 * params.mode2.kappa_total, -i * g2},
        {-i * g1, -i * g2, i * (delta - params.mech.omega_m) - 0.5 * params.mech.gamma_m},
    };
    Complex b[3] = {-std::sqrt(params.mode1.kappa_ext) * s_in, 0.0, 0.0};
    Complex x[3];
    solve3(a, b, x);
    return ModeState{x[0], x[1], x[2]};
}

SystemParams make_system(double C1, double C2, double eta1, double eta2,
                         double kappa1, double kappa2, double omega_m, double gamma_m)
{
    SystemParams p;
    p.mode1.kappa_total = kappa1;
    p.mode1.kappa_ext = eta1 * kappa1;
    p.mode1.drive_detuning = -omega_m;
    p.mode2.kappa_total = kappa2;
    p.mode2.kappa_ext = eta2 * kappa2;
    p.mode2.drive_detuning = -omega_m;
    p.mech.omega_m = omega_m;
    p.mech.gamma_m = gamma_m;
    p.coupling.g1 = coupling_from_cooperativity(C1, gamma_m, kappa1);
    p.coupling.g2 = coupling_from_cooperativity(C2, gamma_m, kappa2);
    return p;
}

double efficiency_from_params(const SystemParams& params)
{
    const double C1 = cooperativity(params.coupling.g1, params.mech.gamma_m,
                                    params.mode1.kappa_total);
    const double C2 = cooperativity(params.coupling.g2, params.mech.gamma_m,
                                    params.mode2.kappa_total);
    return steady_state_efficiency(C1, C2, params.mode1.eta(), params.mode2.eta());
}

} // namespace omx
