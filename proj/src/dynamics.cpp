#include "omx/dynamics.hpp"

#include "omx/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <random>

namespace omx {

namespace {

struct Rates {
    Complex pole1;   // i*Delta_s - kappa1/2
    Complex pole2;   // i*(Delta_s + Delta2 - Delta1) - kappa2/2
    Complex pole_m;  // i*(delta - omega_m) - gamma_m/2
    double root_kappa1_ext;
};

Rates precompute(const SystemParams& p, const PulseProgram& program)
{
    const Complex i(0.0, 1.0);
    const double delta = program.signal_detuning;
    const double delta_s = delta + p.mode1.drive_detuning;
    const double delta_2 = delta_s + p.mode2.drive_detuning - p.mode1.drive_detuning;
    return Rates{
        i * delta_s - 0.5 * p.mode1.kappa_total,
        i * delta_2 - 0.5 * p.mode2.kappa_total,
        i * (delta - p.mech.omega_m) - 0.5 * p.mech.gamma_m,
        std::sqrt(p.mode1.kappa_ext),
    };
}

struct Couplings {
    double g1;  // drive-1 coupling at time t, probe included
    double g2;
};

Couplings couplings_at(const SystemParams& p, const PulseProgram& program, double t)
{
    double g1 = p.coupling.g1 * program.envelope_drive1(t);
    if (program.probe)
        g1 += program.probe->g_probe * program.envelope_probe(t);
    return Couplings{g1, p.coupling.g2 * program.envelope_drive2(t)};
}

inline ModeState rhs(const ModeState& s, const Rates& r, const Couplings& g, Complex s_in)
{
    const Complex i(0.0, 1.0);
    return ModeState{
        r.pole1 * s.alpha1 - i * (g.g1 * s.beta) + r.root_kappa1_ext * s_in,
        r.pole2 * s.alpha2 - i * (g.g2 * s.beta),
        r.pole_m * s.beta - i * (g.g1 * s.alpha1 + g.g2 * s.alpha2),
    };
}

inline ModeState axpy(const ModeState& s, double h, const ModeState& k)
{
    return ModeState{s.alpha1 + h * k.alpha1, s.alpha2 + h * k.alpha2, s.beta + h * k.beta};
}

bool finite(const ModeState& s)
{
    return std::isfinite(s.alpha1.real()) && std::isfinite(s.alpha1.imag()) &&
           std::isfinite(s.alpha2.real()) && std::isfinite(s.alpha2.imag()) &&
           std::isfinite(s.beta.real()) && std::isfinite(s.beta.imag());
}

} // namespace

ModeState derivative(const ModeState& state, double t, const SystemParams& params,
                     const PulseProgram& program, Complex s_in)
{
    return rhs(state, precompute(params, program), couplings_at(params, program, t), s_in);
}

double max_stable_dt(const SystemParams& params, const PulseProgram& program)
{
    const double beta_rate =
        std::abs(program.signal_detuning - params.mech.omega_m) + params.mech.gamma_m;
    const double fastest =
        std::max({params.mode1.kappa_total, params.mode2.kappa_total, beta_rate});
    return 0.1 / fastest;
}

double suggested_dt(const SystemParams& params, const PulseProgram& program, double factor)
{
    const Rates r = precompute(params, program);
    const double fastest = std::max({params.mode1.kappa_total, params.mode2.kappa_total,
                                     std::abs(r.pole1), std::abs(r.pole2),
                                     std::abs(r.pole_m), params.coupling.g1,
                                     params.coupling.g2});
    return factor / fastest;
}

Trajectory integrate(const SystemParams& params, const PulseProgram& program,
                     Complex s_in_amplitude, const IntegrationOptions& opts)
{
    validate(params);
    program.validate();
    if (!(opts.t_end > 0.0))
        throw NumericalError("integrate: t_end must be > 0");
    const double dt = opts.dt > 0.0 ? opts.dt : suggested_dt(params, program);
    if (dt > max_stable_dt(params, program)) {
        char msg[160];
        std::snprintf(msg, sizeof msg,
                      "integrate: dt=%.3e exceeds 0.1/max_rate=%.3e", dt,
                      max_stable_dt(params, program));
        throw NumericalError(msg);
    }

    const Rates rates = precompute(params, program);
    auto n_steps = static_cast<std::size_t>(std::ceil(opts.t_end / dt - 1e-9));
    if (n_steps == 0)
        n_steps = 1;
    std::size_t stride = opts.record_stride == 0 ? 1 : opts.record_stride;
    stride = std::min(stride, n_steps);
    n_steps = (n_steps + stride - 1) / stride * stride;  // final step on the record grid

    Trajectory traj;
    traj.t0 = 0.0;
    traj.dt = dt * static_cast<double>(stride);
    traj.samples.reserve(n_steps / stride + 2);
    traj.samples.push_back(opts.initial);

    const bool noisy = opts.thermal.enabled && opts.thermal.n_th > 0.0;
    std::mt19937_64 rng(opts.thermal.seed);

    ModeState s = opts.initial;
    for (std::size_t step = 0; step < n_steps; ++step) {
        const double t = dt * static_cast<double>(step);
        const Couplings g0 = couplings_at(params, program, t);
        const Couplings gh = couplings_at(params, program, t + 0.5 * dt);
        const Couplings g1 = couplings_at(params, program, t + dt);
        const Complex in0 = s_in_amplitude * program.envelope_signal(t);
        const Complex inh = s_in_amplitude * program.envelope_signal(t + 0.5 * dt);
        const Complex in1 = s_in_amplitude * program.envelope_signal(t + dt);

        const ModeState k1 = rhs(s, rates, g0, in0);
        const ModeState k2 = rhs(axpy(s, 0.5 * dt, k1), rates, gh, inh);
        const ModeState k3 = rhs(axpy(s, 0.5 * dt, k2), rates, gh, inh);
        const ModeState k4 = rhs(axpy(s, dt, k3), rates, g1, in1);

        s.alpha1 += dt / 6.0 * (k1.alpha1 + 2.0 * (k2.alpha1 + k3.alpha1) + k4.alpha1);
        s.alpha2 += dt / 6.0 * (k1.alpha2 + 2.0 * (k2.alpha2 + k3.alpha2) + k4.alpha2);
        s.beta += dt / 6.0 * (k1.beta + 2.0 * (k2.beta + k3.beta) + k4.beta);

        if (noisy)
            s.beta += thermal_step_noise(dt, params.mech.gamma_m, opts.thermal.n_th, rng);

        if ((step & 0xff) == 0 && !finite(s)) {
            char msg[120];
            std::snprintf(msg, sizeof msg, "integrate: non-finite state at t=%.6e s", t);
            throw NumericalError(msg);
        }
        if ((step + 1) % stride == 0)
            traj.samples.push_back(s);
    }
    if (!finite(s))
        throw NumericalError("integrate: non-finite state at end of run");
    return traj;
}

Complex thermal_step_noise(double dt, double gamma_m, double n_th, std::mt19937_64& rng)
{
    if (!(dt > 0.0))
        throw std::domain_error("thermal_step_noise: dt must be > 0");
    if (n_th == 0.0)
        return Complex(0.0, 0.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double sigma = std::sqrt(0.5 * gamma_m * n_th * dt);
    return Complex(sigma * gauss(rng), sigma * gauss(rng));
}

Complex output_field(const ModeState& state, const SystemParams& params, Complex s_in,
                     int mode_index)
{
    if (mode_index == 1)
        return std::sqrt(params.mode1.kappa_ext) * state.alpha1 - s_in;
    if (mode_index == 2)
        return std::sqrt(params.mode2.kappa_ext) * state.alpha2;
    throw std::domain_error("output_field: mode_index must be 1 or 2");
}

double flux_balance_residual(const ModeState& state, const SystemParams& params,
                             Complex s_in)
{
    const double dissipated = params.mode1.kappa_total * std::norm(state.alpha1) +
                              params.mode2.kappa_total * std::norm(state.alpha2) +
                              params.mech.gamma_m * std::norm(state.beta);
    const double injected = 2.0 * std::sqrt(params.mode1.kappa_ext) *
                            (std::conj(s_in) * state.alpha1).real();
    const double input_flux = std::norm(s_in);
    const double defect = std::abs(dissipated - injected);
    if (input_flux == 0.0)
        return defect == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return defect / input_flux;
}

std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t index)
{
    // splitmix64 over (base, index)
    std::uint64_t z = base_seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

void write_trajectory_csv(const Trajectory& traj, std::ostream& out)
{
    out << "t_s,re_alpha1,im_alpha1,re_alpha2,im_alpha2,re_beta,im_beta\n";
    char line[256];
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const ModeState& s = traj.samples[i];
        std::snprintf(line, sizeof line,
                      "%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g\n", traj.time_at(i),
                      s.alpha1.real(), s.alpha1.imag(), s.alpha2.real(), s.alpha2.imag(),
                      s.beta.real(), s.beta.imag());
        out << line;
    }
}

} // namespace omx
