#include "omx/detection.hpp"

#include "omx/errors.hpp"
#include "omx/model.hpp"
#include "omx/units.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace omx {

namespace {

std::size_t next_pow2(std::size_t n)
{
    std::size_t p = 1;
    while (p < n)
        p <<= 1;
    return p;
}

struct GateSlice {
    std::size_t first = 0;
    std::size_t count = 0;
};

GateSlice locate_gate(const ComplexSeries& trace, const GateWindow& gate)
{
    if (trace.samples.empty() || !(trace.dt > 0.0))
        throw ConfigError("gated_power_spectrum: empty or non-uniform trace");
    if (!(gate.length > 0.0))
        throw ConfigError("gated_power_spectrum: gate length must be > 0");
    const double rel = (gate.start - trace.t0) / trace.dt;
    const auto first = static_cast<long long>(std::ceil(rel - 1e-9));
    const auto last = static_cast<long long>(
        std::floor((gate.start + gate.length - trace.t0) / trace.dt - 1e-9));
    if (first < 0 || last >= static_cast<long long>(trace.size()))
        throw ConfigError("gated_power_spectrum: gate window outside the recorded trace");
    if (last < first + 15)
        throw ConfigError("gated_power_spectrum: fewer than 16 samples in the gate");
    return GateSlice{static_cast<std::size_t>(first),
                     static_cast<std::size_t>(last - first + 1)};
}

std::vector<double> make_window(std::size_t n, SpectrumWindow shape)
{
    std::vector<double> w(n, 1.0);
    if (shape == SpectrumWindow::hann && n > 1) {
        for (std::size_t i = 0; i < n; ++i)
            w[i] = 0.5 * (1.0 - std::cos(two_pi * static_cast<double>(i) /
                                         static_cast<double>(n - 1)));
    }
    return w;
}

void apply_rbw(PowerSpectrum& spec, double rbw_hz)
{
    if (rbw_hz <= 0.0 || spec.density.size() < 2)
        return;
    const double sigma = rbw_hz / 2.3548200450309493;  // FWHM -> sigma
    const auto half = static_cast<long long>(std::ceil(4.0 * sigma / spec.df));
    std::vector<double> kernel(static_cast<std::size_t>(2 * half + 1));
    double sum = 0.0;
    for (long long k = -half; k <= half; ++k) {
        const double f = static_cast<double>(k) * spec.df;
        const double v = std::exp(-0.5 * f * f / (sigma * sigma));
        kernel[static_cast<std::size_t>(k + half)] = v;
        sum += v;
    }
    for (double& v : kernel)
        v /= sum;
    std::vector<double> out(spec.density.size(), 0.0);
    const auto n = static_cast<long long>(spec.density.size());
    for (long long i = 0; i < n; ++i) {
        double acc = 0.0;
        for (long long k = -half; k <= half; ++k) {
            const long long j = i + k;
            if (j >= 0 && j < n)
                acc += kernel[static_cast<std::size_t>(k + half)] *
                       spec.density[static_cast<std::size_t>(j)];
        }
        out[static_cast<std::size_t>(i)] = acc;
    }
    spec.density = std::move(out);
}

PowerSpectrum assemble(const ComplexSeries& trace, const GateWindow& gate,
                       const SpectrumOptions& opts, bool direct)
{
    const GateSlice slice = locate_gate(trace, gate);
    const std::size_t n = slice.count;
    const std::vector<double> w = make_window(n, opts.window);
    double wsq = 0.0;
    for (double v : w)
        wsq += v * v;
    const double norm_u = wsq / static_cast<double>(n);

    const std::size_t pad = std::max<std::size_t>(1, opts.zero_pad_factor);
    const std::size_t m = next_pow2(n * pad);

    std::vector<Complex> data(m, Complex(0.0, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        data[i] = trace.samples[slice.first + i] * w[i];

    std::vector<Complex> dft;
    if (direct) {
        dft.assign(m, Complex(0.0, 0.0));
        for (std::size_t k = 0; k < m; ++k) {
            Complex acc(0.0, 0.0);
            for (std::size_t j = 0; j < n; ++j) {
                const double phase = -two_pi * static_cast<double>(k) *
                                     static_cast<double>(j) / static_cast<double>(m);
                acc += data[j] * Complex(std::cos(phase), std::sin(phase));
            }
            dft[k] = acc;
        }
    } else {
        fft_radix2(data, false);
        dft = std::move(data);
    }

    PowerSpectrum spec;
    spec.df = 1.0 / (static_cast<double>(m) * trace.dt);
    spec.f0 = -static_cast<double>(m / 2) * spec.df;
    spec.density.resize(m);
    const double scale = opts.scale * trace.dt / (static_cast<double>(n) * norm_u);
    for (std::size_t k = 0; k < m; ++k) {
        const std::size_t src = (k + m / 2) % m;  // fftshift
        spec.density[k] = scale * std::norm(dft[src]);
    }
    apply_rbw(spec, opts.rbw_hz);
    return spec;
}

} // namespace

void fft_radix2(std::vector<Complex>& data, bool inverse)
{
    const std::size_t n = data.size();
    if (n == 0 || (n & (n - 1)) != 0)
        throw NumericalError("fft_radix2: size must be a power of two");
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1)
            j ^= bit;
        j ^= bit;
        if (i < j)
            std::swap(data[i], data[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = (inverse ? two_pi : -two_pi) / static_cast<double>(len);
        const Complex wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            Complex w(1.0, 0.0);
            for (std::size_t j = 0; j < len / 2; ++j) {
                const Complex u = data[i + j];
                const Complex v = data[i + j + len / 2] * w;
                data[i + j] = u + v;
                data[i + j + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
    if (inverse)
        for (Complex& c : data)
            c /= static_cast<double>(n);
}

PowerSpectrum gated_power_spectrum(const ComplexSeries& trace, const GateWindow& gate,
                                   const SpectrumOptions& opts)
{
    return assemble(trace, gate, opts, false);
}

PowerSpectrum gated_power_spectrum_direct(const ComplexSeries& trace,
                                          const GateWindow& gate,
                                          const SpectrumOptions& opts)
{
    return assemble(trace, gate, opts, true);
}

double integrated_power(const PowerSpectrum& spectrum, double f_lo, double f_hi)
{
    if (spectrum.density.size() < 2)
        throw ConfigError("integrated_power: spectrum too short");
    if (!(f_hi > f_lo))
        throw ConfigError("integrated_power: empty or inverted band");
    const double f_min = spectrum.f0;
    const double f_max = spectrum.f0 + spectrum.span();
    if (f_lo < f_min - 1e-9 * spectrum.df || f_hi > f_max + 1e-9 * spectrum.df)
        throw ConfigError("integrated_power: band outside the spectrum span");

    // Integral of the piecewise-linear density; exactly additive over splits.
    auto value_at = [&](double f) {
        const double u = (f - spectrum.f0) / spectrum.df;
        const auto i = std::min(static_cast<std::size_t>(std::max(0.0, std::floor(u))),
                                spectrum.density.size() - 2);
        const double frac = u - static_cast<double>(i);
        return spectrum.density[i] * (1.0 - frac) + spectrum.density[i + 1] * frac;
    };
    const double u_lo = (f_lo - spectrum.f0) / spectrum.df;
    const double u_hi = (f_hi - spectrum.f0) / spectrum.df;
    const auto k_lo = static_cast<std::size_t>(std::ceil(u_lo - 1e-12));
    const auto k_hi = static_cast<std::size_t>(std::floor(u_hi + 1e-12));

    double acc = 0.0;
    double prev_f = f_lo;
    double prev_v = value_at(f_lo);
    for (std::size_t k = std::max<std::size_t>(k_lo, 0); k <= k_hi && k < spectrum.density.size(); ++k) {
        const double f = spectrum.f_at(k);
        if (f <= prev_f) {
            prev_v = spectrum.density[k];
            continue;
        }
        acc += 0.5 * (prev_v + spectrum.density[k]) * (f - prev_f);
        prev_f = f;
        prev_v = spectrum.density[k];
    }
    if (f_hi > prev_f)
        acc += 0.5 * (prev_v + value_at(f_hi)) * (f_hi - prev_f);
    return acc;
}

double fwhm_of_curve(const std::vector<double>& x, const std::vector<double>& y)
{
    if (x.size() != y.size() || x.size() < 3)
        throw NumericalError("fwhm_of_curve: need at least 3 samples");
    const std::size_t peak =
        static_cast<std::size_t>(std::max_element(y.begin(), y.end()) - y.begin());
    const double half = 0.5 * y[peak];
    if (peak == 0 || peak + 1 == y.size())
        throw NumericalError("fwhm_of_curve: peak not interior to the record");

    double left = x.front();
    bool found_left = false;
    for (std::size_t i = peak; i-- > 0;) {
        if (y[i] <= half) {
            const double frac = (half - y[i]) / (y[i + 1] - y[i]);
            left = x[i] + frac * (x[i + 1] - x[i]);
            found_left = true;
            break;
        }
    }
    double right = x.back();
    bool found_right = false;
    for (std::size_t i = peak + 1; i < y.size(); ++i) {
        if (y[i] <= half) {
            const double frac = (y[i - 1] - half) / (y[i - 1] - y[i]);
            right = x[i - 1] + frac * (x[i] - x[i - 1]);
            found_right = true;
            break;
        }
    }
    if (!found_left || !found_right)
        throw NumericalError("fwhm_of_curve: half-maximum not bracketed by the record");
    return right - left;
}

double fwhm_of_spectrum(const PowerSpectrum& spectrum)
{
    std::vector<double> f(spectrum.density.size());
    for (std::size_t k = 0; k < f.size(); ++k)
        f[k] = spectrum.f_at(k);
    return fwhm_of_curve(f, spectrum.density);
}

double mechanical_intensity_probe(const SystemParams& params, const PulseProgram& program,
                                  const Trajectory& trajectory,
                                  double displacement_center_hz,
                                  const SpectrumOptions& opts, double gate_length)
{
    if (!program.probe)
        throw ConfigError("mechanical_intensity_probe: no probe window configured");
    program.validate();
    const double c_probe = cooperativity(program.probe->g_probe, params.mech.gamma_m,
                                         params.mode1.kappa_total);
    if (c_probe > 0.05)
        throw std::domain_error("mechanical_intensity_probe: probe back-action too "
                                "strong (C_probe > 0.05)");

    const Window& pw = program.probe->window;
    const double glen = std::min(gate_length, pw.length());
    const GateWindow gate{pw.start + 0.5 * (pw.length() - glen), glen};

    // Displacement record transduced by the probe, heterodyne-offset to the
    // configured center frequency.
    ComplexSeries record;
    record.t0 = trajectory.t0;
    record.dt = trajectory.dt;
    record.samples.resize(trajectory.size());
    const double w0 = two_pi * displacement_center_hz;
    for (std::size_t i = 0; i < trajectory.size(); ++i) {
        const double t = trajectory.time_at(i) - gate.start;
        record.samples[i] =
            trajectory.samples[i].beta * Complex(std::cos(w0 * t), std::sin(w0 * t));
    }
    const PowerSpectrum spec = gated_power_spectrum(record, gate, opts);
    return integrated_power(spec, spec.f0, spec.f0 + spec.span());
}

void write_spectrum_csv(const PowerSpectrum& spectrum, std::ostream& out)
{
    out << "f_hz,density_w_per_hz\n";
    char line[96];
    for (std::size_t k = 0; k < spectrum.density.size(); ++k) {
        std::snprintf(line, sizeof line, "%.12g,%.12g\n", spectrum.f_at(k),
                      spectrum.density[k]);
        out << line;
    }
}

} // namespace omx
