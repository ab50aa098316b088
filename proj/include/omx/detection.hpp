#pragma once

#include "omx/params.hpp"
#include "omx/pulse.hpp"
#include "omx/series.hpp"

#include <cstddef>
#include <iosfwd>
#include <vector>

namespace omx {

struct GateWindow {
    double start = 0.0;   // s, relative to the trace origin
    double length = 0.0;  // s
};

// One-sided-free power density record: density[k] at f0 + k*df, power per Hz.
struct PowerSpectrum {
    double f0 = 0.0;
    double df = 0.0;
    std::vector<double> density;

    double f_at(std::size_t k) const { return f0 + df * static_cast<double>(k); }
    double span() const
    {
        return density.empty() ? 0.0 : df * static_cast<double>(density.size() - 1);
    }
};

enum class SpectrumWindow { rectangular, hann };

struct SpectrumOptions {
    std::size_t zero_pad_factor = 8;   // >= 1; grid refinement only
    SpectrumWindow window = SpectrumWindow::rectangular;
    double rbw_hz = 0.0;               // Gaussian resolution-bandwidth emulation, 0 = off
    double scale = 1.0;                // detector calibration constant
};

// Periodogram of the gated segment. Normalized so that
// sum(density)*df == mean |x|^2 within the gate (rectangular window).
PowerSpectrum gated_power_spectrum(const ComplexSeries& trace, const GateWindow& gate,
                                   const SpectrumOptions& opts = {});

// Slow direct-DFT evaluation of the same quantity, kept as the reference
// implementation for tests and the benchmark.
PowerSpectrum gated_power_spectrum_direct(const ComplexSeries& trace,
                                          const GateWindow& gate,
                                          const SpectrumOptions& opts = {});

// Trapezoidal integral of the density over [f_lo, f_hi].
double integrated_power(const PowerSpectrum& spectrum, double f_lo, double f_hi);

// Full-width at half maximum around the global peak, half-max crossings
// linearly interpolated. Works on any sampled curve.
double fwhm_of_curve(const std::vector<double>& x, const std::vector<double>& y);
double fwhm_of_spectrum(const PowerSpectrum& spectrum);

// Mechanical intensity read out by the weak gated probe: the gated segment of
// the probe-transduced displacement record is turned into a power spectrum and
// spectrally integrated. Proportional to |beta|^2 averaged over the gate.
double mechanical_intensity_probe(const SystemParams& params, const PulseProgram& program,
                                  const Trajectory& trajectory,
                                  double displacement_center_hz,
                                  const SpectrumOptions& opts = {},
                                  double gate_length = 1e-6);

// Spectrum export CSV: f_hz,density_w_per_hz
void write_spectrum_csv(const PowerSpectrum& spectrum, std::ostream& out);

// In-place FFT, size must be a power of two. Exposed for the benchmark.
void fft_radix2(std::vector<Complex>& data, bool inverse);

} // namespace omx
