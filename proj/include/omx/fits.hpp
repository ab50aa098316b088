#pragma once

#include "omx/detection.hpp"

#include <functional>
#include <vector>

namespace omx {

// Residual vector r(p); squared norm |r|^2 is minimized.
using ResidualFn = std::function<void(const std::vector<double>&, std::vector<double>&)>;

struct LevMarOptions {
    int max_iterations = 200;
    double relative_step_tol = 1e-10;
    double initial_lambda = 1e-3;
};

struct LevMarResult {
    std::vector<double> params;
    double residual_norm = 0.0;         // |r| at the solution
    std::vector<double> covariance;     // row-major p x p, sigma^2 (J^T J)^-1
    int iterations = 0;
    bool converged = false;
};

// Levenberg-Marquardt with a centrally differenced Jacobian. Throws FitError
// (carrying the best iterate) when max_iterations is exhausted without the
// step tolerance being met.
LevMarResult levenberg_marquardt(const ResidualFn& fn, std::size_t n_residuals,
                                 std::vector<double> initial,
                                 const LevMarOptions& opts = {});

struct LorentzianFit {
    double center = 0.0;        // Hz
    double fwhm = 0.0;          // Hz
    double area = 0.0;          // integrated power
    double offset = 0.0;        // power/Hz baseline
    double residual_norm = 0.0;
};

// offset + (area/pi) * (fwhm/2) / ((f-center)^2 + (fwhm/2)^2)
double lorentzian_value(const LorentzianFit& p, double f_hz);

// Least-squares Lorentzian fit; initial guesses derived from the spectrum
// (argmax, half-max scan, integrated power) when not supplied.
LorentzianFit fit_lorentzian(const PowerSpectrum& spectrum,
                             const LorentzianFit* initial_guess = nullptr);

struct ExponentialFit {
    double amplitude = 0.0;
    double lifetime = 0.0;      // s
    double residual_norm = 0.0;
};

// Least-squares fit of A*exp(-t/tau) to (t, intensity) points.
ExponentialFit fit_exponential(const std::vector<double>& t,
                               const std::vector<double>& intensity);

} // namespace omx
