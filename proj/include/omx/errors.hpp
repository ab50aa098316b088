#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace omx {

// Invalid configuration or malformed input files. CLI exit code 2.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Integration blow-ups, step-size violations, singular systems. CLI exit code 3.
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

// Non-convergent or degenerate fits. Carries the best iterate found. CLI exit code 4.
struct FitError : std::runtime_error {
    FitError(const std::string& msg, std::vector<double> best, double residual)
        : std::runtime_error(msg), best_params(std::move(best)), residual_norm(residual) {}
    explicit FitError(const std::string& msg) : std::runtime_error(msg), residual_norm(0.0) {}

    std::vector<double> best_params;
    double residual_norm;
};

} // namespace omx
