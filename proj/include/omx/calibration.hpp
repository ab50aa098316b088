#pragma once

#include "omx/fits.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace omx {

enum class Quantity { mech_intensity, efficiency, output_power };

struct MeasurementRow {
    double p1_mw = 0.0;
    double p2_mw = 0.0;
    Quantity quantity = Quantity::mech_intensity;
    double value = 0.0;
    std::optional<double> sigma;
};

struct CalibrationResult {
    double k1 = 0.0;            // 1/mW
    double k2 = 0.0;            // 1/mW
    double eta_product = 0.0;   // 0 until fit_eta has run
    double scale = 0.0;         // nuisance amplitude of the intensity data
    double residual_norm = 0.0;
    std::vector<double> covariance;  // 3x3 row-major over (k1, k2, scale)
};

// CSV schema (header mandatory): p1_mw,p2_mw,quantity,value,sigma
std::vector<MeasurementRow> load_measurements(std::istream& in);
std::vector<MeasurementRow> load_measurements_file(const std::string& path);

// Fits (k1, k2, scale) so that scale * C1/(1+C1+C2)^2 with C_i = k_i P_i
// matches the mech_intensity rows. Requires a P1 sweep at P2 = 0 and a P2
// sweep at fixed P1, at least 4 points each. Levenberg-Marquardt from a 3x3
// log-spaced multi-start grid; deterministic tie-breaking.
CalibrationResult fit_proportionality(const std::vector<MeasurementRow>& data);

// One-parameter scaling of the conversion-efficiency law against efficiency
// rows, with (k1, k2) fixed by a previous fit.
double fit_eta(const std::vector<MeasurementRow>& data, const CalibrationResult& cal);

// chi(k1 p1, k2 p2) for each p1 in the grid, at fixed p2.
std::vector<std::pair<double, double>> predict_efficiency_curve(
    const CalibrationResult& cal, const std::vector<double>& p1_grid_mw, double p2_mw);

std::string quantity_name(Quantity q);

// key=value calibration report plus the covariance matrix as CSV.
void write_calibration_report(const CalibrationResult& cal, std::ostream& out);
void write_covariance_csv(const CalibrationResult& cal, std::ostream& out);

} // namespace omx
