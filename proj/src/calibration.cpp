#include "omx/calibration.hpp"

#include "omx/errors.hpp"
#include "omx/model.hpp"
#include "omx/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

namespace omx {

namespace {

std::vector<std::string> split_fields(const std::string& line)
{
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

double parse_double(const std::string& s, int line_no, const char* column)
{
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0')
        throw ConfigError("measurements line " + std::to_string(line_no) + ", column " +
                          column + ": not a number: '" + s + "'");
    return v;
}

// Model behind fit_proportionality: scale * C1 / (1 + C1 + C2)^2. The
// eta1*4*flux/gamma_m prefactor of the closed-form intensity is absorbed
// into the nuisance scale.
double intensity_model(double k1, double k2, double scale, double p1, double p2)
{
    const double c1 = k1 * p1;
    const double c2 = k2 * p2;
    const double denom = 1.0 + c1 + c2;
    return scale * c1 / (denom * denom);
}

} // namespace

std::string quantity_name(Quantity q)
{
    switch (q) {
    case Quantity::mech_intensity: return "mech_intensity";
    case Quantity::efficiency: return "efficiency";
    case Quantity::output_power: return "output_power";
    }
    return "?";
}

std::vector<MeasurementRow> load_measurements(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line))
        throw ConfigError("measurements: empty input, header line required");
    if (!line.empty() && line.back() == '\r')
        line.pop_back();
    if (line != "p1_mw,p2_mw,quantity,value,sigma")
        throw ConfigError("measurements line 1: expected header "
                          "'p1_mw,p2_mw,quantity,value,sigma', got '" + line + "'");

    std::vector<MeasurementRow> rows;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r")
            continue;
        const std::vector<std::string> f = split_fields(line);
        if (f.size() != 5)
            throw ConfigError("measurements line " + std::to_string(line_no) +
                              ": expected 5 columns, got " + std::to_string(f.size()));
        MeasurementRow row;
        row.p1_mw = parse_double(f[0], line_no, "p1_mw");
        row.p2_mw = parse_double(f[1], line_no, "p2_mw");
        if (row.p1_mw < 0.0 || row.p2_mw < 0.0)
            throw ConfigError("measurements line " + std::to_string(line_no) +
                              ": negative power");
        if (f[2] == "mech_intensity")
            row.quantity = Quantity::mech_intensity;
        else if (f[2] == "efficiency")
            row.quantity = Quantity::efficiency;
        else if (f[2] == "output_power")
            row.quantity = Quantity::output_power;
        else
            throw ConfigError("measurements line " + std::to_string(line_no) +
                              ": unknown quantity '" + f[2] + "'");
        row.value = parse_double(f[3], line_no, "value");
        if (!std::isfinite(row.value))
            throw ConfigError("measurements line " + std::to_string(line_no) +
                              ": non-finite value");
        if (!f[4].empty()) {
            const double s = parse_double(f[4], line_no, "sigma");
            if (!(s > 0.0))
                throw ConfigError("measurements line " + std::to_string(line_no) +
                                  ": sigma must be > 0 when present");
            row.sigma = s;
        }
        rows.push_back(row);
    }
    return rows;
}

std::vector<MeasurementRow> load_measurements_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open measurements file: " + path);
    return load_measurements(in);
}

CalibrationResult fit_proportionality(const std::vector<MeasurementRow>& data)
{
    std::vector<MeasurementRow> rows;
    for (const MeasurementRow& r : data)
        if (r.quantity == Quantity::mech_intensity)
            rows.push_back(r);

    std::size_t p1_sweep = 0;
    std::map<double, std::size_t> p1_of_p2_sweep;
    for (const MeasurementRow& r : rows) {
        if (r.p2_mw == 0.0)
            ++p1_sweep;
        else
            ++p1_of_p2_sweep[r.p1_mw];
    }
    std::size_t p2_sweep = 0;
    for (const auto& [p1, count] : p1_of_p2_sweep)
        p2_sweep = std::max(p2_sweep, count);
    if (p1_sweep < 4 || p2_sweep < 4)
        throw ConfigError("fit_proportionality: need a P1 sweep at P2=0 and a P2 sweep "
                          "at fixed P1, at least 4 points each");

    const std::size_t n = rows.size();
    std::vector<double> weights(n, 1.0);
    for (std::size_t i = 0; i < n; ++i)
        if (rows[i].sigma)
            weights[i] = 1.0 / *rows[i].sigma;

    double data_scale = 0.0;
    for (const MeasurementRow& r : rows)
        data_scale = std::max(data_scale, std::abs(r.value));
    if (data_scale == 0.0)
        throw ConfigError("fit_proportionality: all intensities are zero");

    // Log-space parameters keep k1, k2, scale positive.
    auto residuals = [&](const std::vector<double>& p, std::vector<double>& r) {
        const double k1 = std::exp(p[0]);
        const double k2 = std::exp(p[1]);
        const double scale = std::exp(p[2]);
        for (std::size_t i = 0; i < n; ++i)
            r[i] = weights[i] * (intensity_model(k1, k2, scale, rows[i].p1_mw,
                                                 rows[i].p2_mw) -
                                 rows[i].value);
    };

    const double k_grid[3] = {0.02, 0.2, 2.0};
    struct Start {
        double k1, k2;
    };
    std::vector<Start> starts;
    for (double a : k_grid)
        for (double b : k_grid)
            starts.push_back({a, b});

    std::vector<std::optional<LevMarResult>> fits(starts.size());
    parallel_for_indexed(starts.size(), [&](std::size_t i) {
        std::vector<double> p0 = {std::log(starts[i].k1), std::log(starts[i].k2),
                                  std::log(4.0 * data_scale)};
        try {
            fits[i] = levenberg_marquardt(residuals, n, p0);
        } catch (const FitError&) {
            fits[i] = std::nullopt;
        }
    });

    // Lowest residual wins; ties broken by smallest k1 then k2.
    const LevMarResult* best = nullptr;
    for (const auto& f : fits) {
        if (!f)
            continue;
        if (!best || f->residual_norm < best->residual_norm * (1.0 - 1e-12)) {
            best = &*f;
        } else if (std::abs(f->residual_norm - best->residual_norm) <=
                   1e-12 * best->residual_norm) {
            if (f->params[0] < best->params[0] ||
                (f->params[0] == best->params[0] && f->params[1] < best->params[1]))
                best = &*f;
        }
    }
    if (!best)
        throw FitError("fit_proportionality: no start converged");

    CalibrationResult out;
    out.k1 = std::exp(best->params[0]);
    out.k2 = std::exp(best->params[1]);
    out.scale = std::exp(best->params[2]);
    out.residual_norm = best->residual_norm;
    // Propagate the log-space covariance to (k1, k2, scale).
    out.covariance.assign(9, 0.0);
    const double v[3] = {out.k1, out.k2, out.scale};
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            out.covariance[a * 3 + b] = best->covariance[a * 3 + b] * v[a] * v[b];
    return out;
}

double fit_eta(const std::vector<MeasurementRow>& data, const CalibrationResult& cal)
{
    if (!(cal.k1 > 0.0) || !(cal.k2 > 0.0))
        throw ConfigError("fit_eta: calibration constants not set");
    double num = 0.0, den = 0.0;
    std::size_t n_rows = 0;
    bool any_nonzero = false;
    for (const MeasurementRow& r : data) {
        if (r.quantity != Quantity::efficiency)
            continue;
        ++n_rows;
        if (r.value != 0.0)
            any_nonzero = true;
        const double c1 = cal.k1 * r.p1_mw;
        const double c2 = cal.k2 * r.p2_mw;
        const double denom = 1.0 + c1 + c2;
        const double shape = 4.0 * c1 * c2 / (denom * denom);
        const double w = r.sigma ? 1.0 / (*r.sigma * *r.sigma) : 1.0;
        num += w * shape * r.value;
        den += w * shape * shape;
    }
    if (n_rows == 0)
        throw ConfigError("fit_eta: no efficiency rows in the dataset");
    if (!any_nonzero || den == 0.0)
        throw FitError("fit_eta: efficiency data carry no signal");
    return num / den;
}

std::vector<std::pair<double, double>> predict_efficiency_curve(
    const CalibrationResult& cal, const std::vector<double>& p1_grid_mw, double p2_mw)
{
    if (!(cal.k1 > 0.0) || !(cal.k2 > 0.0))
        throw ConfigError("predict_efficiency_curve: calibration constants not set");
    const double eta = cal.eta_product;
    std::vector<std::pair<double, double>> out;
    out.reserve(p1_grid_mw.size());
    for (double p1 : p1_grid_mw) {
        const double c1 = cal.k1 * p1;
        const double c2 = cal.k2 * p2_mw;
        const double denom = 1.0 + c1 + c2;
        out.emplace_back(p1, eta * 4.0 * c1 * c2 / (denom * denom));
    }
    return out;
}

void write_calibration_report(const CalibrationResult& cal, std::ostream& out)
{
    char buf[64];
    auto put = [&](const char* key, double v) {
        std::snprintf(buf, sizeof buf, "%.12g", v);
        out << key << " = " << buf << "\n";
    };
    put("k1_per_mw", cal.k1);
    put("k2_per_mw", cal.k2);
    put("eta_product", cal.eta_product);
    put("scale", cal.scale);
    put("residual_norm", cal.residual_norm);
}

void write_covariance_csv(const CalibrationResult& cal, std::ostream& out)
{
    out << "param,k1_per_mw,k2_per_mw,scale\n";
    const char* names[3] = {"k1_per_mw", "k2_per_mw", "scale"};
    char buf[64];
    for (int a = 0; a < 3; ++a) {
        out << names[a];
        for (int b = 0; b < 3; ++b) {
            const double v = cal.covariance.size() == 9 ? cal.covariance[a * 3 + b] : 0.0;
            std::snprintf(buf, sizeof buf, ",%.12g", v);
            out << buf;
        }
        out << "\n";
    }
}

} // namespace omx
