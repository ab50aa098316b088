#include "omx/fits.hpp"

#include "omx/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace omx {

namespace {

// Solves the symmetric positive-definite system A x = b in place (Cholesky).
// Returns false when A is not positive definite.
bool solve_spd(std::vector<double>& a, std::vector<double>& b, std::size_t n)
{
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double sum = a[i * n + j];
            for (std::size_t k = 0; k < j; ++k)
                sum -= a[i * n + k] * a[j * n + k];
            if (i == j) {
                if (sum <= 0.0)
                    return false;
                a[i * n + i] = std::sqrt(sum);
            } else {
                a[i * n + j] = sum / a[j * n + j];
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        double sum = b[i];
        for (std::size_t k = 0; k < i; ++k)
            sum -= a[i * n + k] * b[k];
        b[i] = sum / a[i * n + i];
    }
    for (std::size_t i = n; i-- > 0;) {
        double sum = b[i];
        for (std::size_t k = i + 1; k < n; ++k)
            sum -= a[k * n + i] * b[k];
        b[i] = sum / a[i * n + i];
    }
    return true;
}

// Inverse of an SPD matrix via Gauss-Jordan; used only for the covariance.
std::vector<double> invert_spd(std::vector<double> a, std::size_t n)
{
    std::vector<double> inv(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        inv[i * n + i] = 1.0;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r * n + col]) > std::abs(a[pivot * n + col]))
                pivot = r;
        if (a[pivot * n + col] == 0.0)
            return std::vector<double>(n * n, std::numeric_limits<double>::quiet_NaN());
        if (pivot != col)
            for (std::size_t c = 0; c < n; ++c) {
                std::swap(a[pivot * n + c], a[col * n + c]);
                std::swap(inv[pivot * n + c], inv[col * n + c]);
            }
        const double d = a[col * n + col];
        for (std::size_t c = 0; c < n; ++c) {
            a[col * n + c] /= d;
            inv[col * n + c] /= d;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col)
                continue;
            const double f = a[r * n + col];
            if (f == 0.0)
                continue;
            for (std::size_t c = 0; c < n; ++c) {
                a[r * n + c] -= f * a[col * n + c];
                inv[r * n + c] -= f * inv[col * n + c];
            }
        }
    }
    return inv;
}

double norm(const std::vector<double>& v)
{
    double s = 0.0;
    for (double x : v)
        s += x * x;
    return std::sqrt(s);
}

} // namespace

LevMarResult levenberg_marquardt(const ResidualFn& fn, std::size_t n_residuals,
                                 std::vector<double> initial, const LevMarOptions& opts)
{
    const std::size_t np = initial.size();
    std::vector<double> p = std::move(initial);
    std::vector<double> r(n_residuals), r_trial(n_residuals);
    fn(p, r);
    double cost = norm(r);

    std::vector<double> jac(n_residuals * np);
    std::vector<double> rp(n_residuals), rm(n_residuals);
    double lambda = opts.initial_lambda;
    int iter = 0;
    bool converged = false;

    for (; iter < opts.max_iterations; ++iter) {
        // Central-difference Jacobian.
        for (std::size_t j = 0; j < np; ++j) {
            const double h = 1e-7 * std::max(1.0, std::abs(p[j]));
            std::vector<double> pj = p;
            pj[j] = p[j] + h;
            fn(pj, rp);
            pj[j] = p[j] - h;
            fn(pj, rm);
            for (std::size_t i = 0; i < n_residuals; ++i)
                jac[i * np + j] = (rp[i] - rm[i]) / (2.0 * h);
        }

        std::vector<double> jtj(np * np, 0.0), jtr(np, 0.0);
        for (std::size_t i = 0; i < n_residuals; ++i) {
            for (std::size_t a = 0; a < np; ++a) {
                jtr[a] += jac[i * np + a] * r[i];
                for (std::size_t b = 0; b <= a; ++b)
                    jtj[a * np + b] += jac[i * np + a] * jac[i * np + b];
            }
        }
        for (std::size_t a = 0; a < np; ++a)
            for (std::size_t b = a + 1; b < np; ++b)
                jtj[a * np + b] = jtj[b * np + a];

        bool stepped = false;
        for (int attempt = 0; attempt < 32; ++attempt) {
            std::vector<double> lhs = jtj;
            for (std::size_t a = 0; a < np; ++a)
                lhs[a * np + a] += lambda * std::max(jtj[a * np + a], 1e-300);
            std::vector<double> step(np);
            for (std::size_t a = 0; a < np; ++a)
                step[a] = -jtr[a];
            if (!solve_spd(lhs, step, np)) {
                lambda *= 10.0;
                continue;
            }
            std::vector<double> trial = p;
            for (std::size_t a = 0; a < np; ++a)
                trial[a] += step[a];
            fn(trial, r_trial);
            const double trial_cost = norm(r_trial);
            if (trial_cost <= cost) {
                double rel_step = 0.0;
                for (std::size_t a = 0; a < np; ++a)
                    rel_step = std::max(rel_step, std::abs(step[a]) /
                                                      std::max(1.0, std::abs(trial[a])));
                p = std::move(trial);
                r = r_trial;
                cost = trial_cost;
                lambda = std::max(lambda * 0.3, 1e-12);
                stepped = true;
                if (rel_step < opts.relative_step_tol)
                    converged = true;
                break;
            }
            lambda *= 10.0;
        }
        if (converged || !stepped) {
            converged = converged || !stepped;  // stall on a local minimum counts
            ++iter;
            break;
        }
    }

    if (!converged)
        throw FitError("levenberg_marquardt: no convergence within iteration budget", p,
                       cost);

    LevMarResult out;
    out.params = p;
    out.residual_norm = cost;
    out.iterations = iter;
    out.converged = true;

    // Covariance estimate sigma^2 (J^T J)^-1 with sigma^2 = |r|^2 / (n - p).
    std::vector<double> jtj(np * np, 0.0);
    for (std::size_t j = 0; j < np; ++j) {
        const double h = 1e-7 * std::max(1.0, std::abs(p[j]));
        std::vector<double> pj = p;
        pj[j] = p[j] + h;
        fn(pj, rp);
        pj[j] = p[j] - h;
        fn(pj, rm);
        for (std::size_t i = 0; i < n_residuals; ++i)
            jac[i * np + j] = (rp[i] - rm[i]) / (2.0 * h);
    }
    for (std::size_t i = 0; i < n_residuals; ++i)
        for (std::size_t a = 0; a < np; ++a)
            for (std::size_t b = 0; b < np; ++b)
                jtj[a * np + b] += jac[i * np + a] * jac[i * np + b];
    const double dof = static_cast<double>(
        n_residuals > np ? n_residuals - np : 1);
    const double sigma2 = cost * cost / dof;
    out.covariance = invert_spd(std::move(jtj), np);
    for (double& v : out.covariance)
        v *= sigma2;
    return out;
}

double lorentzian_value(const LorentzianFit& p, double f_hz)
{
    const double hw = 0.5 * p.fwhm;
    const double d = f_hz - p.center;
    return p.offset + (p.area / 3.14159265358979323846) * hw / (d * d + hw * hw);
}

LorentzianFit fit_lorentzian(const PowerSpectrum& spectrum,
                             const LorentzianFit* initial_guess)
{
    const std::size_t n = spectrum.density.size();
    if (n < 5)
        throw FitError("fit_lorentzian: spectrum too short");

    LorentzianFit init;
    if (initial_guess) {
        init = *initial_guess;
    } else {
        const std::size_t peak = static_cast<std::size_t>(
            std::max_element(spectrum.density.begin(), spectrum.density.end()) -
            spectrum.density.begin());
        const double peak_v = spectrum.density[peak];
        const double floor_v =
            *std::min_element(spectrum.density.begin(), spectrum.density.end());
        if (!(peak_v > floor_v * (1.0 + 1e-9)) || peak_v <= 0.0)
            throw FitError("fit_lorentzian: no dominant peak in the spectrum");
        init.center = spectrum.f_at(peak);
        init.offset = floor_v;
        double width;
        try {
            width = fwhm_of_spectrum(spectrum);
        } catch (const NumericalError&) {
            throw FitError("fit_lorentzian: no dominant peak in the spectrum");
        }
        init.fwhm = width;
        init.area = (peak_v - floor_v) * 3.14159265358979323846 * 0.5 * width;
    }

    std::vector<double> f(n);
    for (std::size_t i = 0; i < n; ++i)
        f[i] = spectrum.f_at(i);

    // Parametrize fwhm and area through their logs to keep them positive.
    const double area_floor = std::max(init.area, 1e-300);
    auto residuals = [&](const std::vector<double>& p, std::vector<double>& r) {
        LorentzianFit cur;
        cur.center = p[0];
        cur.fwhm = std::exp(p[1]);
        cur.area = std::exp(p[2]);
        cur.offset = p[3];
        for (std::size_t i = 0; i < n; ++i)
            r[i] = lorentzian_value(cur, f[i]) - spectrum.density[i];
    };
    std::vector<double> p0 = {init.center, std::log(std::max(init.fwhm, 1e-300)),
                              std::log(area_floor), init.offset};
    LevMarResult res;
    try {
        res = levenberg_marquardt(residuals, n, p0);
    } catch (const FitError& e) {
        throw FitError(std::string("fit_lorentzian: ") + e.what(), e.best_params,
                       e.residual_norm);
    }
    LorentzianFit out;
    out.center = res.params[0];
    out.fwhm = std::exp(res.params[1]);
    out.area = std::exp(res.params[2]);
    out.offset = res.params[3];
    out.residual_norm = res.residual_norm;
    return out;
}

ExponentialFit fit_exponential(const std::vector<double>& t,
                               const std::vector<double>& intensity)
{
    if (t.size() != intensity.size() || t.size() < 2)
        throw FitError("fit_exponential: need at least two (t, intensity) points");
    for (double v : intensity)
        if (!(v > 0.0))
            throw FitError("fit_exponential: intensities must be positive");

    // Log-linear regression for the starting point.
    const std::size_t n = t.size();
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double y = std::log(intensity[i]);
        sx += t[i];
        sy += y;
        sxx += t[i] * t[i];
        sxy += t[i] * y;
    }
    const double denom = static_cast<double>(n) * sxx - sx * sx;
    if (denom == 0.0)
        throw FitError("fit_exponential: degenerate time axis");
    const double slope = (static_cast<double>(n) * sxy - sx * sy) / denom;
    const double icept = (sy - slope * sx) / static_cast<double>(n);
    if (!(slope < 0.0))
        throw FitError("fit_exponential: intensities do not decay");

    auto residuals = [&](const std::vector<double>& p, std::vector<double>& r) {
        const double amp = std::exp(p[0]);
        const double rate = std::exp(p[1]);
        for (std::size_t i = 0; i < n; ++i)
            r[i] = amp * std::exp(-rate * t[i]) - intensity[i];
    };
    std::vector<double> p0 = {icept, std::log(-slope)};
    LevMarResult res;
    try {
        res = levenberg_marquardt(residuals, n, p0);
    } catch (const FitError& e) {
        throw FitError(std::string("fit_exponential: ") + e.what(), e.best_params,
                       e.residual_norm);
    }
    ExponentialFit out;
    out.amplitude = std::exp(res.params[0]);
    out.lifetime = 1.0 / std::exp(res.params[1]);
    out.residual_norm = res.residual_norm;
    return out;
}

} // namespace omx
