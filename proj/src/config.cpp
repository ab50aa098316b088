#include "omx/config.hpp"

#include "omx/errors.hpp"
#include "omx/model.hpp"
#include "omx/units.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

namespace omx {

namespace {

std::string format_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string format_list(const std::vector<double>& v)
{
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i)
            out += ",";
        out += format_double(v[i]);
    }
    return out;
}

double parse_double_value(const std::string& key, const std::string& s)
{
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0')
        throw ConfigError(key + ": not a number: '" + s + "'");
    return v;
}

std::vector<double> parse_list_value(const std::string& key, const std::string& s)
{
    std::vector<double> out;
    std::string cur;
    std::istringstream iss(s);
    while (std::getline(iss, cur, ','))
        out.push_back(parse_double_value(key, cur));
    if (out.empty())
        throw ConfigError(key + ": empty list");
    return out;
}

struct Field {
    const char* key;
    std::function<std::string(const RunConfig&)> get;
    std::function<void(RunConfig&, const std::string&)> set;
};

#define OMX_DOUBLE_FIELD(key, member)                                                   \
    Field{key, [](const RunConfig& c) { return format_double(c.member); },              \
          [](RunConfig& c, const std::string& s) {                                      \
              c.member = parse_double_value(key, s);                                    \
          }}
#define OMX_INT_FIELD(key, member)                                                      \
    Field{key, [](const RunConfig& c) { return std::to_string(c.member); },             \
          [](RunConfig& c, const std::string& s) {                                      \
              c.member = static_cast<int>(parse_double_value(key, s));                  \
          }}
#define OMX_BOOL_FIELD(key, member)                                                     \
    Field{key, [](const RunConfig& c) { return c.member ? "true" : "false"; },          \
          [](RunConfig& c, const std::string& s) {                                      \
              if (s == "true")                                                          \
                  c.member = true;                                                      \
              else if (s == "false")                                                    \
                  c.member = false;                                                     \
              else                                                                      \
                  throw ConfigError(std::string(key) + ": expected true or false");     \
          }}
#define OMX_STRING_FIELD(key, member)                                                   \
    Field{key, [](const RunConfig& c) { return c.member; },                             \
          [](RunConfig& c, const std::string& s) { c.member = s; }}
#define OMX_LIST_FIELD(key, member)                                                     \
    Field{key, [](const RunConfig& c) { return format_list(c.member); },                \
          [](RunConfig& c, const std::string& s) {                                      \
              c.member = parse_list_value(key, s);                                      \
          }}

const std::vector<Field>& registry()
{
    static const std::vector<Field> fields = {
        OMX_DOUBLE_FIELD("system.kappa1_hz", kappa1_hz),
        OMX_DOUBLE_FIELD("system.kappa1_ext_hz", kappa1_ext_hz),
        OMX_DOUBLE_FIELD("system.kappa2_hz", kappa2_hz),
        OMX_DOUBLE_FIELD("system.kappa2_ext_hz", kappa2_ext_hz),
        OMX_DOUBLE_FIELD("system.omega_m_hz", omega_m_hz),
        OMX_DOUBLE_FIELD("system.gamma_m_hz", gamma_m_hz),
        OMX_DOUBLE_FIELD("system.delta1_hz", delta1_hz),
        OMX_DOUBLE_FIELD("system.delta2_hz", delta2_hz),
        OMX_DOUBLE_FIELD("system.lambda1_nm", lambda1_nm),
        OMX_DOUBLE_FIELD("system.lambda2_nm", lambda2_nm),
        OMX_DOUBLE_FIELD("calibration.k1_per_mw", k1_per_mw),
        OMX_DOUBLE_FIELD("calibration.k2_per_mw", k2_per_mw),
        OMX_DOUBLE_FIELD("drive.p1_mw", p1_mw),
        OMX_DOUBLE_FIELD("drive.p2_mw", p2_mw),
        OMX_DOUBLE_FIELD("drive.pin_mw", pin_mw),
        OMX_DOUBLE_FIELD("pulse.duration_us", pulse_duration_us),
        OMX_STRING_FIELD("pulse.shape", pulse_shape),
        OMX_DOUBLE_FIELD("pulse.rise_time_ns", rise_time_ns),
        OMX_DOUBLE_FIELD("pulse.signal_detuning_hz", signal_detuning_hz),
        OMX_DOUBLE_FIELD("pulse.repetition_period_us", repetition_period_us),
        OMX_DOUBLE_FIELD("probe.delay_us", probe_delay_us),
        OMX_DOUBLE_FIELD("probe.duration_us", probe_duration_us),
        OMX_DOUBLE_FIELD("probe.gate_length_us", probe_gate_length_us),
        OMX_DOUBLE_FIELD("probe.cooperativity", probe_cooperativity),
        OMX_DOUBLE_FIELD("probe.drive_duration_us", probe_drive_duration_us),
        OMX_DOUBLE_FIELD("detection.gate_start_us", gate_start_us),
        OMX_DOUBLE_FIELD("detection.gate_length_us", gate_length_us),
        OMX_INT_FIELD("detection.zero_pad_factor", zero_pad_factor),
        OMX_STRING_FIELD("detection.window", spectrum_window),
        OMX_DOUBLE_FIELD("detection.rbw_hz", rbw_hz),
        OMX_DOUBLE_FIELD("detection.heterodyne_offset_hz", heterodyne_offset_hz),
        OMX_DOUBLE_FIELD("detection.calibration_scale", calibration_scale),
        OMX_STRING_FIELD("sweep.variable", sweep_variable),
        OMX_DOUBLE_FIELD("sweep.start", sweep_start),
        OMX_DOUBLE_FIELD("sweep.stop", sweep_stop),
        OMX_INT_FIELD("sweep.points", sweep_points),
        OMX_STRING_FIELD("sweep.scale", sweep_scale),
        OMX_LIST_FIELD("efficiency.p2_mw", efficiency_p2_mw),
        OMX_LIST_FIELD("efficiency.eta_products", efficiency_eta_products),
        OMX_LIST_FIELD("transient.durations_us", transient_durations_us),
        OMX_DOUBLE_FIELD("transient.gate_length_us", transient_gate_length_us),
        OMX_DOUBLE_FIELD("transient.gate_step_us", transient_gate_step_us),
        OMX_BOOL_FIELD("transient.dump_trajectory", transient_dump_trajectory),
        OMX_LIST_FIELD("spectral.durations_us", spectral_durations_us),
        OMX_DOUBLE_FIELD("ringdown.beta0", ringdown_beta0),
        OMX_DOUBLE_FIELD("ringdown.record_us", ringdown_record_us),
        OMX_DOUBLE_FIELD("ringdown.delay_step_us", ringdown_delay_step_us),
        OMX_INT_FIELD("ringdown.delay_count", ringdown_delay_count),
        OMX_BOOL_FIELD("thermal.enabled", thermal_enabled),
        OMX_DOUBLE_FIELD("thermal.n_th", thermal_n_th),
        Field{"run.seed",
              [](const RunConfig& c) { return std::to_string(c.seed); },
              [](RunConfig& c, const std::string& s) {
                  char* end = nullptr;
                  c.seed = std::strtoull(s.c_str(), &end, 10);
                  if (end == s.c_str() || *end != '\0')
                      throw ConfigError("run.seed: not an unsigned integer: '" + s + "'");
              }},
        OMX_INT_FIELD("run.threads", threads),
        OMX_DOUBLE_FIELD("run.dt_factor", dt_factor),
        OMX_DOUBLE_FIELD("run.dt_ns", dt_ns),
    };
    return fields;
}

} // namespace

RunConfig parse_config(std::istream& in)
{
    RunConfig cfg;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            if (b == std::string::npos)
                return std::string();
            const auto e = s.find_last_not_of(" \t\r");
            return s.substr(b, e - b + 1);
        };
        const std::string stripped = trim(line);
        if (stripped.empty())
            continue;
        const std::size_t eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": expected 'key = value'");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        bool matched = false;
        for (const Field& f : registry()) {
            if (key == f.key) {
                try {
                    f.set(cfg, value);
                } catch (const ConfigError& e) {
                    throw ConfigError("config line " + std::to_string(line_no) + ": " +
                                      e.what());
                }
                matched = true;
                break;
            }
        }
        if (!matched)
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": unknown key '" + key + "'");
    }
    return cfg;
}

RunConfig parse_config_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file: " + path);
    return parse_config(in);
}

std::string serialize_config(const RunConfig& cfg)
{
    std::string out;
    std::string section;
    for (const Field& f : registry()) {
        const std::string key = f.key;
        const std::string sec = key.substr(0, key.find('.'));
        if (sec != section) {
            if (!out.empty())
                out += "\n";
            section = sec;
        }
        out += key;
        out += " = ";
        out += f.get(cfg);
        out += "\n";
    }
    return out;
}

std::vector<std::string> validate_config(const RunConfig& cfg)
{
    auto require = [](bool ok, const char* key, const char* what) {
        if (!ok)
            throw ConfigError(std::string(key) + ": " + what);
    };
    require(cfg.kappa1_hz > 0.0, "system.kappa1_hz", "must be > 0");
    require(cfg.kappa2_hz > 0.0, "system.kappa2_hz", "must be > 0");
    require(cfg.kappa1_ext_hz >= 0.0 && cfg.kappa1_ext_hz <= cfg.kappa1_hz,
            "system.kappa1_ext_hz", "must lie in [0, system.kappa1_hz]");
    require(cfg.kappa2_ext_hz >= 0.0 && cfg.kappa2_ext_hz <= cfg.kappa2_hz,
            "system.kappa2_ext_hz", "must lie in [0, system.kappa2_hz]");
    require(cfg.omega_m_hz > 0.0, "system.omega_m_hz", "must be > 0");
    require(cfg.gamma_m_hz > 0.0, "system.gamma_m_hz", "must be > 0");
    require(cfg.lambda1_nm > 0.0, "system.lambda1_nm", "must be > 0");
    require(cfg.lambda2_nm > 0.0, "system.lambda2_nm", "must be > 0");
    require(cfg.k1_per_mw > 0.0, "calibration.k1_per_mw", "must be > 0");
    require(cfg.k2_per_mw > 0.0, "calibration.k2_per_mw", "must be > 0");
    require(cfg.p1_mw >= 0.0, "drive.p1_mw", "must be >= 0");
    require(cfg.p2_mw >= 0.0, "drive.p2_mw", "must be >= 0");
    require(cfg.pin_mw >= 0.0, "drive.pin_mw", "must be >= 0");
    require(cfg.pulse_duration_us > 0.0, "pulse.duration_us", "must be > 0");
    require(cfg.pulse_shape == "rectangular" || cfg.pulse_shape == "raised_cosine",
            "pulse.shape", "must be rectangular or raised_cosine");
    require(cfg.rise_time_ns >= 0.0, "pulse.rise_time_ns", "must be >= 0");
    require(cfg.repetition_period_us > 0.0, "pulse.repetition_period_us", "must be > 0");
    require(cfg.probe_delay_us >= 0.0, "probe.delay_us", "must be >= 0");
    require(cfg.probe_duration_us > 0.0, "probe.duration_us", "must be > 0");
    require(cfg.probe_gate_length_us > 0.0, "probe.gate_length_us", "must be > 0");
    require(cfg.probe_cooperativity >= 0.0 && cfg.probe_cooperativity <= 0.05,
            "probe.cooperativity", "must lie in [0, 0.05]");
    require(cfg.probe_drive_duration_us > 0.0, "probe.drive_duration_us", "must be > 0");
    require(cfg.gate_length_us > 0.0, "detection.gate_length_us", "must be > 0");
    require(cfg.zero_pad_factor >= 1, "detection.zero_pad_factor", "must be >= 1");
    require(cfg.spectrum_window == "rectangular" || cfg.spectrum_window == "hann",
            "detection.window", "must be rectangular or hann");
    require(cfg.rbw_hz >= 0.0, "detection.rbw_hz", "must be >= 0");
    require(cfg.calibration_scale > 0.0, "detection.calibration_scale", "must be > 0");
    require(cfg.sweep_variable == "p1" || cfg.sweep_variable == "p2" ||
                cfg.sweep_variable == "delta",
            "sweep.variable", "must be p1, p2 or delta");
    require(cfg.sweep_points >= 2, "sweep.points", "must be >= 2");
    require(cfg.sweep_scale == "linear" || cfg.sweep_scale == "log", "sweep.scale",
            "must be linear or log");
    if (cfg.sweep_scale == "log")
        require(cfg.sweep_start > 0.0 && cfg.sweep_stop > 0.0, "sweep.start",
                "log scale requires positive endpoints");
    require(!cfg.efficiency_p2_mw.empty(), "efficiency.p2_mw", "must not be empty");
    require(cfg.efficiency_eta_products.size() == cfg.efficiency_p2_mw.size(),
            "efficiency.eta_products", "must match efficiency.p2_mw in length");
    for (double e : cfg.efficiency_eta_products)
        require(e >= 0.0 && e <= 1.0, "efficiency.eta_products", "must lie in [0,1]");
    require(!cfg.transient_durations_us.empty(), "transient.durations_us",
            "must not be empty");
    require(cfg.transient_gate_length_us > 0.0, "transient.gate_length_us",
            "must be > 0");
    require(cfg.transient_gate_step_us > 0.0, "transient.gate_step_us", "must be > 0");
    require(!cfg.spectral_durations_us.empty(), "spectral.durations_us",
            "must not be empty");
    require(cfg.ringdown_beta0 >= 0.0, "ringdown.beta0", "must be >= 0");
    require(cfg.ringdown_record_us > 0.0, "ringdown.record_us", "must be > 0");
    require(cfg.ringdown_delay_step_us > 0.0, "ringdown.delay_step_us", "must be > 0");
    require(cfg.ringdown_delay_count >= 3, "ringdown.delay_count", "must be >= 3");
    require(cfg.thermal_n_th >= 0.0, "thermal.n_th", "must be >= 0");
    require(cfg.threads >= 0, "run.threads", "must be >= 0");
    require(cfg.dt_factor > 0.0 && cfg.dt_factor <= 0.1, "run.dt_factor",
            "must lie in (0, 0.1]");
    require(cfg.dt_ns >= 0.0, "run.dt_ns", "must be >= 0");

    std::vector<std::string> warnings;
    if (cfg.omega_m_hz <= cfg.kappa1_hz || cfg.omega_m_hz <= cfg.kappa2_hz)
        warnings.push_back("system: not in the resolved-sideband regime "
                           "(omega_m <= kappa)");
    const double duty = cfg.pulse_duration_us / cfg.repetition_period_us;
    if (duty > 0.05)
        warnings.push_back("pulse: duty cycle above 5%");
    return warnings;
}

SystemParams system_params(const RunConfig& cfg)
{
    return system_params_for_powers(cfg, cfg.p1_mw, cfg.p2_mw);
}

SystemParams system_params_for_powers(const RunConfig& cfg, double p1_mw, double p2_mw)
{
    SystemParams p;
    p.mode1.kappa_total = hz_to_rad(cfg.kappa1_hz);
    p.mode1.kappa_ext = hz_to_rad(cfg.kappa1_ext_hz);
    p.mode1.drive_detuning = hz_to_rad(cfg.delta1_hz);
    p.mode2.kappa_total = hz_to_rad(cfg.kappa2_hz);
    p.mode2.kappa_ext = hz_to_rad(cfg.kappa2_ext_hz);
    p.mode2.drive_detuning = hz_to_rad(cfg.delta2_hz);
    p.mech.omega_m = hz_to_rad(cfg.omega_m_hz);
    p.mech.gamma_m = hz_to_rad(cfg.gamma_m_hz);
    p.coupling.g1 = coupling_from_cooperativity(cfg.k1_per_mw * p1_mw, p.mech.gamma_m,
                                                p.mode1.kappa_total);
    p.coupling.g2 = coupling_from_cooperativity(cfg.k2_per_mw * p2_mw, p.mech.gamma_m,
                                                p.mode2.kappa_total);
    return p;
}

PowerCalibration power_calibration(const RunConfig& cfg)
{
    return PowerCalibration{cfg.k1_per_mw, cfg.k2_per_mw};
}

PulseProgram pulse_program(const RunConfig& cfg, double duration_us, bool with_probe)
{
    PulseProgram prog =
        PulseProgram::synchronized(duration_us * 1e-6, hz_to_rad(cfg.signal_detuning_hz));
    prog.shape = cfg.pulse_shape == "raised_cosine" ? EnvelopeShape::raised_cosine
                                                    : EnvelopeShape::rectangular;
    prog.rise_time = cfg.rise_time_ns * 1e-9;
    prog.repetition_period = std::max(cfg.repetition_period_us * 1e-6,
                                      2.0 * duration_us * 1e-6 +
                                          (cfg.probe_delay_us + cfg.probe_duration_us) * 1e-6);
    if (with_probe) {
        const double start = (duration_us + cfg.probe_delay_us) * 1e-6;
        ProbeWindow probe;
        probe.window = {start, start + cfg.probe_duration_us * 1e-6};
        const double gamma_m = hz_to_rad(cfg.gamma_m_hz);
        const double kappa1 = hz_to_rad(cfg.kappa1_hz);
        probe.g_probe =
            coupling_from_cooperativity(cfg.probe_cooperativity, gamma_m, kappa1);
        prog.probe = probe;
    }
    return prog;
}

Complex input_amplitude(const RunConfig& cfg)
{
    const double flux =
        photon_flux_from_power(cfg.pin_mw * 1e-3, cfg.lambda1_nm * 1e-9);
    return Complex(std::sqrt(flux), 0.0);
}

double output_photon_energy(const RunConfig& cfg)
{
    return hbar * optical_angular_frequency(cfg.lambda2_nm * 1e-9);
}

SpectrumOptions spectrum_options(const RunConfig& cfg)
{
    SpectrumOptions opts;
    opts.zero_pad_factor = static_cast<std::size_t>(cfg.zero_pad_factor);
    opts.window = cfg.spectrum_window == "hann" ? SpectrumWindow::hann
                                                : SpectrumWindow::rectangular;
    opts.rbw_hz = cfg.rbw_hz;
    opts.scale = cfg.calibration_scale;
    return opts;
}

std::vector<double> sweep_grid(const RunConfig& cfg)
{
    std::vector<double> grid(static_cast<std::size_t>(cfg.sweep_points));
    const auto n = static_cast<double>(cfg.sweep_points - 1);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double u = static_cast<double>(i) / n;
        if (cfg.sweep_scale == "log")
            grid[i] = cfg.sweep_start *
                      std::pow(cfg.sweep_stop / cfg.sweep_start, u);
        else
            grid[i] = cfg.sweep_start + (cfg.sweep_stop - cfg.sweep_start) * u;
    }
    return grid;
}

double integration_dt(const RunConfig& cfg, const SystemParams& params,
                      const PulseProgram& program)
{
    if (cfg.dt_ns > 0.0)
        return cfg.dt_ns * 1e-9;
    return suggested_dt(params, program, cfg.dt_factor);
}

} // namespace omx
