#include "omx/calibration.hpp"
#include "omx/config.hpp"
#include "omx/dynamics.hpp"
#include "omx/errors.hpp"
#include "omx/plot.hpp"
#include "omx/scenarios.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace {

constexpr const char* version_string = "omx 0.1.0";

struct CommonArgs {
    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    bool plot = false;
};

omx::RunConfig load_config(const CommonArgs& args)
{
    omx::RunConfig cfg;
    if (!args.config_path.empty())
        cfg = omx::parse_config_file(args.config_path);
    if (args.seed)
        cfg.seed = *args.seed;
    for (const std::string& w : omx::validate_config(cfg))
        std::cerr << "warning: " << w << "\n";
    return cfg;
}

void write_file(const std::filesystem::path& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw omx::ConfigError("cannot write output file: " + path.string());
    out << content;
}

std::string power_tag(double mw)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", mw);
    std::string s(buf);
    for (char& c : s)
        if (c == '.')
            c = 'p';
    return s;
}

void add_common(CLI::App* cmd, CommonArgs& args)
{
    cmd->add_option("--config", args.config_path, "run configuration file");
    cmd->add_option("--out", args.out_dir, "output directory");
    cmd->add_option("--seed", args.seed, "override run.seed");
    cmd->add_flag("--plot", args.plot, "also write an SVG line plot per CSV");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"optomechanical wavelength-conversion simulator"};
    app.set_version_flag("--version", version_string);

    bool dump_defaults = false;
    app.add_flag("--dump-default-config", dump_defaults,
                 "print the default configuration and exit");

    CommonArgs args;
    std::string calib_data_path;

    CLI::App* cmd_eff = app.add_subcommand(
        "efficiency-sweep", "conversion efficiency vs P1 for each configured P2");
    add_common(cmd_eff, args);
    CLI::App* cmd_tr = app.add_subcommand(
        "transient", "gated output power vs gate delay per pulse duration");
    add_common(cmd_tr, args);
    CLI::App* cmd_sp = app.add_subcommand(
        "spectral-response", "gated output power vs signal detuning");
    add_common(cmd_sp, args);
    CLI::App* cmd_mp = app.add_subcommand(
        "mechanical-probe", "gated-probe mechanical intensity along a power sweep");
    add_common(cmd_mp, args);
    CLI::App* cmd_cal = app.add_subcommand(
        "calibrate", "fit power-to-cooperativity constants from measurement data");
    add_common(cmd_cal, args);
    cmd_cal->add_option("data", calib_data_path, "measurement CSV")->required();
    CLI::App* cmd_rd = app.add_subcommand(
        "ringdown", "mechanical ring-down: decay trace, spectrum and fits");
    add_common(cmd_rd, args);

    app.require_subcommand(0, 1);

    CLI11_PARSE(app, argc, argv);

    if (dump_defaults) {
        std::cout << omx::serialize_config(omx::RunConfig{});
        return 0;
    }
    if (app.get_subcommands().empty()) {
        std::cerr << app.help();
        return 2;
    }

    try {
        const omx::RunConfig cfg = load_config(args);
        const std::filesystem::path out_dir(args.out_dir);
        std::filesystem::create_directories(out_dir);

        const bool log_x = cfg.sweep_scale == "log";
        if (cmd_eff->parsed()) {
            const auto curves = omx::run_efficiency_sweep(cfg);
            for (const auto& curve : curves) {
                const auto stem = "efficiency_p2_" + power_tag(curve.p2_mw) + "mw";
                write_file(out_dir / (stem + ".csv"), omx::efficiency_csv(curve));
                if (args.plot)
                    write_file(out_dir / (stem + ".svg"),
                               omx::svg_line_plot(curve.p1_mw,
                                                  {{"chi_steady", curve.chi_steady},
                                                   {"chi_gated", curve.chi_gated}},
                                                  "P1 (mW)", "conversion efficiency",
                                                  log_x));
            }
            std::cout << curves.size() << " efficiency curve(s) written to "
                      << out_dir.string() << "\n";
        } else if (cmd_tr->parsed()) {
            const auto curves = omx::run_transient(cfg);
            for (const auto& curve : curves) {
                const auto stem = "transient_" + power_tag(curve.duration_us) + "us";
                write_file(out_dir / (stem + ".csv"), omx::transient_csv(curve));
                if (args.plot)
                    write_file(out_dir / (stem + ".svg"),
                               omx::svg_line_plot(curve.gate_delay_us,
                                                  {{"", curve.output_power_w}},
                                                  "gate delay (us)",
                                                  "output power (W)"));
                if (cfg.transient_dump_trajectory) {
                    std::ofstream traj(out_dir / ("trajectory_" +
                                                  power_tag(curve.duration_us) +
                                                  "us.csv"),
                                       std::ios::binary);
                    omx::write_trajectory_csv(curve.trajectory, traj);
                }
            }
            std::cout << curves.size() << " transient curve(s) written to "
                      << out_dir.string() << "\n";
        } else if (cmd_sp->parsed()) {
            const auto curves = omx::run_spectral_response(cfg);
            for (const auto& curve : curves) {
                const auto stem = "spectral_" + power_tag(curve.duration_us) + "us";
                write_file(out_dir / (stem + ".csv"), omx::spectral_csv(curve));
                if (args.plot)
                    write_file(out_dir / (stem + ".svg"),
                               omx::svg_line_plot(curve.delta_hz,
                                                  {{"", curve.output_power_w}},
                                                  "delta (Hz)", "output power (W)",
                                                  log_x));
            }
            std::cout << curves.size() << " spectral curve(s) written to "
                      << out_dir.string() << "\n";
        } else if (cmd_mp->parsed()) {
            const auto curve = omx::run_mechanical_probe(cfg);
            const auto stem = "mech_probe_" + curve.axis;
            write_file(out_dir / (stem + ".csv"), omx::probe_csv(curve));
            if (args.plot)
                write_file(out_dir / (stem + ".svg"),
                           omx::svg_line_plot(curve.power_mw,
                                              {{"", curve.intensity}},
                                              curve.axis + " (mW)",
                                              "mechanical intensity", log_x));
            std::cout << "mechanical-probe sweep written to " << out_dir.string()
                      << "\n";
        } else if (cmd_cal->parsed()) {
            const auto rows = omx::load_measurements_file(calib_data_path);
            omx::CalibrationResult cal = omx::fit_proportionality(rows);
            bool have_eta = false;
            for (const auto& r : rows)
                if (r.quantity == omx::Quantity::efficiency)
                    have_eta = true;
            if (have_eta)
                cal.eta_product = omx::fit_eta(rows, cal);
            std::ofstream report(out_dir / "calibration_report.txt", std::ios::binary);
            omx::write_calibration_report(cal, report);
            std::ofstream cov(out_dir / "calibration_covariance.csv", std::ios::binary);
            omx::write_covariance_csv(cal, cov);
            omx::write_calibration_report(cal, std::cout);
        } else if (cmd_rd->parsed()) {
            const auto result = omx::run_ringdown(cfg);
            write_file(out_dir / "ringdown_decay.csv", omx::ringdown_decay_csv(result));
            std::ofstream spec(out_dir / "ringdown_spectrum.csv", std::ios::binary);
            omx::write_spectrum_csv(result.spectrum, spec);
            if (args.plot) {
                write_file(out_dir / "ringdown_decay.svg",
                           omx::svg_line_plot(result.gate_delay_us,
                                              {{"", result.intensity}},
                                              "gate delay (us)",
                                              "mechanical intensity"));
                std::vector<double> f(result.spectrum.density.size());
                for (std::size_t k = 0; k < f.size(); ++k)
                    f[k] = result.spectrum.f_at(k);
                write_file(out_dir / "ringdown_spectrum.svg",
                           omx::svg_line_plot(f, {{"", result.spectrum.density}},
                                              "f (Hz)", "density (W/Hz)"));
            }
            char buf[512];
            std::snprintf(buf, sizeof buf,
                          "center_hz = %.12g\n"
                          "fwhm_hz = %.12g\n"
                          "area_w = %.12g\n"
                          "offset = %.12g\n"
                          "residual = %.12g\n"
                          "decay_amplitude = %.12g\n"
                          "decay_lifetime_us = %.12g\n"
                          "decay_residual = %.12g\n",
                          result.line.center, result.line.fwhm, result.line.area,
                          result.line.offset, result.line.residual_norm,
                          result.decay.amplitude, result.decay.lifetime * 1e6,
                          result.decay.residual_norm);
            write_file(out_dir / "ringdown_fit.txt", buf);
            std::cout << buf;
        }
    } catch (const omx::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const omx::FitError& e) {
        std::cerr << "fit error: " << e.what() << "\n";
        return 4;
    } catch (const omx::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
