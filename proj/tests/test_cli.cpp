#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "omx/config.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

std::string omx_bin()
{
    const char* bin = std::getenv("OMX_BIN");
    REQUIRE(bin != nullptr);
    return bin;
}

int run(const std::string& cmd)
{
    const int status = std::system((cmd + " >/dev/null 2>&1").c_str());
    return WEXITSTATUS(status);
}

std::string capture(const std::string& cmd)
{
    const std::string path = (fs::temp_directory_path() / "omx_cli_capture.txt").string();
    const int rc = std::system((cmd + " > " + path + " 2>/dev/null").c_str());
    CHECK(WEXITSTATUS(rc) == 0);
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path make_workdir(const std::string& tag)
{
    const fs::path dir = fs::temp_directory_path() / ("omx_cli_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write_small_config(const fs::path& path)
{
    omx::RunConfig cfg;
    cfg.sweep_points = 5;
    cfg.sweep_stop = 20.0;
    cfg.efficiency_p2_mw = {11.0};
    cfg.efficiency_eta_products = {0.2025};
    std::ofstream out(path, std::ios::binary);
    out << omx::serialize_config(cfg);
}

} // namespace

TEST_CASE("cli: version flag")
{
    CHECK(capture(omx_bin() + std::string(" --version")).rfind("omx 0.1.0", 0) == 0);
}

TEST_CASE("cli: dump-default-config round-trips through the parser")
{
    const std::string text = capture(omx_bin() + std::string(" --dump-default-config"));
    std::istringstream in(text);
    const omx::RunConfig cfg = omx::parse_config(in);
    CHECK(omx::serialize_config(cfg) == text);
}

TEST_CASE("cli: efficiency sweep writes deterministic CSV")
{
    const fs::path dir = make_workdir("eff");
    write_small_config(dir / "run.cfg");
    const std::string base = omx_bin() + std::string(" efficiency-sweep --config ") +
                             (dir / "run.cfg").string();
    CHECK(run(base + " --out " + (dir / "a").string()) == 0);
    CHECK(run(base + " --out " + (dir / "b").string()) == 0);
    const fs::path csv_a = dir / "a" / "efficiency_p2_11mw.csv";
    const fs::path csv_b = dir / "b" / "efficiency_p2_11mw.csv";
    REQUIRE(fs::exists(csv_a));
    const std::string a = slurp(csv_a);
    CHECK(a == slurp(csv_b));
    CHECK(a.rfind("p1_mw,chi_steady,chi_gated\n", 0) == 0);
    CHECK(a.find("\r") == std::string::npos);
}

TEST_CASE("cli: config errors exit with status 2")
{
    const fs::path dir = make_workdir("badcfg");
    std::ofstream(dir / "bad.cfg") << "system.kappa1_hz = -5\n";
    CHECK(run(omx_bin() + std::string(" efficiency-sweep --config ") +
              (dir / "bad.cfg").string()) == 2);

    std::ofstream(dir / "unknown.cfg") << "nope.nope = 1\n";
    CHECK(run(omx_bin() + std::string(" transient --config ") +
              (dir / "unknown.cfg").string()) == 2);

    CHECK(run(omx_bin() + std::string(" efficiency-sweep --config ") +
              (dir / "missing.cfg").string()) == 2);
}

TEST_CASE("cli: calibrate on the bundled dataset recovers the reference constants")
{
    const fs::path dir = make_workdir("cal");
    const fs::path data = fs::path(OMX_SOURCE_DIR) / "data" / "sample_mech_intensity.csv";
    REQUIRE(fs::exists(data));
    CHECK(run(omx_bin() + std::string(" calibrate ") + data.string() + " --out " +
              dir.string()) == 0);
    const std::string report = slurp(dir / "calibration_report.txt");
    CHECK(report.find("k1_per_mw = 0.2") != std::string::npos);
    CHECK(report.find("k2_per_mw = 0.066666") != std::string::npos);
    CHECK(report.find("eta_product = 0.2025") != std::string::npos);
    CHECK(fs::exists(dir / "calibration_covariance.csv"));
}

TEST_CASE("cli: calibrate rejects malformed data with status 2")
{
    const fs::path dir = make_workdir("calbad");
    std::ofstream(dir / "bad.csv") << "p1_mw,p2_mw,quantity,value,sigma\n"
                                      "1,0,phase,1.0,\n";
    CHECK(run(omx_bin() + std::string(" calibrate ") + (dir / "bad.csv").string() +
              " --out " + dir.string()) == 2);
}

TEST_CASE("cli: degenerate ringdown exits with the fit-failure status")
{
    const fs::path dir = make_workdir("rdfail");
    omx::RunConfig cfg;
    cfg.ringdown_beta0 = 0.0;
    std::ofstream(dir / "run.cfg") << omx::serialize_config(cfg);
    CHECK(run(omx_bin() + std::string(" ringdown --config ") +
              (dir / "run.cfg").string() + " --out " + dir.string()) == 4);
}

TEST_CASE("cli: --plot emits an SVG next to each CSV")
{
    const fs::path dir = make_workdir("plot");
    write_small_config(dir / "run.cfg");
    CHECK(run(omx_bin() + std::string(" efficiency-sweep --config ") +
              (dir / "run.cfg").string() + " --out " + dir.string() + " --plot") == 0);
    const std::string svg = slurp(dir / "efficiency_p2_11mw.svg");
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("chi_gated") != std::string::npos);
    CHECK(svg.find("</svg>") != std::string::npos);
}

TEST_CASE("cli: transient trajectory dump uses the documented schema")
{
    const fs::path dir = make_workdir("traj");
    omx::RunConfig cfg;
    cfg.transient_durations_us = {1.0};
    cfg.transient_dump_trajectory = true;
    std::ofstream(dir / "run.cfg") << omx::serialize_config(cfg);
    CHECK(run(omx_bin() + std::string(" transient --config ") +
              (dir / "run.cfg").string() + " --out " + dir.string()) == 0);
    const std::string traj = slurp(dir / "trajectory_1us.csv");
    CHECK(traj.rfind("t_s,re_alpha1,im_alpha1,re_alpha2,im_alpha2,re_beta,im_beta\n",
                     0) == 0);
}
