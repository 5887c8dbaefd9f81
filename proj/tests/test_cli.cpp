#include <doctest.h>

#include "uavmd/io.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;
using namespace uavmd;

namespace {

const fs::path work = fs::temp_directory_path() / "uavmd_cli_test";

int run(const std::string& args) {
    const std::string cmd = std::string(UAVMD_CLI_PATH) + " " + args + " >" + (work / "last.log").string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

// A small scene keeps the tests quick.
const std::string small = "--set frame.subcarriers=256 --set frame.symbols=600";

struct Workdir {
    Workdir() {
        fs::remove_all(work);
        fs::create_directories(work);
    }
};

} // namespace

TEST_CASE_FIXTURE(Workdir, "simulate") {
    const auto a = work / "a", b = work / "b";
    REQUIRE(run("simulate " + small + " -o " + a.string()) == 0);
    REQUIRE(run("simulate " + small + " -o " + b.string()) == 0);
    for (const char* f : {"csi.cxm", "s_uav.cxm", "s_mix.cxm", "truth_translation.cxm", "truth_vibration.cxm",
                          "truth_rotation.cxm", "timeline.txt"})
        CHECK(slurp(a / f) == slurp(b / f));
    const auto csi = io::read_cxm(a / "csi.cxm");
    CHECK(csi.rows() == 256);
    CHECK(csi.cols() == 600);
    CHECK(io::read_cxm(a / "s_mix.cxm").cols() == 600);

    // the manifest is itself a config that reproduces the run
    const auto c = work / "c";
    REQUIRE(run("simulate -c " + (a / "manifest.ini").string() + " -o " + c.string()) == 0);
    CHECK(slurp(a / "s_mix.cxm") == slurp(c / "s_mix.cxm"));
    CHECK(slurp(a / "csi.cxm") == slurp(c / "csi.cxm"));

    const auto d = work / "d";
    REQUIRE(run("simulate " + small + " --set scene.blades=0 -o " + d.string()) == 0);
    for (const auto& z : io::read_cxm(d / "truth_rotation.cxm").flat()) CHECK(z == cplx{});
}

TEST_CASE_FIXTURE(Workdir, "full-size simulate dimensions") {
    const auto a = work / "full";
    REQUIRE(run("simulate -o " + a.string()) == 0);
    const auto csi = io::read_cxm(a / "csi.cxm");
    CHECK(csi.rows() == 3276);
    CHECK(csi.cols() == 1840);
    CHECK(io::read_cxm(a / "s_uav.cxm").cols() == 1840);
}

TEST_CASE_FIXTURE(Workdir, "decompose") {
    const auto sim = work / "sim";
    REQUIRE(run("simulate " + small + " -o " + sim.string()) == 0);
    const auto input = (sim / "s_mix.cxm").string();

    const auto r = work / "rmd", n = work / "nsp";
    REQUIRE(run("decompose " + input + " --variant rmd-nsp --passes 3 -o " + r.string()) == 0);
    REQUIRE(run("decompose " + input + " --variant nsp --passes 3 -o " + n.string()) == 0);
    CHECK(fs::exists(r / "component_3.cxm"));
    CHECK(io::read_cxm(r / "components.cxm").rows() == 3);
    CHECK(slurp(r / "diagnostics.txt") != slurp(n / "diagnostics.txt"));

    // round trip: last component plus residual
    const auto s = io::as_vector(io::read_cxm(input));
    const auto u = io::as_vector(io::read_cxm(r / "component_3.cxm"));
    const auto res = io::as_vector(io::read_cxm(r / "residual.cxm"));
    double num = 0.0, den = 0.0;
    for (std::size_t m = 0; m < s.size(); ++m) {
        num += std::norm(u[m] + res[m] - s[m]);
        den += std::norm(s[m]);
    }
    CHECK(std::sqrt(num / den) <= 1e-12);

    // a column vector tone, one pass
    ComplexMatrix tone(500, 1);
    for (std::size_t m = 0; m < 500; ++m) tone(m, 0) = std::polar(1.0, 0.2 * m);
    io::write_cxm(work / "tone.cxm", tone);
    const auto t = work / "tone";
    REQUIRE(run("decompose " + (work / "tone.cxm").string() + " --passes 1 -o " + t.string()) == 0);
    CHECK(fs::exists(t / "component_1.cxm"));
    CHECK(!fs::exists(t / "component_2.cxm"));
}

TEST_CASE_FIXTURE(Workdir, "exit codes") {
    auto bytes = io::encode_cxm(ComplexMatrix(1, 8));
    bytes[1] = 'Z';
    {
        std::ofstream f(work / "bad.cxm", std::ios::binary);
        f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    }
    CHECK(run("decompose " + (work / "bad.cxm").string() + " -o " + (work / "x").string()) == 4);
    CHECK(slurp(work / "last.log").find("byte 1") != std::string::npos);
    CHECK(run("decompose " + (work / "missing.cxm").string() + " -o " + (work / "x").string()) == 3);
    CHECK(run("simulate --set scene.wingspan=2 -o " + (work / "x").string()) == 2);
    CHECK(run("simulate -c " + (work / "missing.ini").string() + " -o " + (work / "x").string()) == 3);
    CHECK(run("simulate " + small + " -o /proc/uavmd-forbidden") == 3);
    CHECK(run("frobnicate") == 2);
}

TEST_CASE_FIXTURE(Workdir, "spectrogram") {
    const auto sim = work / "sim";
    REQUIRE(run("simulate " + small + " -o " + sim.string()) == 0);
    const auto input = (sim / "s_uav.cxm").string();
    const auto out = work / "spec";
    REQUIRE(run("spectrogram " + input + " --mode stft -o " + out.string()) == 0);
    REQUIRE(run("spectrogram " + input + " --mode set -o " + out.string()) == 0);
    CHECK(fs::exists(out / "stft.pgm"));
    CHECK(fs::exists(out / "set.csv"));

    // SET nonzero cells sit inside the STFT's above-threshold cells
    auto value = [](const std::string& text, const std::string& key) {
        const auto p = text.find(key + " = ");
        return std::stod(text.substr(p + key.size() + 3));
    };
    const auto stft_sum = slurp(out / "stft_summary.txt"), set_sum = slurp(out / "set_summary.txt");
    CHECK(value(set_sum, "nonzero") <= value(stft_sum, "above_threshold"));
    const double Ts = 36.6e-6;
    CHECK(value(stft_sum, "freq_min_hz") == doctest::Approx(-1.0 / (2 * Ts)));

    io::write_cxm(work / "zero.cxm", ComplexMatrix(1, 600));
    const auto z = work / "zero";
    REQUIRE(run("spectrogram " + (work / "zero.cxm").string() + " -o " + z.string()) == 0);
    const auto pgm = slurp(z / "stft.pgm");
    const auto header_end = pgm.find("65535\n") + 6;
    for (std::size_t i = header_end; i < pgm.size(); ++i) CHECK(pgm[i] == 0);
}

TEST_CASE_FIXTURE(Workdir, "bench") {
    const auto csv = work / "sweep.csv";
    REQUIRE(run("bench --snr-min 20 --snr-max 30 --snr-step 10 --trials 2 --variants nsp,amfm-nsp "
                "--set sweep.symbols=256 --set sweep.subcarriers=128 -o " +
                csv.string()) == 0);
    std::istringstream text(slurp(csv));
    std::string line;
    std::getline(text, line);
    CHECK(line == "variant,snr_db,mean_rmse,std_rmse,convergence_rate");
    std::size_t rows = 0;
    while (std::getline(text, line)) ++rows;
    CHECK(rows == 4);
    CHECK(fs::exists(work / "sweep.csv.manifest.ini"));
}

TEST_CASE_FIXTURE(Workdir, "range-doppler") {
    const auto out = work / "rd";
    REQUIRE(run("range-doppler " + small + " -o " + out.string()) == 0);
    const auto summary = slurp(out / "summary.txt");
    CHECK(summary.find("range_resolution_m = 1.5\n") != std::string::npos);
    CHECK(fs::exists(out / "range_doppler.csv"));
}
