#include <doctest.h>

#include "uavmd/error.hpp"
#include "uavmd/grid.hpp"
#include "uavmd/io.hpp"
#include "uavmd/tfa.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace uavmd;

namespace {

constexpr double Ts = 36.6e-6;

std::vector<double> uniform(std::size_t M) {
    std::vector<double> t(M);
    for (std::size_t m = 0; m < M; ++m) t[m] = static_cast<double>(m + 1) * Ts;
    return t;
}

std::vector<cplx> tone(std::span<const double> t, double f0) {
    std::vector<cplx> u(t.size());
    for (std::size_t m = 0; m < t.size(); ++m) u[m] = std::polar(1.0, 2 * pi * f0 * t[m]);
    return u;
}

std::size_t ridge(const Spectrogram& s, std::size_t frame) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < s.values.rows(); ++i)
        if (std::abs(s.values(i, frame)) > std::abs(s.values(best, frame))) best = i;
    return best;
}

} // namespace

TEST_CASE("window") {
    const auto g = gaussian_window(257, 256.0 / 6.0);
    REQUIRE(g.size() == 257);
    double e = 0.0;
    for (double x : g) e += x * x;
    CHECK(e == doctest::Approx(1.0).epsilon(1e-12));
    for (std::size_t k = 0; k < 128; ++k) CHECK(g[k] == doctest::Approx(g[256 - k]).epsilon(1e-14));
    CHECK_THROWS_AS(gaussian_window(256, 40), ParameterError);
    StftConfig bad;
    bad.window = std::vector<double>(256, 1.0 / 16);
    CHECK_THROWS_AS(bad.validate(), ParameterError);
    bad = {};
    bad.hop = 0;
    CHECK_THROWS_AS(bad.validate(), ParameterError);
    bad = {};
    bad.fft_size = 128;
    CHECK_THROWS_AS(bad.validate(), ParameterError);
}

TEST_CASE("tone spectrogram") {
    const auto t = uniform(1200);
    const StftConfig cfg;
    const double bin = 1.0 / (cfg.fft_size * Ts);
    const double f0 = 40 * bin;
    const auto s = stft(tone(t, f0), t, cfg);
    REQUIRE(s.freq_axis.size() == s.values.rows());
    REQUIRE(s.time_axis.size() == s.values.cols());
    CHECK(s.bin_width() == doctest::Approx(bin));
    CHECK(s.freq_axis.front() == doctest::Approx(-1.0 / (2 * Ts)));
    CHECK(s.freq_axis.back() == doctest::Approx(1.0 / (2 * Ts) - bin));

    const std::size_t k0 = ridge(s, 0);
    CHECK(s.freq_axis[k0] == doctest::Approx(f0).epsilon(1e-9));
    const double step = std::arg(s.values(k0, 1) * std::conj(s.values(k0, 0)));
    for (std::size_t f = 0; f < s.values.cols(); ++f) {
        CHECK(ridge(s, f) == k0);
        if (f > 0) CHECK(std::arg(s.values(k0, f) * std::conj(s.values(k0, f - 1))) == doctest::Approx(step).epsilon(1e-9));
    }

    const double gamma = default_threshold(s, cfg.threshold_ratio);
    const auto w = inst_freq(s, gamma);
    std::size_t finite = 0;
    for (double x : w.data)
        if (std::isfinite(x)) {
            ++finite;
            CHECK(std::abs(x - f0) < bin);
        }
    CHECK(finite > 0);

    const auto set = set_transform(s, gamma);
    for (std::size_t f = 0; f < set.values.cols(); ++f) {
        std::size_t nz = 0;
        for (std::size_t i = 0; i < set.values.rows(); ++i) nz += set.values(i, f) != cplx{};
        CHECK(nz == 1);
        CHECK(set.values(k0, f) == s.values(k0, f));
    }

    auto all_inf = inst_freq(s, 1e300);
    for (double x : all_inf.data) CHECK(std::isinf(x));
}

TEST_CASE("tone on the sensing timeline") {
    FrameConfig fc;
    const auto t = build_timeline(fc);
    const auto s = stft(tone(t, 1234.5), t, {});
    CHECK(std::abs(s.freq_axis[ridge(s, s.values.cols() / 2)] - 1234.5) < s.bin_width());
}

TEST_CASE("energy identity") {
    const std::size_t M = 40000;
    const auto t = uniform(M);
    const StftConfig cfg;
    const auto s = stft(tone(t, 3100.0), t, cfg);
    double e = 0.0;
    for (const auto& z : s.values.flat()) e += std::norm(z);
    // unit-energy window; the unnormalised DFT contributes the fft size
    const double est = e * cfg.hop / static_cast<double>(cfg.fft_size);
    CHECK(est == doctest::Approx(static_cast<double>(M)).epsilon(0.02));
}

TEST_CASE("chirp ridge") {
    const std::size_t M = 2000;
    const auto t = uniform(M);
    const double f_start = -5000.0, rate = 10000.0 / (M * Ts);
    std::vector<cplx> u(M);
    for (std::size_t m = 0; m < M; ++m) u[m] = std::polar(1.0, 2 * pi * (f_start * t[m] + 0.5 * rate * t[m] * t[m]));
    const auto s = stft(u, t, {});
    const auto w = inst_freq(s, default_threshold(s, 0.02));
    for (std::size_t f = 0; f < s.values.cols(); ++f) {
        const std::size_t k = ridge(s, f);
        const double truth = f_start + rate * t[s.centers[f]];
        CHECK(std::abs(w(k, f) - truth) < s.bin_width());
        CHECK(std::abs(s.freq_axis[k] - truth) < s.bin_width());
    }
}

TEST_CASE("SET is a masked copy") {
    const std::size_t M = 1500;
    const auto t = uniform(M);
    std::vector<cplx> u(M);
    for (std::size_t m = 0; m < M; ++m)
        u[m] = std::polar(1.0, 2 * pi * 2000 * std::sin(2 * pi * 80 * t[m]) / (2 * pi * 80)) +
               0.3 * std::polar(1.0, -2 * pi * 700 * t[m]);
    const auto s = stft(u, t, {});
    const double gamma = default_threshold(s, 0.02);
    const auto set = set_transform(s, gamma);
    CHECK(count_nonzero(set) <= count_above(s, gamma));
    for (std::size_t i = 0; i < s.values.rows(); ++i)
        for (std::size_t f = 0; f < s.values.cols(); ++f)
            if (set.values(i, f) != cplx{}) {
                CHECK(set.values(i, f) == s.values(i, f));
                CHECK(std::abs(s.values(i, f)) > gamma);
            }
    CHECK(renyi_entropy(set) < renyi_entropy(s));

    std::vector<cplx> scaled(M);
    for (std::size_t m = 0; m < M; ++m) scaled[m] = cplx{-2.0, 3.5} * u[m];
    const auto s2 = stft(scaled, t, {});
    const auto w1 = inst_freq(s, gamma), w2 = inst_freq(s2, gamma * std::abs(cplx{-2.0, 3.5}));
    for (std::size_t i = 0; i < w1.data.size(); ++i)
        if (std::isfinite(w1.data[i]) && std::isfinite(w2.data[i])) CHECK(w2.data[i] == doctest::Approx(w1.data[i]).epsilon(1e-9));
}

TEST_CASE("entropy") {
    Spectrogram s;
    s.values = ComplexMatrix(4, 4);
    s.values(1, 1) = 2.0;
    CHECK(renyi_entropy(s) == doctest::Approx(0.0));
    for (auto& z : s.values.flat()) z = 1.0;
    CHECK(renyi_entropy(s) == doctest::Approx(4.0)); // log2 of 16 equal cells
}

TEST_CASE("degenerate inputs and exports") {
    const auto t = uniform(600);
    const auto zero = stft(std::vector<cplx>(600), t, {});
    for (const auto& z : zero.values.flat()) CHECK(z == cplx{});
    CHECK_THROWS_AS(stft(std::vector<cplx>(100), uniform(100), {}), ParameterError);

    const auto dir = std::filesystem::temp_directory_path() / "uavmd_tfa_test";
    std::filesystem::create_directories(dir);
    write_spectrogram_pgm(dir / "z.pgm", zero);
    {
        std::ifstream f(dir / "z.pgm", std::ios::binary);
        std::string magic, comment;
        std::getline(f, magic);
        std::getline(f, comment);
        std::size_t w = 0, h = 0, maxv = 0;
        f >> w >> h >> maxv;
        f.get();
        CHECK(magic == "P5");
        CHECK(comment.find("floor_db") != std::string::npos);
        CHECK(w == zero.values.cols());
        CHECK(h == zero.values.rows());
        CHECK(maxv == 65535);
        std::vector<char> px(2 * w * h);
        f.read(px.data(), static_cast<std::streamsize>(px.size()));
        CHECK(f.gcount() == static_cast<std::streamsize>(px.size()));
        for (char c : px) CHECK(c == 0);
    }
    const auto s = stft(tone(t, 500.0), t, {});
    write_spectrogram_csv(dir / "s.csv", s);
    std::ifstream f(dir / "s.csv");
    std::string header, first;
    std::getline(f, header);
    std::getline(f, first);
    CHECK(header.rfind("freq_hz\\time_s,", 0) == 0);
    CHECK(std::stod(first.substr(0, first.find(','))) == doctest::Approx(-1.0 / (2 * Ts)).epsilon(1e-8));
    std::filesystem::remove_all(dir);
}
