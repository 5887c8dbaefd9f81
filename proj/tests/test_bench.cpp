#include <doctest.h>

#include "uavmd/bench.hpp"
#include "uavmd/error.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace uavmd;

namespace {

TrialSetup long_desk() {
    TrialSetup s = desk_setup();
    s.frame.num_symbols = 1840;
    return s;
}

const Scenario& reference() {
    static const Scenario sc = make_scenario(desk_setup());
    return sc;
}

double mean_power(std::span<const cplx> v) {
    double p = 0.0;
    for (const auto& z : v) p += std::norm(z);
    return p / static_cast<double>(v.size());
}

} // namespace

TEST_CASE("noise for SNR") {
    std::vector<cplx> s(1840);
    for (std::size_t m = 0; m < s.size(); ++m) s[m] = std::polar(0.5 + 0.1 * std::sin(0.01 * m), 0.3 * m);
    const double p = mean_power(s);
    CHECK(noise_for_snr(s, 0.0) == doctest::Approx(p).epsilon(1e-14));
    CHECK(noise_for_snr(s, 3.0) == doctest::Approx(p / std::pow(10.0, 0.3)).epsilon(1e-14));
    CHECK_THROWS_AS(noise_for_snr(std::vector<cplx>(8), 10.0), ParameterError);

    SlowTimeSignal sig;
    sig.samples = s;
    sig.timeline.assign(s.size(), 0.0);
    const auto noisy = add_clutter(sig, {{}, noise_for_snr(s, 10.0)}, 42);
    std::vector<cplx> n(s.size());
    for (std::size_t m = 0; m < s.size(); ++m) n[m] = noisy.samples[m] - s[m];
    CHECK(std::abs(10 * std::log10(p / mean_power(n)) - 10.0) <= 0.2);
}

TEST_CASE("scenario truths") {
    const Scenario& sc = reference();
    const auto& s = sc.s_uav.samples;
    REQUIRE(s.size() == 512);
    CHECK(sc.s_uav.origin_bin == 5);
    for (std::size_t m = 0; m < s.size(); ++m) {
        const cplx sum = sc.translation[m] + sc.vibration[m] + sc.rotation[m];
        CHECK(std::abs(s[m] - sum) <= 1e-9 * std::abs(s[m]));
    }
}

TEST_CASE("trials") {
    const Scenario& sc = reference();
    TrialSetup setup = desk_setup();

    SUBCASE("deterministic") {
        const auto a = run_trial(sc, setup, Variant::rmd_nsp, 20.0, 7, 3);
        const auto b = run_trial(sc, setup, Variant::rmd_nsp, 20.0, 7, 3);
        CHECK(a.rmse == b.rmse);
        CHECK(a.s_mix == b.s_mix);
        CHECK(!(run_trial(sc, setup, Variant::rmd_nsp, 20.0, 8, 3).s_mix == a.s_mix));
    }

    SUBCASE("noiseless rotor-only scene") {
        TrialSetup r = setup;
        r.scene.terms = {false, false, true};
        r.clutter = false;
        const auto rsc = make_scenario(r);
        const auto o = run_trial(rsc, r, Variant::rmd_nsp, INFINITY, 1, 0);
        REQUIRE(o.ok);
        CHECK(o.rmse <= 0.05);
    }

    SUBCASE("relative RMSE ignores the link budget") {
        TrialSetup hot = setup;
        hot.scene.link.transmit_power *= 37.0;
        const auto hsc = make_scenario(hot);
        const auto a = run_trial(sc, setup, Variant::amfm_nsp, 25.0, 2, 0);
        const auto b = run_trial(hsc, hot, Variant::amfm_nsp, 25.0, 2, 0);
        CHECK(b.rmse == doctest::Approx(a.rmse).epsilon(1e-6));
    }

    SUBCASE("final pass follows the rotor") {
        const auto o = run_trial(sc, setup, Variant::rmd_nsp, 30.0, 1, 0);
        REQUIRE(o.ok);
        CHECK(correlation(o.output.components.back(), sc.rotation) >= 0.8);
        CHECK(o.output.components.size() == setup.passes);
    }
}

TEST_CASE("rmse points and sweeps") {
    const Scenario& sc = reference();
    const TrialSetup setup = desk_setup();
    const auto a = rmse_point(sc, setup, Variant::rmd_nsp, 20.0, 8, 1, 2);
    const auto b = rmse_point(sc, setup, Variant::rmd_nsp, 20.0, 8, 1, 1);
    CHECK(a.mean_rmse == b.mean_rmse);
    CHECK(a.std_rmse == b.std_rmse);
    CHECK(a.mean_rmse > 0);
    CHECK(a.convergence_rate >= 0.95);
    CHECK(a.trials == 8);

    CHECK(snr_range(-10, 30, 1).size() == 41);
    CHECK(snr_range(-10, 30, 5).size() == 9);
    CHECK_THROWS_AS(snr_range(0, 10, 0), ConfigError);

    SweepConfig cfg;
    cfg.snr_grid = {10.0, 30.0};
    cfg.trials = 2;
    cfg.variants = {Variant::nsp, Variant::amfm_nsp};
    cfg.workers = 2;
    const auto path = std::filesystem::temp_directory_path() / "uavmd_sweep_test.csv";
    write_sweep_header(path);
    std::size_t rows = 0;
    const auto res = sweep(cfg, [&](const PointResult& r) {
        append_sweep_row(path, r);
        ++rows;
    });
    CHECK(res.size() == 4);
    CHECK(rows == 4);
    cfg.workers = 1;
    const auto again = sweep(cfg);
    for (std::size_t i = 0; i < res.size(); ++i) CHECK(again[i].mean_rmse == res[i].mean_rmse);
    std::ifstream f(path);
    std::string line;
    std::getline(f, line);
    CHECK(line == "variant,snr_db,mean_rmse,std_rmse,convergence_rate");
    std::size_t n = 0;
    while (std::getline(f, line)) ++n;
    CHECK(n == 4);
    std::filesystem::remove(path);

    cfg.trials = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("blade flash period") {
    SUBCASE("80 r/s") {
        const auto sc = make_scenario(long_desk());
        const auto spec = stft(sc.s_uav.samples, sc.s_uav.timeline, {});
        const double hop_s = 4 * 36.6e-6;
        CHECK(std::abs(flash_period(spec) - 12.5e-3) <= hop_s);
    }
    SUBCASE("40 r/s sinusoidal FM") {
        // exactly periodic, unlike the scene whose blade RCS drifts against the rotation
        const double fr = 40.0, peak = 1270.0, Ts = 36.6e-6;
        std::vector<double> t(2 * 1840);
        std::vector<cplx> u(t.size());
        for (std::size_t m = 0; m < t.size(); ++m) {
            t[m] = static_cast<double>(m + 1) * Ts;
            u[m] = std::polar(1.0, peak / fr * std::sin(2 * pi * fr * t[m]));
        }
        const auto spec = stft(u, t, {});
        CHECK(std::abs(flash_period(spec) - 1.0 / fr) <= 4 * Ts);
    }
    SUBCASE("no rotor") {
        TrialSetup s = long_desk();
        s.scene.terms = {true, false, false};
        const auto sc = make_scenario(s);
        const auto spec = stft(sc.s_uav.samples, sc.s_uav.timeline, {});
        CHECK_THROWS_AS(flash_period(spec), EstimationError);
    }
}

TEST_CASE("vibration suppression") {
    const Scenario& sc = reference();
    const auto& t = sc.s_uav.timeline;
    const double rotor_only = vibration_suppression(sc.rotation, sc.rotation, sc.vibration, t);
    const double raw = vibration_suppression(sc.s_uav.samples, sc.rotation, sc.vibration, t);
    const double vib_only = vibration_suppression(sc.vibration, sc.rotation, sc.vibration, t);
    CHECK(rotor_only > raw);
    CHECK(vib_only < raw);
    CHECK(rotor_only >= 15.0);
}
