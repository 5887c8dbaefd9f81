#include <doctest.h>

#include "uavmd/config.hpp"
#include "uavmd/error.hpp"

#include <cmath>

using namespace uavmd;

TEST_CASE("defaults reproduce the reference scene") {
    const RunConfig cfg;
    cfg.validate();
    const UavScene s = cfg.make_scene();
    const UavScene r = reference_scene();
    CHECK(s.body.initial_range == r.body.initial_range);
    CHECK(s.body.vibration_azimuth == doctest::Approx(r.body.vibration_azimuth));
    CHECK(s.body.elevation == doctest::Approx(r.body.elevation));
    REQUIRE(s.blades.size() == 1);
    CHECK(s.blades[0].rotation_rate == 80.0);
    CHECK(s.link.transmit_power == doctest::Approx(r.link.transmit_power));
    CHECK(s.link.tx_gain == doctest::Approx(r.link.tx_gain));
    CHECK(s.link.carrier_frequency == 3.5e9);
    CHECK(cfg.frame.num_subcarriers == 3276);
    CHECK(cfg.frame.num_symbols == 1840);
    CHECK(cfg.frame.bandwidth == 100e6);
    CHECK(cfg.make_sweep().snr_grid.size() == 9);
    CHECK(cfg.make_sweep().setup.frame.num_subcarriers == 512);
}

TEST_CASE("parsing") {
    RunConfig cfg;
    apply_config_text(cfg, R"(
# comment
[scene]
range = 75      ; trailing comment
blades=2
rotation = no

[solver]
variant = amfm-nsp
max_iter = 40

[sweep]
variants = nsp, rmd-nsp

[run]
seed = 99
)");
    CHECK(cfg.scene.range == 75.0);
    CHECK(cfg.scene.blades == 2);
    CHECK(!cfg.scene.rotation);
    CHECK(cfg.solver.variant == Variant::amfm_nsp);
    CHECK(cfg.solver.cfg.max_iter == 40);
    REQUIRE(cfg.sweep.variants.size() == 2);
    CHECK(cfg.sweep.variants[0] == Variant::nsp);
    CHECK(cfg.seed == 99);
    const auto s = cfg.make_scene();
    REQUIRE(s.blades.size() == 2);
    CHECK(s.blades[1].initial_angle == doctest::Approx(pi));
    CHECK(!s.terms.rotation);

    apply_override(cfg, "frame.sampling_mode=tdd-gapped");
    CHECK(cfg.frame.sampling_mode == SamplingMode::tdd_gapped);
    apply_override(cfg, "scene.blades=0");
    CHECK(cfg.make_scene().blades.empty());
}

TEST_CASE("rejections") {
    RunConfig cfg;
    CHECK_THROWS_AS(apply_config_text(cfg, "[scene]\nwingspan = 3\n"), ConfigError);
    CHECK_THROWS_AS(apply_config_text(cfg, "[weather]\nwind = 3\n"), ConfigError);
    CHECK_THROWS_AS(apply_config_text(cfg, "range = 3\n"), ConfigError);
    CHECK_THROWS_AS(apply_config_text(cfg, "[scene]\nrange 3\n"), ConfigError);
    CHECK_THROWS_AS(apply_config_text(cfg, "[scene]\nrange = far\n"), ConfigError);
    CHECK_THROWS_AS(apply_config_text(cfg, "[scene\n"), ConfigError);
    CHECK_THROWS_AS(apply_override(cfg, "scene.range"), ConfigError);
    CHECK_THROWS_AS(apply_override(cfg, "solver.variant=vmd"), ConfigError);
    CHECK_THROWS_AS(apply_override(cfg, "frame.symbols=-4"), ConfigError);
    try {
        apply_config_text(cfg, "[scene]\n\nbogus = 1\n", "x.ini");
        FAIL("accepted an unknown key");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("x.ini:3") != std::string::npos);
    }

    RunConfig bad;
    bad.frame.symbol_duration = 1e-6;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = {};
    bad.scene.range = -1;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = {};
    bad.transform.window_length = 256;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = {};
    bad.sweep.snr_step = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/uavmd.ini"), IoError);
}

TEST_CASE("dump round trip") {
    RunConfig cfg;
    apply_override(cfg, "scene.velocity=0.1");
    apply_override(cfg, "solver.lambda2=123.456789012345");
    apply_override(cfg, "sweep.variants=amfm-nsp");
    apply_override(cfg, "frame.tdd_pattern=DDSUU");
    const std::string text = dump_config(cfg);
    RunConfig back;
    apply_config_text(back, text);
    CHECK(dump_config(back) == text);
    CHECK(back.solver.cfg.lambda2 == cfg.solver.cfg.lambda2);
    CHECK(back.scene.velocity == cfg.scene.velocity);
    CHECK(back.frame.tdd_pattern == "DDSUU");
}
