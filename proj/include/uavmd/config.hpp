#pragma once

#include "uavmd/bench.hpp"
#include "uavmd/grid.hpp"
#include "uavmd/nsp.hpp"
#include "uavmd/scene.hpp"
#include "uavmd/tfa.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace uavmd {

// Everything a command needs, in user units (dB, degrees). Defaults reproduce
// the reference scene at full scale.
struct RunConfig {
    struct Scene {
        double range = 50.0;                // m
        double velocity = 5.0;              // m/s, positive receding
        double body_rcs = 0.1;              // m^2
        double vibration_amplitude = 0.05;  // m
        double vibration_frequency = 100.0; // Hz
        double vibration_azimuth_deg = 10.0;
        double elevation_deg = 30.0;
        double azimuth_deg = 0.0;
        std::size_t blades = 1;
        double blade_length = 0.5;   // m
        double rotation_rate = 80.0; // r/s
        double blade_angle_deg = 0.0;
        double carrier_frequency = 3.5e9;
        double transmit_power_dbm = 28.0;
        double tx_gain_db = 18.0;
        double rx_gain_db = 18.0;
        double system_loss_db = 0.0;
        double path_loss_db = 0.0;
        bool translation = true;
        bool vibration = true;
        bool rotation = true;
    } scene;

    FrameConfig frame;

    struct Clutter {
        bool enabled = true;
        std::size_t count = 3;
        double csr_db = -20.0;
    } clutter;

    struct Noise {
        double snr_db = 30.0; // slow-time SNR of s_mix
    } noise;

    struct Solver {
        SolverConfig cfg;
        Variant variant = Variant::rmd_nsp;
        std::size_t passes = 3;
        PassChain chain = PassChain::refine;
    } solver;

    struct Transform {
        std::size_t window_length = 257;
        double window_sigma = 10.0; // samples
        std::size_t hop = 4;
        std::size_t fft_size = 1024;
        double threshold_ratio = 0.02;
    } transform;

    struct Sweep {
        double snr_min = -10.0;
        double snr_max = 30.0;
        double snr_step = 5.0;
        std::size_t trials = 20;
        std::vector<Variant> variants{Variant::rmd_nsp, Variant::amfm_nsp, Variant::nsp};
        std::size_t subcarriers = 512; // desk scale
        std::size_t symbols = 512;
        std::size_t workers = 0; // 0: UAVMD_WORKERS or hardware threads
    } sweep;

    std::uint64_t seed = 1;

    UavScene make_scene() const;
    StftConfig make_stft() const;
    TrialSetup make_trial_setup() const; // full-scale frame
    SweepConfig make_sweep() const;      // desk-scale frame

    // Throws ConfigError naming the offending key.
    void validate() const;
};

// Sectioned "key = value" text. '#' and ';' start comments. Unknown sections
// or keys raise ConfigError with the line number.
void apply_config_text(RunConfig& cfg, std::string_view text, std::string_view source = "<text>");

// "section.key=value"
void apply_override(RunConfig& cfg, std::string_view assignment);

void set_value(RunConfig& cfg, std::string_view section, std::string_view key, std::string_view value);

RunConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});

// Every key with its resolved value, in a form apply_config_text accepts.
std::string dump_config(const RunConfig& cfg);

} // namespace uavmd
