#pragma once

#include "uavmd/scene.hpp"
#include "uavmd/types.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace uavmd {

enum class SamplingMode { uniform, tdd_gapped };

struct FrameConfig {
    double subcarrier_spacing = 30e3;  // Hz
    double symbol_duration = 36.6e-6;  // s, useful part plus cyclic prefix
    std::string tdd_pattern = "DDDSU";
    double cycle_duration = 2.5e-3;    // s
    double cpi_duration = 0.1;         // s
    SamplingMode sampling_mode = SamplingMode::uniform;
    std::size_t num_symbols = 1840;    // uniform mode; 0 derives the count from cpi_duration
    std::size_t num_subcarriers = 3276;
    std::size_t symbols_per_slot = 14;
    std::size_t special_dl_symbols = 4; // downlink symbols at the head of an S slot
    double bandwidth = 100e6;          // Hz, nominal system bandwidth

    double cp_duration() const { return symbol_duration - 1.0 / subcarrier_spacing; }
    void validate() const;
};

// Nominal sensing-symbol count of one TDD cycle: full D slots plus the
// downlink head of each S slot.
std::size_t nominal_sensing_symbols_per_cycle(const FrameConfig& cfg);

std::vector<double> build_timeline(const FrameConfig& cfg);

// True when successive instants are evenly spaced (relative tolerance 1e-9).
bool is_uniform(std::span<const double> timeline);

enum class GridRole { tx, rx, csi };

struct ResourceGrid {
    ComplexMatrix data; // subcarriers x symbols
    GridRole role = GridRole::tx;
};

// Symbols from {1, j, -1, -j}. Column m draws from its own stream seeded by
// (seed, m), so columns can be generated independently.
ResourceGrid make_tx_grid(std::size_t N, std::size_t M, std::uint64_t seed);

std::vector<cplx> kr_vector(std::size_t N, double subcarrier_spacing, double range);

// D_RX = D_TX o (k_R k_D^T) + noise of variance noise_var per entry. Noise
// for subcarrier n comes from stream (noise_seed, n).
ResourceGrid apply_channel(const ResourceGrid& tx, std::span<const cplx> kr, std::span<const cplx> kd,
                           double noise_var, std::uint64_t noise_seed);

ResourceGrid apply_channel(const ResourceGrid& tx, const UavScene& scene, std::span<const double> timeline,
                           double subcarrier_spacing, double noise_var, std::uint64_t noise_seed);

ResourceGrid estimate_csi(const ResourceGrid& rx, const ResourceGrid& tx);

} // namespace uavmd
