#pragma once

#include "uavmd/grid.hpp"
#include "uavmd/random.hpp"
#include "uavmd/types.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace uavmd {

// c / (2 B)
double range_resolution(double bandwidth);

struct RangeProfileMatrix {
    ComplexMatrix data;          // range bins x symbols
    double range_bin_size = 0.0; // m
};

// Column-wise inverse DFT of the CSI scaled by 1/N. Bin k sits at range
// k * c / (2 N df). Energy: sum |TRM|^2 = sum |CSI|^2 / N.
RangeProfileMatrix range_profile(const ResourceGrid& csi, double subcarrier_spacing);

struct SlowTimeSignal {
    std::vector<cplx> samples;
    std::vector<double> timeline;
    std::size_t origin_bin = 0;
    cplx bulk_gain{};
};

// Picks the bin with the largest slow-time-averaged magnitude and returns its
// row. bulk_gain is the least-squares ratio of that row to the per-symbol sum
// over all bins (the zero-frequency subcarrier), which equals d(k_p) for a
// target confined to one range cell.
SlowTimeSignal detect_and_extract(const RangeProfileMatrix& trm, std::span<const double> timeline);

struct ClutterConfig {
    std::vector<cplx> scatterers; // zero-Doppler complex returns
    double noise_var = 0.0;       // AWGN variance per sample
};

// Draws `count` clutter returns with random phases whose coherent sum has
// power signal_power * 10^(csr_db/10).
std::vector<cplx> make_clutter(std::size_t count, double csr_db, double signal_power, Rng& rng);

SlowTimeSignal add_clutter(const SlowTimeSignal& s, const ClutterConfig& cfg, std::uint64_t noise_seed);

struct RangeDopplerMap {
    ComplexMatrix data; // range bins x Doppler bins, Doppler centred
    std::vector<double> range_axis;    // m
    std::vector<double> doppler_axis;  // Hz, frequency of the slow-time phasor
    std::vector<double> velocity_axis; // m/s, range rate (positive receding)
    double range_bin_size = 0.0;
    double velocity_bin_size = 0.0;
};

RangeDopplerMap range_doppler_map(const ResourceGrid& csi, std::span<const double> timeline,
                                  double subcarrier_spacing, double carrier_frequency);

// Magnitude in dB, one line per row, with the column axis as the header.
void write_magnitude_csv(const std::filesystem::path& path, const ComplexMatrix& m, std::span<const double> row_axis,
                         std::span<const double> col_axis, const char* row_label);

} // namespace uavmd
