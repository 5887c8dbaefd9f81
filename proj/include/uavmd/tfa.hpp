#pragma once

#include "uavmd/types.hpp"

#include <filesystem>
#include <span>
#include <vector>

namespace uavmd {

// Unit-energy Gaussian of odd length with standard deviation sigma samples.
std::vector<double> gaussian_window(std::size_t length, double sigma);

struct StftConfig {
    // sigma near 1/sqrt(peak chirp rate) of an 80 r/s, 0.5 m rotor at 3.5 GHz
    std::vector<double> window = gaussian_window(257, 10.0);
    std::size_t hop = 4;
    std::size_t fft_size = 1024;
    double threshold_ratio = 0.02; // default threshold as a fraction of max |S|

    void validate() const;
};

struct Spectrogram {
    ComplexMatrix values;   // frequency bins x frames, zero frequency in the middle row
    ComplexMatrix advanced; // same frames evaluated one sample later; empty after SET
    std::vector<double> freq_axis; // Hz
    std::vector<double> time_axis; // s, at frame centres
    std::vector<std::size_t> centers; // sample index of each frame centre
    double sample_interval = 0.0;
    StftConfig config;

    double bin_width() const { return 1.0 / (static_cast<double>(config.fft_size) * sample_interval); }
};

// Windowed transform with the demodulation factor taken relative to the frame
// centre, so a tone at f0 advances in phase by 2 pi f0 per unit time in every
// bin.
Spectrogram stft(std::span<const cplx> u, std::span<const double> timeline, const StftConfig& cfg);

// gamma_set = ratio * max |S|.
double default_threshold(const Spectrogram& spec, double ratio);

// Instantaneous frequency in Hz from the phase advance over one sample:
// arg(S(m+1) / S(m)) / (2 pi Ts). Cells with |S| <= gamma_set hold +infinity.
RealMatrix inst_freq(const Spectrogram& spec, double gamma_set);

// Keeps S where the estimated frequency falls inside the cell's own bin.
Spectrogram set_transform(const Spectrogram& spec, double gamma_set);

std::size_t count_nonzero(const Spectrogram& spec);
std::size_t count_above(const Spectrogram& spec, double gamma_set);

// Order-alpha Renyi entropy (bits) of the normalised |S|^2 distribution.
double renyi_entropy(const Spectrogram& spec, double alpha = 3.0);

// CSV: first row "freq_hz\\time_s" then the time axis; each later row is a
// frequency followed by 20 log10 |S| per frame (floored at -300 dB).
void write_spectrogram_csv(const std::filesystem::path& path, const Spectrogram& spec);

// 16-bit binary PGM. Row 0 is the highest frequency. dB values map linearly
// from [ceiling - dynamic_range_db, ceiling] onto [0, 65535]; the header
// comment records both ends. An all-zero spectrogram gives an all-zero image.
void write_spectrogram_pgm(const std::filesystem::path& path, const Spectrogram& spec,
                           double dynamic_range_db = 60.0);

} // namespace uavmd
