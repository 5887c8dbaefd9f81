#include "uavmd/ranging.hpp"
#include "uavmd/error.hpp"
#include "uavmd/fft.hpp"
#include "uavmd/kernels.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>

namespace uavmd {

double range_resolution(double bandwidth) {
    if (!(bandwidth > 0)) throw ParameterError("range_resolution: bandwidth must be positive");
    return speed_of_light / (2.0 * bandwidth);
}

RangeProfileMatrix range_profile(const ResourceGrid& csi, double subcarrier_spacing) {
    const std::size_t N = csi.data.rows();
    if (N == 0 || csi.data.cols() == 0) throw ParameterError("range_profile: empty grid");
    RangeProfileMatrix out{csi.data, range_resolution(static_cast<double>(N) * subcarrier_spacing)};
    fft::backward_columns(out.data);
    const double scale = 1.0 / static_cast<double>(N);
    for (cplx& z : out.data.flat()) z *= scale;
    return out;
}

SlowTimeSignal detect_and_extract(const RangeProfileMatrix& trm, std::span<const double> timeline) {
    const std::size_t K = trm.data.rows(), M = trm.data.cols();
    if (timeline.size() != M) throw ParameterError("detect_and_extract: timeline length != M");
    std::size_t best = 0;
    double best_mag = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
        const double mag = kernels::abs_sum(trm.data.row(k));
        if (mag > best_mag) {
            best_mag = mag;
            best = k;
        }
    }
    if (!(best_mag > 0)) throw DetectionError("detect_and_extract: range profile is all zero");

    SlowTimeSignal s;
    s.samples.assign(trm.data.row(best).begin(), trm.data.row(best).end());
    s.timeline.assign(timeline.begin(), timeline.end());
    s.origin_bin = best;
    // column sums, accumulated row by row
    std::vector<cplx> c0(M);
    for (std::size_t k = 0; k < K; ++k) {
        const auto row = trm.data.row(k);
        for (std::size_t m = 0; m < M; ++m) c0[m] += row[m];
    }
    cplx num{};
    double den = 0.0;
    for (std::size_t m = 0; m < M; ++m) {
        num += s.samples[m] * std::conj(c0[m]);
        den += std::norm(c0[m]);
    }
    s.bulk_gain = den > 0 ? num / den : cplx{};
    return s;
}

std::vector<cplx> make_clutter(std::size_t count, double csr_db, double signal_power, Rng& rng) {
    if (count == 0) return {};
    if (!(signal_power > 0)) throw ParameterError("make_clutter: signal power must be positive");
    boost::random::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<cplx> c(count);
    cplx sum{};
    for (cplx& z : c) {
        z = std::polar(0.5 + u(rng), 2 * pi * u(rng));
        sum += z;
    }
    // Degenerate draws (near-cancelling phases) are rescaled like any other.
    const double target = signal_power * std::pow(10.0, csr_db / 10.0);
    const double scale = std::sqrt(target / std::max(std::norm(sum), 1e-300));
    for (cplx& z : c) z *= scale;
    return c;
}

SlowTimeSignal add_clutter(const SlowTimeSignal& s, const ClutterConfig& cfg, std::uint64_t noise_seed) {
    if (cfg.noise_var < 0) throw ParameterError("add_clutter: negative noise variance");
    SlowTimeSignal out = s;
    cplx offset{};
    for (const cplx& c : cfg.scatterers) offset += c;
    for (cplx& z : out.samples) z += offset;
    if (cfg.noise_var > 0) {
        Rng rng = substream(noise_seed, 0);
        ComplexNormal noise(cfg.noise_var);
        for (cplx& z : out.samples) z += noise(rng);
    }
    return out;
}

RangeDopplerMap range_doppler_map(const ResourceGrid& csi, std::span<const double> timeline,
                                  double subcarrier_spacing, double carrier_frequency) {
    const std::size_t N = csi.data.rows(), M = csi.data.cols();
    if (timeline.size() != M) throw ParameterError("range_doppler_map: timeline length != M");
    if (M < 2 || !is_uniform(timeline))
        throw UnsupportedModeError("range_doppler_map: Doppler axis needs a uniform timeline");
    const double Ts = timeline[1] - timeline[0];
    const double lambda = speed_of_light / carrier_frequency;

    RangeProfileMatrix trm = range_profile(csi, subcarrier_spacing);
    fft::forward_rows(trm.data);

    RangeDopplerMap map;
    map.data = ComplexMatrix(N, M);
    const std::size_t half = M / 2;
    for (std::size_t k = 0; k < N; ++k) {
        auto src = trm.data.row(k);
        auto dst = map.data.row(k);
        for (std::size_t j = 0; j < M; ++j) dst[j] = src[(j + M - half) % M];
    }
    map.range_bin_size = trm.range_bin_size;
    map.velocity_bin_size = lambda / (2.0 * static_cast<double>(M) * Ts);
    map.range_axis.resize(N);
    for (std::size_t k = 0; k < N; ++k) map.range_axis[k] = static_cast<double>(k) * map.range_bin_size;
    map.doppler_axis.resize(M);
    map.velocity_axis.resize(M);
    for (std::size_t j = 0; j < M; ++j) {
        const double f = (static_cast<double>(j) - static_cast<double>(half)) / (static_cast<double>(M) * Ts);
        map.doppler_axis[j] = f;
        map.velocity_axis[j] = -f * lambda / 2.0;
    }
    return map;
}

void write_magnitude_csv(const std::filesystem::path& path, const ComplexMatrix& m, std::span<const double> row_axis,
                         std::span<const double> col_axis, const char* row_label) {
    if (row_axis.size() != m.rows() || col_axis.size() != m.cols())
        throw ParameterError("write_magnitude_csv: axis length mismatch");
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw IoError("cannot open " + path.string() + " for writing");
    f << row_label;
    for (double c : col_axis) f << fmt::format(",{:.9g}", c);
    f << '\n';
    for (std::size_t r = 0; r < m.rows(); ++r) {
        f << fmt::format("{:.9g}", row_axis[r]);
        for (const cplx& z : m.row(r)) f << fmt::format(",{:.6f}", 10.0 * std::log10(std::max(std::norm(z), 1e-300)));
        f << '\n';
    }
    if (!f) throw IoError("write failed: " + path.string());
}

} // namespace uavmd
