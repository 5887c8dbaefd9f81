#include "uavmd/grid.hpp"
#include "uavmd/error.hpp"
#include "uavmd/kernels.hpp"
#include "uavmd/random.hpp"

#include <algorithm>
#include <cmath>

namespace uavmd {

void FrameConfig::validate() const {
    if (!(subcarrier_spacing > 0)) throw ConfigError("frame: subcarrier spacing must be positive");
    if (!(symbol_duration > 1.0 / subcarrier_spacing))
        throw ConfigError("frame: symbol duration must exceed 1/subcarrier_spacing");
    if (!(cpi_duration > 0)) throw ConfigError("frame: cpi duration must be positive");
    if (!(bandwidth > 0)) throw ConfigError("frame: bandwidth must be positive");
    if (num_subcarriers == 0) throw ConfigError("frame: subcarrier count must be positive");
    if (sampling_mode == SamplingMode::tdd_gapped) {
        if (tdd_pattern.empty() || tdd_pattern.find_first_not_of("DSU") != std::string::npos)
            throw ConfigError("frame: tdd pattern must use only D, S, U");
        if (!(cycle_duration > 0)) throw ConfigError("frame: cycle duration must be positive");
        const double cycles = cpi_duration / cycle_duration;
        if (std::abs(cycles - std::round(cycles)) > 1e-9 * cycles || std::round(cycles) < 1)
            throw ConfigError("frame: cpi duration must be a positive multiple of the cycle duration");
    }
}

std::size_t nominal_sensing_symbols_per_cycle(const FrameConfig& cfg) {
    const auto d = static_cast<std::size_t>(std::count(cfg.tdd_pattern.begin(), cfg.tdd_pattern.end(), 'D'));
    const auto s = static_cast<std::size_t>(std::count(cfg.tdd_pattern.begin(), cfg.tdd_pattern.end(), 'S'));
    return d * cfg.symbols_per_slot + s * cfg.special_dl_symbols;
}

std::vector<double> build_timeline(const FrameConfig& cfg) {
    cfg.validate();
    const double Ts = cfg.symbol_duration;
    // Counts are rounded to absorb representation error in cpi/Ts.
    const auto fit = static_cast<std::size_t>(std::floor(cfg.cpi_duration / Ts + 1e-9));
    std::vector<double> t;
    if (cfg.sampling_mode == SamplingMode::uniform) {
        const std::size_t M = cfg.num_symbols > 0 ? cfg.num_symbols : fit;
        t.reserve(M);
        for (std::size_t m = 1; m <= M; ++m) t.push_back(static_cast<double>(m) * Ts);
    } else {
        const double slot = cfg.cycle_duration / static_cast<double>(cfg.tdd_pattern.size());
        for (std::size_t m = 1; m <= fit; ++m) {
            const double tm = static_cast<double>(m) * Ts;
            const double tau = tm - std::floor(tm / cfg.cycle_duration) * cfg.cycle_duration;
            const auto k = std::min(static_cast<std::size_t>(tau / slot), cfg.tdd_pattern.size() - 1);
            const char kind = cfg.tdd_pattern[k];
            const double into = tau - static_cast<double>(k) * slot;
            if (kind == 'D' || (kind == 'S' && into < static_cast<double>(cfg.special_dl_symbols) * Ts))
                t.push_back(tm);
        }
    }
    if (t.empty()) throw ConfigError("frame: timeline is empty");
    return t;
}

bool is_uniform(std::span<const double> timeline) {
    if (timeline.size() < 3) return true;
    const double step = timeline[1] - timeline[0];
    for (std::size_t m = 2; m < timeline.size(); ++m)
        if (std::abs((timeline[m] - timeline[m - 1]) - step) > 1e-9 * std::abs(step)) return false;
    return true;
}

ResourceGrid make_tx_grid(std::size_t N, std::size_t M, std::uint64_t seed) {
    if (N == 0 || M == 0) throw ParameterError("make_tx_grid: dimensions must be positive");
    static const cplx symbols[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    ResourceGrid g{ComplexMatrix(N, M), GridRole::tx};
    // One stream per symbol; columns go in blocks so the row-major writes stay local.
    constexpr std::size_t block = 16;
    std::vector<Rng> rngs;
    std::uint64_t bits[block];
    for (std::size_t m0 = 0; m0 < M; m0 += block) {
        const std::size_t w = std::min(block, M - m0);
        rngs.clear();
        for (std::size_t j = 0; j < w; ++j) rngs.push_back(substream(seed, m0 + j));
        for (std::size_t n = 0; n < N; ++n) {
            auto row = g.data.row(n);
            for (std::size_t j = 0; j < w; ++j) {
                if (n % 32 == 0) bits[j] = rngs[j]();
                row[m0 + j] = symbols[bits[j] & 3u];
                bits[j] >>= 2;
            }
        }
    }
    return g;
}

std::vector<cplx> kr_vector(std::size_t N, double subcarrier_spacing, double range) {
    if (!(range > 0)) throw ParameterError("kr_vector: range must be positive");
    std::vector<cplx> k(N);
    const double step = -2 * pi * subcarrier_spacing * 2 * range / speed_of_light;
    for (std::size_t n = 0; n < N; ++n) k[n] = std::polar(1.0, step * static_cast<double>(n));
    return k;
}

ResourceGrid apply_channel(const ResourceGrid& tx, std::span<const cplx> kr, std::span<const cplx> kd,
                           double noise_var, std::uint64_t noise_seed) {
    const std::size_t N = tx.data.rows(), M = tx.data.cols();
    if (kr.size() != N || kd.size() != M) throw ParameterError("apply_channel: dimension mismatch");
    if (noise_var < 0) throw ParameterError("apply_channel: negative noise variance");
    ResourceGrid rx{ComplexMatrix(N, M), GridRole::rx};
    std::vector<cplx> theta(M);
    ComplexNormal noise(noise_var > 0 ? noise_var : 1.0);
    for (std::size_t n = 0; n < N; ++n) {
        // spelled out so the compiler keeps it inline (no NaN-recovery call)
        const double ar = kr[n].real(), ai = kr[n].imag();
        for (std::size_t m = 0; m < M; ++m)
            theta[m] = {ar * kd[m].real() - ai * kd[m].imag(), ar * kd[m].imag() + ai * kd[m].real()};
        kernels::cmul(tx.data.row(n), theta, rx.data.row(n));
        if (noise_var > 0) {
            Rng rng = substream(noise_seed, n);
            for (cplx& z : rx.data.row(n)) z += noise(rng);
        }
    }
    return rx;
}

ResourceGrid apply_channel(const ResourceGrid& tx, const UavScene& scene, std::span<const double> timeline,
                           double subcarrier_spacing, double noise_var, std::uint64_t noise_seed) {
    if (timeline.size() != tx.data.cols()) throw ParameterError("apply_channel: timeline length != M");
    const auto kd = synthesize_slow_time(scene, timeline);
    const auto kr = kr_vector(tx.data.rows(), subcarrier_spacing, scene.body.initial_range);
    return apply_channel(tx, kr, kd, noise_var, noise_seed);
}

ResourceGrid estimate_csi(const ResourceGrid& rx, const ResourceGrid& tx) {
    if (rx.data.rows() != tx.data.rows() || rx.data.cols() != tx.data.cols())
        throw ParameterError("estimate_csi: dimension mismatch");
    ResourceGrid csi{ComplexMatrix(rx.data.rows(), rx.data.cols()), GridRole::csi};
    for (std::size_t n = 0; n < rx.data.rows(); ++n) {
        kernels::cdiv(rx.data.row(n), tx.data.row(n), csi.data.row(n));
        // a zero symbol shows up as inf or nan in its row
        if (!std::isfinite(kernels::abs_sum(csi.data.row(n)))) {
            for (const cplx& z : tx.data.row(n))
                if (z == cplx{}) throw ParameterError("estimate_csi: zero transmit symbol");
            throw ParameterError("estimate_csi: non-finite received sample");
        }
    }
    return csi;
}

} // namespace uavmd
