#include "uavmd/tfa.hpp"
#include "uavmd/error.hpp"
#include "uavmd/fft.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

namespace uavmd {

std::vector<double> gaussian_window(std::size_t length, double sigma) {
    if (length == 0 || length % 2 == 0) throw ParameterError("gaussian_window: length must be odd");
    if (!(sigma > 0)) throw ParameterError("gaussian_window: sigma must be positive");
    const double h = static_cast<double>(length - 1) / 2.0;
    std::vector<double> g(length);
    double e = 0.0;
    for (std::size_t i = 0; i < length; ++i) {
        const double n = (static_cast<double>(i) - h) / sigma;
        g[i] = std::exp(-0.5 * n * n);
        e += g[i] * g[i];
    }
    const double s = 1.0 / std::sqrt(e);
    for (double& v : g) v *= s;
    return g;
}

void StftConfig::validate() const {
    if (window.empty() || window.size() % 2 == 0) throw ParameterError("stft: window length must be odd");
    if (hop == 0) throw ParameterError("stft: hop must be at least 1");
    if (fft_size < window.size()) throw ParameterError("stft: fft size must be at least the window length");
    if (threshold_ratio < 0) throw ParameterError("stft: threshold must be non-negative");
}

namespace {

// Windowed segment around `center`, arranged so relative index 0 sits at
// buffer position 0. Samples outside the signal count as zero.
void frame(std::span<const cplx> u, std::ptrdiff_t center, std::span<const double> g, std::vector<cplx>& buf) {
    std::fill(buf.begin(), buf.end(), cplx{});
    const auto h = static_cast<std::ptrdiff_t>(g.size() / 2);
    const auto n = static_cast<std::ptrdiff_t>(buf.size());
    const auto len = static_cast<std::ptrdiff_t>(u.size());
    for (std::ptrdiff_t k = -h; k <= h; ++k) {
        const std::ptrdiff_t idx = center + k;
        if (idx < 0 || idx >= len) continue;
        buf[static_cast<std::size_t>((k + n) % n)] = u[static_cast<std::size_t>(idx)] * g[static_cast<std::size_t>(k + h)];
    }
    fft::forward(buf, buf);
}

void store_shifted(const std::vector<cplx>& buf, ComplexMatrix& m, std::size_t col) {
    const std::size_t n = buf.size(), half = n / 2;
    for (std::size_t i = 0; i < n; ++i) m(i, col) = buf[(i + half) % n];
}

} // namespace

Spectrogram stft(std::span<const cplx> u, std::span<const double> timeline, const StftConfig& cfg) {
    cfg.validate();
    const std::size_t M = u.size(), L = cfg.window.size(), h = L / 2;
    if (M < L) throw ParameterError("stft: signal shorter than the window");
    if (timeline.size() != M) throw ParameterError("stft: timeline length mismatch");

    Spectrogram s;
    s.config = cfg;
    s.sample_interval = M > 1 ? (timeline.back() - timeline.front()) / static_cast<double>(M - 1) : 1.0;
    for (std::size_t c = h; c + h < M; c += cfg.hop) s.centers.push_back(c);
    const std::size_t F = s.centers.size(), K = cfg.fft_size;
    s.values = ComplexMatrix(K, F);
    s.advanced = ComplexMatrix(K, F);
    std::vector<cplx> buf(K);
    for (std::size_t f = 0; f < F; ++f) {
        const auto c = static_cast<std::ptrdiff_t>(s.centers[f]);
        frame(u, c, cfg.window, buf);
        store_shifted(buf, s.values, f);
        frame(u, c + 1, cfg.window, buf);
        store_shifted(buf, s.advanced, f);
    }
    s.freq_axis.resize(K);
    for (std::size_t i = 0; i < K; ++i)
        s.freq_axis[i] = (static_cast<double>(i) - static_cast<double>(K / 2)) * s.bin_width();
    s.time_axis.resize(F);
    for (std::size_t f = 0; f < F; ++f) s.time_axis[f] = timeline[s.centers[f]];
    return s;
}

double default_threshold(const Spectrogram& spec, double ratio) {
    double mx = 0.0;
    for (const cplx& z : spec.values.flat()) mx = std::max(mx, std::abs(z));
    return ratio * mx;
}

RealMatrix inst_freq(const Spectrogram& spec, double gamma_set) {
    if (spec.advanced.size() != spec.values.size())
        throw ParameterError("inst_freq: spectrogram lacks the one-sample-advanced frames");
    const double inf = std::numeric_limits<double>::infinity();
    RealMatrix w(spec.values.rows(), spec.values.cols(), inf);
    const double k = 1.0 / (2 * pi * spec.sample_interval);
    for (std::size_t i = 0; i < w.rows; ++i)
        for (std::size_t f = 0; f < w.cols; ++f) {
            const cplx a = spec.values(i, f);
            if (std::abs(a) > gamma_set) w(i, f) = std::arg(spec.advanced(i, f) * std::conj(a)) * k;
        }
    return w;
}

Spectrogram set_transform(const Spectrogram& spec, double gamma_set) {
    const RealMatrix w = inst_freq(spec, gamma_set);
    Spectrogram out;
    out.values = ComplexMatrix(spec.values.rows(), spec.values.cols());
    out.freq_axis = spec.freq_axis;
    out.time_axis = spec.time_axis;
    out.centers = spec.centers;
    out.sample_interval = spec.sample_interval;
    out.config = spec.config;
    const double half = 0.5 * spec.bin_width();
    for (std::size_t i = 0; i < w.rows; ++i)
        for (std::size_t f = 0; f < w.cols; ++f)
            if (std::abs(spec.freq_axis[i] - w(i, f)) < half) out.values(i, f) = spec.values(i, f);
    return out;
}

std::size_t count_nonzero(const Spectrogram& spec) {
    return static_cast<std::size_t>(
        std::count_if(spec.values.flat().begin(), spec.values.flat().end(), [](const cplx& z) { return z != cplx{}; }));
}

std::size_t count_above(const Spectrogram& spec, double gamma_set) {
    return static_cast<std::size_t>(std::count_if(spec.values.flat().begin(), spec.values.flat().end(),
                                                  [&](const cplx& z) { return std::abs(z) > gamma_set; }));
}

double renyi_entropy(const Spectrogram& spec, double alpha) {
    if (!(alpha > 0) || alpha == 1.0) throw ParameterError("renyi_entropy: alpha must be positive and not 1");
    double total = 0.0;
    for (const cplx& z : spec.values.flat()) total += std::norm(z);
    if (!(total > 0)) throw ParameterError("renyi_entropy: empty spectrogram");
    double acc = 0.0;
    for (const cplx& z : spec.values.flat()) {
        const double p = std::norm(z) / total;
        if (p > 0) acc += std::pow(p, alpha);
    }
    return std::log2(acc) / (1.0 - alpha);
}

namespace {
double to_db(const cplx& z) { return std::max(20.0 * std::log10(std::abs(z)), -300.0); }
} // namespace

void write_spectrogram_csv(const std::filesystem::path& path, const Spectrogram& spec) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw IoError("cannot open " + path.string() + " for writing");
    f << "freq_hz\\time_s";
    for (double t : spec.time_axis) f << fmt::format(",{:.9g}", t);
    f << '\n';
    for (std::size_t i = 0; i < spec.values.rows(); ++i) {
        f << fmt::format("{:.9g}", spec.freq_axis[i]);
        for (const cplx& z : spec.values.row(i)) f << fmt::format(",{:.4f}", to_db(z));
        f << '\n';
    }
    if (!f) throw IoError("write failed: " + path.string());
}

void write_spectrogram_pgm(const std::filesystem::path& path, const Spectrogram& spec, double dynamic_range_db) {
    if (!(dynamic_range_db > 0)) throw ParameterError("pgm: dynamic range must be positive");
    const std::size_t H = spec.values.rows(), W = spec.values.cols();
    double peak = 0.0;
    for (const cplx& z : spec.values.flat()) peak = std::max(peak, std::abs(z));
    const double ceiling = peak > 0 ? 20.0 * std::log10(peak) : -300.0;
    const double floor = ceiling - dynamic_range_db;
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open " + path.string() + " for writing");
    f << fmt::format("P5\n# floor_db={:.4f} ceiling_db={:.4f} rows=frequency(high to low) cols=frame\n{} {}\n65535\n",
                     floor, ceiling, W, H);
    std::vector<unsigned char> row(2 * W);
    for (std::size_t r = 0; r < H; ++r) {
        const std::size_t i = H - 1 - r;
        for (std::size_t c = 0; c < W; ++c) {
            const cplx z = spec.values(i, c);
            double level = 0.0;
            if (peak > 0 && z != cplx{}) level = std::clamp((to_db(z) - floor) / dynamic_range_db, 0.0, 1.0);
            const auto v = static_cast<unsigned>(std::lround(level * 65535.0));
            row[2 * c] = static_cast<unsigned char>(v >> 8);
            row[2 * c + 1] = static_cast<unsigned char>(v & 0xFF);
        }
        f.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
    }
    if (!f) throw IoError("write failed: " + path.string());
}

} // namespace uavmd
