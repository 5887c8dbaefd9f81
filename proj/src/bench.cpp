#include "uavmd/bench.hpp"
#include "uavmd/error.hpp"
#include "uavmd/kernels.hpp"
#include "uavmd/random.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <thread>

namespace uavmd {

double noise_for_snr(std::span<const cplx> s, double snr_db) {
    if (s.empty()) throw ParameterError("noise_for_snr: empty signal");
    double p = 0.0;
    for (const cplx& z : s) p += std::norm(z);
    if (!(p > 0)) throw ParameterError("noise_for_snr: zero signal");
    return p / (static_cast<double>(s.size()) * std::pow(10.0, snr_db / 10.0));
}

TrialSetup desk_setup() {
    TrialSetup t;
    t.frame.num_subcarriers = 512;
    t.frame.num_symbols = 512;
    return t;
}

Scenario make_scenario(const TrialSetup& setup, ComplexMatrix* csi_out) {
    const auto timeline = build_timeline(setup.frame);
    const std::size_t N = setup.frame.num_subcarriers, M = timeline.size();
    const auto parts = synthesize_components(setup.scene, timeline);
    const auto kd = parts.total();
    const auto kr = kr_vector(N, setup.frame.subcarrier_spacing, setup.scene.body.initial_range);
    const auto tx = make_tx_grid(N, M, setup.grid_seed);
    const auto csi = estimate_csi(apply_channel(tx, kr, kd, 0.0, 0), tx);
    Scenario sc;
    sc.s_uav = detect_and_extract(range_profile(csi, setup.frame.subcarrier_spacing), timeline);
    if (csi_out) *csi_out = csi.data;
    const cplx g = sc.s_uav.bulk_gain;
    auto scaled = [&](const std::vector<cplx>& v) {
        std::vector<cplx> out(v.size());
        for (std::size_t m = 0; m < v.size(); ++m) out[m] = g * v[m];
        return out;
    };
    sc.translation = scaled(parts.translation);
    sc.vibration = scaled(parts.vibration);
    sc.rotation = scaled(parts.rotation);
    return sc;
}

double correlation(std::span<const cplx> a, std::span<const cplx> b) {
    if (a.size() != b.size()) throw ParameterError("correlation: length mismatch");
    cplx ip{};
    double na = 0.0, nb = 0.0;
    for (std::size_t m = 0; m < a.size(); ++m) {
        ip += a[m] * std::conj(b[m]);
        na += std::norm(a[m]);
        nb += std::norm(b[m]);
    }
    if (!(na > 0 && nb > 0)) return 0.0;
    return std::abs(ip) / std::sqrt(na * nb);
}

double relative_rmse(std::span<const cplx> estimate, std::span<const cplx> truth) {
    if (estimate.size() != truth.size()) throw ParameterError("relative_rmse: length mismatch");
    double num = 0.0, den = 0.0;
    for (std::size_t m = 0; m < truth.size(); ++m) {
        num += std::norm(estimate[m] - truth[m]);
        den += std::norm(truth[m]);
    }
    if (!(den > 0)) throw ParameterError("relative_rmse: zero reference");
    return std::sqrt(num / den);
}

std::vector<cplx> mix_scenario(const Scenario& sc, const TrialSetup& setup, double snr_db, std::uint64_t seed,
                               std::uint64_t cell) {
    Rng rng = substream(seed, cell);
    const auto& s = sc.s_uav.samples;
    ClutterConfig cc;
    double power = 0.0;
    for (const cplx& z : s) power += std::norm(z);
    power /= static_cast<double>(s.size());
    if (setup.clutter) cc.scatterers = make_clutter(setup.clutter_count, setup.clutter_csr_db, power, rng);
    cc.noise_var = std::isfinite(snr_db) ? noise_for_snr(s, snr_db) : 0.0;
    return add_clutter(sc.s_uav, cc, rng()).samples;
}

TrialOutcome run_trial(const Scenario& sc, const TrialSetup& setup, Variant variant, double snr_db,
                       std::uint64_t seed, std::uint64_t cell) {
    TrialOutcome out;
    out.s_mix = mix_scenario(sc, setup, snr_db, seed, cell);
    try {
        out.output = decompose(out.s_mix, setup.passes, variant, setup.solver, setup.chain);
    } catch (const NumericalError&) {
        return out;
    }
    out.ok = true;
    out.converged = std::all_of(out.output.diagnostics.begin(), out.output.diagnostics.end(),
                                [](const PassDiagnostics& d) { return d.re.converged && d.im.converged; });
    double best = -1.0;
    for (std::size_t k = 0; k < out.output.components.size(); ++k) {
        const double c = correlation(out.output.components[k], sc.rotation);
        if (c > best) {
            best = c;
            out.selected = k;
        }
    }
    out.rmse = relative_rmse(out.output.components[out.selected], sc.rotation);
    return out;
}

std::size_t default_workers() {
    if (const char* env = std::getenv("UAVMD_WORKERS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
        throw ConfigError(std::string("UAVMD_WORKERS must be a positive integer, got '") + env + "'");
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

// Cell key depends on the SNR value and trial index only, so every variant
// sees the same clutter and noise realisations.
std::uint64_t cell_key(double snr_db, std::size_t trial) {
    return std::bit_cast<std::uint64_t>(snr_db) * 0x9E3779B97F4A7C15ull + trial;
}

template <class F>
void parallel_for(std::size_t n, std::size_t workers, F&& body) {
    workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(n, 1));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i; (i = next.fetch_add(1)) < n;) body(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

} // namespace

PointResult rmse_point(const Scenario& sc, const TrialSetup& setup, Variant variant, double snr_db,
                       std::size_t trials, std::uint64_t seed, std::size_t workers) {
    if (trials == 0) throw ParameterError("rmse_point: trials must be at least 1");
    std::vector<TrialOutcome> outcomes(trials);
    parallel_for(trials, workers ? workers : default_workers(), [&](std::size_t i) {
        auto o = run_trial(sc, setup, variant, snr_db, seed, cell_key(snr_db, i));
        o.output = {};
        o.s_mix = {};
        outcomes[i] = std::move(o);
    });
    PointResult r;
    r.variant = variant;
    r.snr_db = snr_db;
    r.trials = trials;
    std::vector<double> e;
    std::size_t conv = 0;
    for (const auto& o : outcomes) {
        if (!o.ok) {
            ++r.failures;
            continue;
        }
        e.push_back(o.rmse);
        if (o.converged) ++conv;
    }
    r.convergence_rate = static_cast<double>(conv) / static_cast<double>(trials);
    if (!e.empty()) {
        r.mean_rmse = std::accumulate(e.begin(), e.end(), 0.0) / static_cast<double>(e.size());
        double v = 0.0;
        for (double x : e) v += (x - r.mean_rmse) * (x - r.mean_rmse);
        r.std_rmse = std::sqrt(v / static_cast<double>(e.size()));
    } else {
        r.mean_rmse = std::numeric_limits<double>::quiet_NaN();
        r.std_rmse = std::numeric_limits<double>::quiet_NaN();
    }
    return r;
}

void SweepConfig::validate() const {
    if (snr_grid.empty()) throw ConfigError("sweep: SNR grid is empty");
    if (trials == 0) throw ConfigError("sweep: trials must be at least 1");
    if (variants.empty()) throw ConfigError("sweep: no variants selected");
}

std::vector<double> snr_range(double lo, double hi, double step) {
    if (!(step > 0)) throw ConfigError("sweep: SNR step must be positive");
    if (hi < lo) throw ConfigError("sweep: SNR max below SNR min");
    std::vector<double> g;
    const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9));
    for (std::size_t i = 0; i <= n; ++i) g.push_back(lo + static_cast<double>(i) * step);
    return g;
}

std::vector<PointResult> sweep(const SweepConfig& cfg, const std::function<void(const PointResult&)>& on_row) {
    cfg.validate();
    const Scenario sc = make_scenario(cfg.setup);
    std::vector<PointResult> rows;
    for (Variant v : cfg.variants)
        for (double snr : cfg.snr_grid) {
            rows.push_back(rmse_point(sc, cfg.setup, v, snr, cfg.trials, cfg.seed, cfg.workers));
            if (on_row) on_row(rows.back());
        }
    return rows;
}

void write_sweep_header(const std::filesystem::path& path) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw IoError("cannot open " + path.string() + " for writing");
    f << "variant,snr_db,mean_rmse,std_rmse,convergence_rate\n";
    if (!f) throw IoError("write failed: " + path.string());
}

void append_sweep_row(const std::filesystem::path& path, const PointResult& row) {
    const std::string line = fmt::format("{},{:g},{:.6f},{:.6f},{:.4f}\n", to_string(row.variant), row.snr_db,
                                         row.mean_rmse, row.std_rmse, row.convergence_rate);
    std::ofstream f(path, std::ios::app);
    if (!f) throw IoError("cannot open " + path.string() + " for appending");
    f.write(line.data(), static_cast<std::streamsize>(line.size()));
    f.flush();
    if (!f) throw IoError("write failed: " + path.string());
}

double flash_period(const Spectrogram& spec, double band_edge_hz, double min_peak) {
    const std::size_t K = spec.values.rows(), F = spec.values.cols();
    if (F < 4) throw EstimationError("flash_period: too few frames");
    std::vector<double> b(F, 0.0);
    for (std::size_t f = 0; f < F; ++f) {
        double hi = 0.0, lo = 0.0, all = 0.0;
        for (std::size_t i = 0; i < K; ++i) {
            const double e = std::norm(spec.values(i, f));
            all += e;
            if (spec.freq_axis[i] > band_edge_hz) hi += e;
            if (spec.freq_axis[i] < -band_edge_hz) lo += e;
        }
        b[f] = all > 0 ? (hi - lo) / all : 0.0;
    }
    const double mean = std::accumulate(b.begin(), b.end(), 0.0) / static_cast<double>(F);
    double var = 0.0;
    for (double& x : b) {
        x -= mean;
        var += x * x;
    }
    // The balance is a fraction of frame energy; below this spread there is
    // no high-band activity to speak of.
    if (std::sqrt(var / static_cast<double>(F)) < 1e-3)
        throw EstimationError("flash_period: no high-band activity");
    std::vector<double> rho(F / 2 + 1);
    for (std::size_t l = 0; l < rho.size(); ++l) {
        double acc = 0.0;
        for (std::size_t f = 0; f + l < F; ++f) acc += b[f] * b[f + l];
        // unbiased, so the taper does not pull long-lag peaks inward
        rho[l] = acc / static_cast<double>(F - l) / (var / static_cast<double>(F));
    }
    std::size_t l = 1;
    while (l + 1 < rho.size() && rho[l] >= 0.0) ++l;
    for (; l + 1 < rho.size(); ++l) {
        if (rho[l] >= rho[l - 1] && rho[l] >= rho[l + 1] && rho[l] >= min_peak) {
            const double a = rho[l - 1], c = rho[l], d = rho[l + 1];
            const double den = a - 2 * c + d;
            const double shift = den != 0.0 ? 0.5 * (a - d) / den : 0.0;
            const double frame_step = (spec.time_axis.back() - spec.time_axis.front()) / static_cast<double>(F - 1);
            return (static_cast<double>(l) + shift) * frame_step;
        }
    }
    throw EstimationError("flash_period: no significant periodicity");
}

double vibration_suppression(std::span<const cplx> component, std::span<const cplx> rotor,
                             std::span<const cplx> vibration, std::span<const double> timeline, const StftConfig& cfg,
                             double floor_db) {
    auto power = [&](std::span<const cplx> x) {
        const Spectrogram s = stft(x, timeline, cfg);
        std::vector<double> p(s.values.size());
        kernels::norm_sq(s.values.flat(), p);
        return p;
    };
    const auto Su = power(component), Sr = power(rotor), Sv = power(vibration);
    const double rmax = *std::max_element(Sr.begin(), Sr.end());
    const double vmax = *std::max_element(Sv.begin(), Sv.end());
    const double floor = std::pow(10.0, floor_db / 10.0);
    double rs = 0.0, vs = 0.0;
    std::size_t rn = 0, vn = 0;
    for (std::size_t i = 0; i < Su.size(); ++i) {
        if (Sr[i] >= Sv[i] && Sr[i] > rmax * floor) rs += Su[i], ++rn;
        else if (Sv[i] > Sr[i] && Sv[i] > vmax * floor) vs += Su[i], ++vn;
    }
    if (rn == 0) throw EstimationError("vibration_suppression: empty rotor band");
    const double rmean = rs / static_cast<double>(rn);
    const double vmean = vn ? vs / static_cast<double>(vn) : 0.0;
    // Capped at 300 dB when the vibration band is empty or silent.
    return 10.0 * std::log10(std::max(rmean, 1e-300) / std::max(vmean, rmean * 1e-30));
}

} // namespace uavmd
