#include "uavmd/bench.hpp"
#include "uavmd/config.hpp"
#include "uavmd/error.hpp"
#include "uavmd/io.hpp"
#include "uavmd/ranging.hpp"
#include "uavmd/tfa.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace uavmd;

namespace {

struct Common {
    std::string config;
    std::vector<std::string> overrides;
    std::string out;
};

void add_common(CLI::App* cmd, Common& c, const char* out_help) {
    cmd->add_option("-c,--config", c.config, "configuration file");
    cmd->add_option("--set", c.overrides, "override, section.key=value")->take_all();
    cmd->add_option("-o,--out", c.out, out_help)->required();
}

void make_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw IoError(fmt::format("cannot create directory {}: {}", dir.string(), ec.message()));
}

std::string command_line(int argc, char** argv) {
    std::string s;
    for (int i = 0; i < argc; ++i) {
        if (i) s += ' ';
        s += argv[i];
    }
    return s;
}

// The resolved config doubles as a re-runnable config file.
void write_manifest(const fs::path& path, const std::string& cmdline, const RunConfig& cfg,
                    const std::string& extra = {}) {
    std::string text = fmt::format("# {}\n", cmdline);
    if (!extra.empty()) text += extra;
    text += "\n" + dump_config(cfg);
    io::write_text(path, text);
}

std::vector<double> uniform_timeline(std::size_t M, double Ts) {
    std::vector<double> t(M);
    for (std::size_t m = 0; m < M; ++m) t[m] = static_cast<double>(m + 1) * Ts;
    return t;
}

ComplexMatrix stack_rows(const std::vector<std::vector<cplx>>& rows) {
    ComplexMatrix m(rows.size(), rows.empty() ? 0 : rows.front().size());
    for (std::size_t r = 0; r < rows.size(); ++r)
        std::copy(rows[r].begin(), rows[r].end(), m.row(r).begin());
    return m;
}

void simulate(const Common& c, const std::string& cmdline) {
    const RunConfig cfg = load_config(c.config, c.overrides);
    const fs::path dir = c.out;
    make_dir(dir);
    const TrialSetup setup = cfg.make_trial_setup();
    ComplexMatrix csi;
    const Scenario sc = make_scenario(setup, &csi);
    const auto s_mix = mix_scenario(sc, setup, cfg.noise.snr_db, cfg.seed, 0);
    io::write_cxm(dir / "csi.cxm", csi);
    io::write_cxm(dir / "s_uav.cxm", io::as_row(sc.s_uav.samples));
    io::write_cxm(dir / "s_mix.cxm", io::as_row(s_mix));
    io::write_cxm(dir / "truth_translation.cxm", io::as_row(sc.translation));
    io::write_cxm(dir / "truth_vibration.cxm", io::as_row(sc.vibration));
    io::write_cxm(dir / "truth_rotation.cxm", io::as_row(sc.rotation));
    std::string t;
    for (double x : sc.s_uav.timeline) t += fmt::format("{}\n", x);
    io::write_text(dir / "timeline.txt", t);
    write_manifest(dir / "manifest.ini", cmdline, cfg,
                   fmt::format("# csi {}x{}, range bin {}, samples {}\n", csi.rows(), csi.cols(),
                               sc.s_uav.origin_bin, sc.s_uav.samples.size()));
    fmt::print("wrote {} ({} subcarriers x {} symbols, target bin {})\n", dir.string(), csi.rows(), csi.cols(),
               sc.s_uav.origin_bin);
}

std::string diagnostics_text(const DecompositionOutput& out, Variant variant, std::span<const cplx> input) {
    std::string s = fmt::format("variant = {}\nchain = {}\npasses = {}\n", to_string(variant), to_string(out.chain),
                                out.components.size());
    const auto rec = out.reconstruct();
    double num = 0.0, den = 0.0;
    for (std::size_t m = 0; m < input.size(); ++m) {
        num += std::norm(rec[m] - input[m]);
        den += std::norm(input[m]);
    }
    s += fmt::format("reconstruction_error = {:.3e}\n", den > 0 ? std::sqrt(num / den) : std::sqrt(num));
    for (std::size_t k = 0; k < out.diagnostics.size(); ++k) {
        const auto& d = out.diagnostics[k];
        for (const auto& [part, x] : {std::pair{"re", &d.re}, std::pair{"im", &d.im}}) {
            s += fmt::format("pass {} {}: iterations = {} converged = {} gamma = {:.6e} lambda1 = {:.6e} change = {:.3e}\n",
                             k + 1, part, x->iterations, x->converged ? "yes" : "no", x->gamma, x->lambda1,
                             x->final_change);
        }
    }
    return s;
}

struct DecomposeArgs {
    std::string input, variant, chain;
    std::size_t passes = 0;
};

void decompose_cmd(const Common& c, const DecomposeArgs& a, const std::string& cmdline) {
    RunConfig cfg = load_config(c.config, c.overrides);
    if (!a.variant.empty()) set_value(cfg, "solver", "variant", a.variant);
    if (!a.chain.empty()) set_value(cfg, "solver", "chain", a.chain);
    if (a.passes) cfg.solver.passes = a.passes;
    cfg.validate();
    const auto s = io::as_vector(io::read_cxm(a.input));
    const fs::path dir = c.out;
    make_dir(dir);
    const auto out = decompose(s, cfg.solver.passes, cfg.solver.variant, cfg.solver.cfg, cfg.solver.chain);
    for (std::size_t k = 0; k < out.components.size(); ++k)
        io::write_cxm(dir / fmt::format("component_{}.cxm", k + 1), io::as_row(out.components[k]));
    io::write_cxm(dir / "components.cxm", stack_rows(out.components));
    io::write_cxm(dir / "residual.cxm", io::as_row(out.final_residual));
    const auto diag = diagnostics_text(out, cfg.solver.variant, s);
    io::write_text(dir / "diagnostics.txt", diag);
    write_manifest(dir / "manifest.ini", cmdline, cfg, fmt::format("# input {}\n", a.input));
    std::cout << diag;
}

struct SpectrogramArgs {
    std::string input, mode = "stft";
    double range_db = 60.0;
};

void spectrogram_cmd(const Common& c, const SpectrogramArgs& a, const std::string& cmdline) {
    const RunConfig cfg = load_config(c.config, c.overrides);
    if (a.mode != "stft" && a.mode != "set") throw ConfigError(fmt::format("unknown mode '{}'", a.mode));
    const auto s = io::as_vector(io::read_cxm(a.input));
    const auto timeline = uniform_timeline(s.size(), cfg.frame.symbol_duration);
    const fs::path dir = c.out;
    make_dir(dir);
    Spectrogram spec = stft(s, timeline, cfg.make_stft());
    const double gamma = default_threshold(spec, cfg.transform.threshold_ratio);
    const std::size_t above = count_above(spec, gamma);
    if (a.mode == "set") spec = set_transform(spec, gamma);
    write_spectrogram_csv(dir / (a.mode + ".csv"), spec);
    write_spectrogram_pgm(dir / (a.mode + ".pgm"), spec, a.range_db);
    const std::size_t nonzero = count_nonzero(spec);
    // entropy is undefined for an all-zero map
    const double entropy = nonzero ? renyi_entropy(spec) : std::numeric_limits<double>::quiet_NaN();
    const std::string summary =
        fmt::format("mode = {}\nframes = {}\nbins = {}\nfreq_min_hz = {}\nfreq_max_hz = {}\nthreshold = {:.6e}\n"
                    "above_threshold = {}\nnonzero = {}\nrenyi3_bits = {:.6f}\n",
                    a.mode, spec.time_axis.size(), spec.freq_axis.size(), spec.freq_axis.front(),
                    spec.freq_axis.back(), gamma, above, nonzero, entropy);
    io::write_text(dir / (a.mode + "_summary.txt"), summary);
    write_manifest(dir / (a.mode + "_manifest.ini"), cmdline, cfg, fmt::format("# input {}\n", a.input));
    std::cout << summary;
}

struct BenchArgs {
    std::optional<double> snr_min, snr_max, snr_step;
    std::optional<std::size_t> trials;
    std::string variants;
};

void bench_cmd(const Common& c, const BenchArgs& a, const std::string& cmdline) {
    RunConfig cfg = load_config(c.config, c.overrides);
    if (a.snr_min) cfg.sweep.snr_min = *a.snr_min;
    if (a.snr_max) cfg.sweep.snr_max = *a.snr_max;
    if (a.snr_step) cfg.sweep.snr_step = *a.snr_step;
    if (a.trials) cfg.sweep.trials = *a.trials;
    if (!a.variants.empty()) set_value(cfg, "sweep", "variants", a.variants);
    cfg.validate();
    const SweepConfig sw = cfg.make_sweep();
    const fs::path csv = c.out;
    if (csv.has_parent_path()) make_dir(csv.parent_path());
    fs::path manifest = csv;
    manifest += ".manifest.ini";
    write_manifest(manifest, cmdline, cfg);
    write_sweep_header(csv);
    fmt::print("{} SNR points x {} variants, {} trials each\n", sw.snr_grid.size(), sw.variants.size(), sw.trials);
    sweep(sw, [&](const PointResult& r) {
        append_sweep_row(csv, r);
        fmt::print("{} {:+.1f} dB  rmse {:.4f} +- {:.4f}  converged {:.2f}\n", to_string(r.variant), r.snr_db,
                   r.mean_rmse, r.std_rmse, r.convergence_rate);
        std::fflush(stdout);
    });
}

void range_doppler_cmd(const Common& c, const std::string& csi_path, const std::string& cmdline) {
    const RunConfig cfg = load_config(c.config, c.overrides);
    const fs::path dir = c.out;
    make_dir(dir);
    ResourceGrid csi;
    csi.role = GridRole::csi;
    if (!csi_path.empty()) {
        csi.data = io::read_cxm(csi_path);
    } else {
        make_scenario(cfg.make_trial_setup(), &csi.data);
    }
    const auto timeline = uniform_timeline(csi.data.cols(), cfg.frame.symbol_duration);
    const auto rd = range_doppler_map(csi, timeline, cfg.frame.subcarrier_spacing, cfg.scene.carrier_frequency);
    io::write_cxm(dir / "range_doppler.cxm", rd.data);
    write_magnitude_csv(dir / "range_doppler.csv", rd.data, rd.range_axis, rd.doppler_axis, "range_m\\doppler_hz");
    std::size_t br = 0, bd = 0;
    double best = -1.0;
    for (std::size_t r = 0; r < rd.data.rows(); ++r)
        for (std::size_t d = 0; d < rd.data.cols(); ++d)
            if (std::abs(rd.data(r, d)) > best) {
                best = std::abs(rd.data(r, d));
                br = r;
                bd = d;
            }
    const std::string summary = fmt::format(
        "range_resolution_m = {}\nrange_bin_m = {}\nvelocity_bin_mps = {}\npeak_range_m = {}\npeak_doppler_hz = {}\n"
        "peak_velocity_mps = {}\n",
        range_resolution(cfg.frame.bandwidth), rd.range_bin_size, rd.velocity_bin_size, rd.range_axis[br],
        rd.doppler_axis[bd], rd.velocity_axis[bd]);
    io::write_text(dir / "summary.txt", summary);
    write_manifest(dir / "manifest.ini", cmdline, cfg, csi_path.empty() ? "" : fmt::format("# csi {}\n", csi_path));
    std::cout << summary;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"UAV micro-Doppler simulation and decomposition"};
    app.require_subcommand(1);
    const std::string cmdline = command_line(argc, argv);

    Common sim_c, dec_c, spec_c, bench_c, rd_c;
    auto* sim = app.add_subcommand("simulate", "simulate CSI and slow-time signals");
    add_common(sim, sim_c, "output directory");

    DecomposeArgs dec_a;
    auto* dec = app.add_subcommand("decompose", "split a slow-time signal into components");
    dec->add_option("input", dec_a.input, "CXM1 file, 1xM or Mx1")->required();
    dec->add_option("--variant", dec_a.variant, "rmd-nsp, amfm-nsp or nsp");
    dec->add_option("--passes", dec_a.passes, "number of passes");
    dec->add_option("--chain", dec_a.chain, "refine or cascade");
    add_common(dec, dec_c, "output directory");

    SpectrogramArgs spec_a;
    auto* spec = app.add_subcommand("spectrogram", "STFT or SET of a slow-time signal");
    spec->add_option("input", spec_a.input, "CXM1 file, 1xM or Mx1")->required();
    spec->add_option("--mode", spec_a.mode, "stft or set");
    spec->add_option("--range-db", spec_a.range_db, "PGM dynamic range");
    add_common(spec, spec_c, "output directory");

    BenchArgs bench_a;
    auto* bench = app.add_subcommand("bench", "RMSE sweep over SNR");
    bench->add_option("--snr-min", bench_a.snr_min, "dB");
    bench->add_option("--snr-max", bench_a.snr_max, "dB");
    bench->add_option("--snr-step", bench_a.snr_step, "dB");
    bench->add_option("--trials", bench_a.trials, "trials per point");
    bench->add_option("--variants", bench_a.variants, "comma-separated variants");
    add_common(bench, bench_c, "output CSV");

    std::string rd_csi;
    auto* rd = app.add_subcommand("range-doppler", "range-Doppler map of simulated or stored CSI");
    rd->add_option("--csi", rd_csi, "CXM1 CSI file (subcarriers x symbols)");
    add_common(rd, rd_c, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*sim) simulate(sim_c, cmdline);
        else if (*dec) decompose_cmd(dec_c, dec_a, cmdline);
        else if (*spec) spectrogram_cmd(spec_c, spec_a, cmdline);
        else if (*bench) bench_cmd(bench_c, bench_a, cmdline);
        else if (*rd) range_doppler_cmd(rd_c, rd_csi, cmdline);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code(e.kind());
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 5;
    }
    return 0;
}
