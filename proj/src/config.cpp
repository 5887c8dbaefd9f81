#include "uavmd/config.hpp"

#include "uavmd/error.hpp"
#include "uavmd/io.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <sstream>

namespace uavmd {

namespace {

constexpr double deg = pi / 180.0;

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(std::string_view what, std::string_view value) {
    throw ConfigError(fmt::format("{}: cannot parse '{}'", what, value));
}

double to_double(std::string_view name, std::string_view v) {
    double x = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc{} || ptr != v.data() + v.size() || !std::isfinite(x)) bad_value(name, v);
    return x;
}

std::size_t to_size(std::string_view name, std::string_view v) {
    std::size_t x = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc{} || ptr != v.data() + v.size()) bad_value(name, v);
    return x;
}

bool to_bool(std::string_view name, std::string_view v) {
    if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
    if (v == "false" || v == "no" || v == "off" || v == "0") return false;
    bad_value(name, v);
}

struct Entry {
    std::string_view section, key;
    std::function<void(RunConfig&, std::string_view)> set;
    std::function<std::string(const RunConfig&)> get;
};

template <class T>
Entry real(std::string_view section, std::string_view key, T RunConfig::*group, double T::*field) {
    return {section, key,
            [=](RunConfig& c, std::string_view v) {
                (c.*group).*field = to_double(fmt::format("{}.{}", section, key), v);
            },
            [=](const RunConfig& c) { return fmt::format("{}", (c.*group).*field); }};
}

template <class T>
Entry count(std::string_view section, std::string_view key, T RunConfig::*group, std::size_t T::*field) {
    return {section, key,
            [=](RunConfig& c, std::string_view v) {
                (c.*group).*field = to_size(fmt::format("{}.{}", section, key), v);
            },
            [=](const RunConfig& c) { return fmt::format("{}", (c.*group).*field); }};
}

template <class T>
Entry flag(std::string_view section, std::string_view key, T RunConfig::*group, bool T::*field) {
    return {section, key,
            [=](RunConfig& c, std::string_view v) {
                (c.*group).*field = to_bool(fmt::format("{}.{}", section, key), v);
            },
            [=](const RunConfig& c) { return std::string((c.*group).*field ? "true" : "false"); }};
}

std::string_view to_string(SamplingMode m) { return m == SamplingMode::uniform ? "uniform" : "tdd-gapped"; }

const std::vector<Entry>& registry() {
    using S = RunConfig::Scene;
    using F = FrameConfig;
    using C = RunConfig::Clutter;
    using T = RunConfig::Transform;
    using W = RunConfig::Sweep;
    static const std::vector<Entry> entries = [] {
        std::vector<Entry> e;
        const auto sc = &RunConfig::scene;
        e.push_back(real("scene", "range", sc, &S::range));
        e.push_back(real("scene", "velocity", sc, &S::velocity));
        e.push_back(real("scene", "body_rcs", sc, &S::body_rcs));
        e.push_back(real("scene", "vibration_amplitude", sc, &S::vibration_amplitude));
        e.push_back(real("scene", "vibration_frequency", sc, &S::vibration_frequency));
        e.push_back(real("scene", "vibration_azimuth_deg", sc, &S::vibration_azimuth_deg));
        e.push_back(real("scene", "elevation_deg", sc, &S::elevation_deg));
        e.push_back(real("scene", "azimuth_deg", sc, &S::azimuth_deg));
        e.push_back(count("scene", "blades", sc, &S::blades));
        e.push_back(real("scene", "blade_length", sc, &S::blade_length));
        e.push_back(real("scene", "rotation_rate", sc, &S::rotation_rate));
        e.push_back(real("scene", "blade_angle_deg", sc, &S::blade_angle_deg));
        e.push_back(real("scene", "carrier_frequency", sc, &S::carrier_frequency));
        e.push_back(real("scene", "transmit_power_dbm", sc, &S::transmit_power_dbm));
        e.push_back(real("scene", "tx_gain_db", sc, &S::tx_gain_db));
        e.push_back(real("scene", "rx_gain_db", sc, &S::rx_gain_db));
        e.push_back(real("scene", "system_loss_db", sc, &S::system_loss_db));
        e.push_back(real("scene", "path_loss_db", sc, &S::path_loss_db));
        e.push_back(flag("scene", "translation", sc, &S::translation));
        e.push_back(flag("scene", "vibration", sc, &S::vibration));
        e.push_back(flag("scene", "rotation", sc, &S::rotation));

        const auto fr = &RunConfig::frame;
        e.push_back(real("frame", "subcarrier_spacing", fr, &F::subcarrier_spacing));
        e.push_back(real("frame", "symbol_duration", fr, &F::symbol_duration));
        e.push_back({"frame", "tdd_pattern", [](RunConfig& c, std::string_view v) { c.frame.tdd_pattern = v; },
                     [](const RunConfig& c) { return c.frame.tdd_pattern; }});
        e.push_back(real("frame", "cycle_duration", fr, &F::cycle_duration));
        e.push_back(real("frame", "cpi_duration", fr, &F::cpi_duration));
        e.push_back({"frame", "sampling_mode",
                     [](RunConfig& c, std::string_view v) {
                         if (v == "uniform") c.frame.sampling_mode = SamplingMode::uniform;
                         else if (v == "tdd-gapped") c.frame.sampling_mode = SamplingMode::tdd_gapped;
                         else bad_value("frame.sampling_mode", v);
                     },
                     [](const RunConfig& c) { return std::string(to_string(c.frame.sampling_mode)); }});
        e.push_back(count("frame", "symbols", fr, &F::num_symbols));
        e.push_back(count("frame", "subcarriers", fr, &F::num_subcarriers));
        e.push_back(count("frame", "symbols_per_slot", fr, &F::symbols_per_slot));
        e.push_back(count("frame", "special_dl_symbols", fr, &F::special_dl_symbols));
        e.push_back(real("frame", "bandwidth", fr, &F::bandwidth));

        const auto cl = &RunConfig::clutter;
        e.push_back(flag("clutter", "enabled", cl, &C::enabled));
        e.push_back(count("clutter", "count", cl, &C::count));
        e.push_back(real("clutter", "csr_db", cl, &C::csr_db));

        e.push_back(real("noise", "snr_db", &RunConfig::noise, &RunConfig::Noise::snr_db));

        auto solver_real = [](std::string_view key, double SolverConfig::*f) {
            return Entry{"solver", key,
                         [=](RunConfig& c, std::string_view v) {
                             c.solver.cfg.*f = to_double(fmt::format("solver.{}", key), v);
                         },
                         [=](const RunConfig& c) { return fmt::format("{}", c.solver.cfg.*f); }};
        };
        e.push_back({"solver", "variant",
                     [](RunConfig& c, std::string_view v) {
                         try {
                             c.solver.variant = parse_variant(v);
                         } catch (const Error&) {
                             bad_value("solver.variant", v);
                         }
                     },
                     [](const RunConfig& c) { return std::string(to_string(c.solver.variant)); }});
        e.push_back(count("solver", "passes", &RunConfig::solver, &RunConfig::Solver::passes));
        e.push_back({"solver", "chain",
                     [](RunConfig& c, std::string_view v) {
                         try {
                             c.solver.chain = parse_chain(v);
                         } catch (const Error&) {
                             bad_value("solver.chain", v);
                         }
                     },
                     [](const RunConfig& c) { return std::string(to_string(c.solver.chain)); }});
        e.push_back(solver_real("epsilon", &SolverConfig::epsilon));
        e.push_back({"solver", "max_iter",
                     [](RunConfig& c, std::string_view v) { c.solver.cfg.max_iter = to_size("solver.max_iter", v); },
                     [](const RunConfig& c) { return fmt::format("{}", c.solver.cfg.max_iter); }});
        e.push_back(solver_real("lambda1", &SolverConfig::lambda1));
        e.push_back(solver_real("lambda2", &SolverConfig::lambda2));
        e.push_back(solver_real("gamma0", &SolverConfig::gamma0));
        e.push_back(solver_real("coupling", &SolverConfig::coupling));

        const auto tf = &RunConfig::transform;
        e.push_back(count("transform", "window_length", tf, &T::window_length));
        e.push_back(real("transform", "window_sigma", tf, &T::window_sigma));
        e.push_back(count("transform", "hop", tf, &T::hop));
        e.push_back(count("transform", "fft_size", tf, &T::fft_size));
        e.push_back(real("transform", "threshold_ratio", tf, &T::threshold_ratio));

        const auto sw = &RunConfig::sweep;
        e.push_back(real("sweep", "snr_min", sw, &W::snr_min));
        e.push_back(real("sweep", "snr_max", sw, &W::snr_max));
        e.push_back(real("sweep", "snr_step", sw, &W::snr_step));
        e.push_back(count("sweep", "trials", sw, &W::trials));
        e.push_back({"sweep", "variants",
                     [](RunConfig& c, std::string_view v) {
                         std::vector<Variant> out;
                         std::size_t pos = 0;
                         while (pos <= v.size()) {
                             const auto comma = std::min(v.find(',', pos), v.size());
                             const auto item = trim(v.substr(pos, comma - pos));
                             try {
                                 out.push_back(parse_variant(item));
                             } catch (const Error&) {
                                 bad_value("sweep.variants", item);
                             }
                             pos = comma + 1;
                         }
                         c.sweep.variants = std::move(out);
                     },
                     [](const RunConfig& c) {
                         std::string s;
                         for (const auto v : c.sweep.variants) {
                             if (!s.empty()) s += ",";
                             s += to_string(v);
                         }
                         return s;
                     }});
        e.push_back(count("sweep", "subcarriers", sw, &W::subcarriers));
        e.push_back(count("sweep", "symbols", sw, &W::symbols));
        e.push_back(count("sweep", "workers", sw, &W::workers));

        e.push_back({"run", "seed",
                     [](RunConfig& c, std::string_view v) {
                         std::uint64_t x = 0;
                         const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
                         if (ec != std::errc{} || ptr != v.data() + v.size()) bad_value("run.seed", v);
                         c.seed = x;
                     },
                     [](const RunConfig& c) { return fmt::format("{}", c.seed); }});
        return e;
    }();
    return entries;
}

} // namespace

void set_value(RunConfig& cfg, std::string_view section, std::string_view key, std::string_view value) {
    const auto& reg = registry();
    const bool known_section =
        std::any_of(reg.begin(), reg.end(), [&](const Entry& e) { return e.section == section; });
    if (!known_section) throw ConfigError(fmt::format("unknown section [{}]", section));
    for (const auto& e : reg) {
        if (e.section == section && e.key == key) {
            e.set(cfg, trim(value));
            return;
        }
    }
    throw ConfigError(fmt::format("unknown key '{}' in section [{}]", key, section));
}

void apply_config_text(RunConfig& cfg, std::string_view text, std::string_view source) {
    std::string section;
    std::size_t lineno = 0, pos = 0;
    while (pos < text.size()) {
        const auto nl = std::min(text.find('\n', pos), text.size());
        std::string_view line = text.substr(pos, nl - pos);
        pos = nl + 1;
        ++lineno;
        if (const auto hash = line.find_first_of("#;"); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto where = [&] { return fmt::format("{}:{}", source, lineno); };
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(fmt::format("{}: unterminated section header", where()));
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError(fmt::format("{}: expected key = value", where()));
        if (section.empty()) throw ConfigError(fmt::format("{}: key outside any section", where()));
        try {
            set_value(cfg, section, trim(line.substr(0, eq)), line.substr(eq + 1));
        } catch (const ConfigError& e) {
            throw ConfigError(fmt::format("{}: {}", where(), e.what()));
        }
    }
}

void apply_override(RunConfig& cfg, std::string_view assignment) {
    const auto eq = assignment.find('=');
    const auto dot = assignment.find('.');
    if (eq == std::string_view::npos || dot == std::string_view::npos || dot > eq)
        throw ConfigError(fmt::format("override '{}' is not section.key=value", assignment));
    set_value(cfg, trim(assignment.substr(0, dot)), trim(assignment.substr(dot + 1, eq - dot - 1)),
              assignment.substr(eq + 1));
}

RunConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
    RunConfig cfg;
    if (!path.empty()) apply_config_text(cfg, io::read_text(path), path.string());
    for (const auto& o : overrides) apply_override(cfg, o);
    cfg.validate();
    return cfg;
}

std::string dump_config(const RunConfig& cfg) {
    std::string out;
    std::string_view section;
    for (const auto& e : registry()) {
        if (e.section != section) {
            if (!out.empty()) out += "\n";
            out += fmt::format("[{}]\n", e.section);
            section = e.section;
        }
        out += fmt::format("{} = {}\n", e.key, e.get(cfg));
    }
    return out;
}

UavScene RunConfig::make_scene() const {
    UavScene s;
    s.body.initial_range = scene.range;
    s.body.radial_velocity = scene.velocity;
    s.body.rcs = scene.body_rcs;
    s.body.vibration_amplitude = scene.vibration_amplitude;
    s.body.vibration_frequency = scene.vibration_frequency;
    s.body.vibration_azimuth = scene.vibration_azimuth_deg * deg;
    s.body.elevation = scene.elevation_deg * deg;
    s.body.azimuth = scene.azimuth_deg * deg;
    for (std::size_t k = 0; k < scene.blades; ++k) {
        RotorBlade b;
        b.length = scene.blade_length;
        b.rotation_rate = scene.rotation_rate;
        b.initial_angle = scene.blade_angle_deg * deg + 2 * pi * static_cast<double>(k) / static_cast<double>(scene.blades);
        b.elevation = s.body.elevation;
        s.blades.push_back(b);
    }
    s.link.transmit_power = dbm_to_watts(scene.transmit_power_dbm);
    s.link.tx_gain = db_to_linear(scene.tx_gain_db);
    s.link.rx_gain = db_to_linear(scene.rx_gain_db);
    s.link.system_loss = db_to_linear(scene.system_loss_db);
    s.link.path_loss = db_to_linear(scene.path_loss_db);
    s.link.carrier_frequency = scene.carrier_frequency;
    s.terms = {scene.translation, scene.vibration, scene.rotation};
    return s;
}

StftConfig RunConfig::make_stft() const {
    StftConfig c;
    c.window = gaussian_window(transform.window_length, transform.window_sigma);
    c.hop = transform.hop;
    c.fft_size = transform.fft_size;
    c.threshold_ratio = transform.threshold_ratio;
    return c;
}

TrialSetup RunConfig::make_trial_setup() const {
    TrialSetup t;
    t.scene = make_scene();
    t.frame = frame;
    t.grid_seed = seed;
    t.clutter = clutter.enabled;
    t.clutter_count = clutter.count;
    t.clutter_csr_db = clutter.csr_db;
    t.solver = solver.cfg;
    t.passes = solver.passes;
    t.chain = solver.chain;
    return t;
}

SweepConfig RunConfig::make_sweep() const {
    SweepConfig s;
    s.snr_grid = snr_range(sweep.snr_min, sweep.snr_max, sweep.snr_step);
    s.trials = sweep.trials;
    s.variants = sweep.variants;
    s.setup = make_trial_setup();
    s.setup.frame.num_subcarriers = sweep.subcarriers;
    s.setup.frame.num_symbols = sweep.symbols;
    s.seed = seed;
    s.workers = sweep.workers;
    return s;
}

void RunConfig::validate() const {
    auto wrap = [](const char* what, auto&& fn) {
        try {
            fn();
        } catch (const ConfigError&) {
            throw;
        } catch (const Error& e) {
            throw ConfigError(fmt::format("{}: {}", what, e.what()));
        }
    };
    wrap("scene", [&] { make_scene().validate(); });
    wrap("frame", [&] { frame.validate(); });
    if (frame.sampling_mode == SamplingMode::uniform && frame.num_symbols == 0 &&
        frame.cpi_duration < frame.symbol_duration)
        throw ConfigError("frame: zero-length timeline");
    if (solver.passes == 0) throw ConfigError("solver.passes must be at least 1");
    if (solver.cfg.max_iter == 0) throw ConfigError("solver.max_iter must be at least 1");
    if (!(solver.cfg.epsilon > 0)) throw ConfigError("solver.epsilon must be positive");
    if (!(solver.cfg.lambda1 > 0)) throw ConfigError("solver.lambda1 must be positive");
    if (!(solver.cfg.lambda2 > 0)) throw ConfigError("solver.lambda2 must be positive");
    if (solver.cfg.coupling < 0) throw ConfigError("solver.coupling must be non-negative");
    if (!(transform.window_sigma > 0)) throw ConfigError("transform.window_sigma must be positive");
    wrap("transform", [&] { make_stft().validate(); });
    if (sweep.subcarriers == 0 || sweep.symbols < 3) throw ConfigError("sweep: desk grid too small");
    wrap("sweep", [&] { make_sweep().validate(); });
}

} // namespace uavmd
