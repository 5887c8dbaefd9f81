#pragma once

#include "uavmd/grid.hpp"
#include "uavmd/nsp.hpp"
#include "uavmd/ranging.hpp"
#include "uavmd/scene.hpp"
#include "uavmd/tfa.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

namespace uavmd {

// sigma_n^2 = sum |s|^2 / (M 10^(snr/10))
double noise_for_snr(std::span<const cplx> s, double snr_db);

struct TrialSetup {
    UavScene scene = reference_scene();
    FrameConfig frame;
    std::uint64_t grid_seed = 1;
    std::size_t clutter_count = 3;
    double clutter_csr_db = -20.0;
    bool clutter = true;
    SolverConfig solver;
    std::size_t passes = 3;
    PassChain chain = PassChain::refine;
};

// Desk-scale defaults: 512 subcarriers, 512 symbols.
TrialSetup desk_setup();

// Noiseless chain output plus per-term ground truth, all scaled by the
// range-bin gain so they line up with s_uav.
struct Scenario {
    SlowTimeSignal s_uav;
    std::vector<cplx> translation, vibration, rotation;
};

// csi, when given, receives the noiseless CSI matrix.
Scenario make_scenario(const TrialSetup& setup, ComplexMatrix* csi = nullptr);

// s_uav plus clutter and slow-time noise at snr_db (no noise when snr_db is
// infinite). The realisation depends only on (seed, cell).
std::vector<cplx> mix_scenario(const Scenario& sc, const TrialSetup& setup, double snr_db, std::uint64_t seed,
                               std::uint64_t cell);

struct TrialOutcome {
    bool ok = false;        // decomposition finished without error
    bool converged = false; // every solver call met the tolerance
    double rmse = 0.0;
    std::size_t selected = 0;
    DecompositionOutput output;
    std::vector<cplx> s_mix;
};

// One realisation: clutter + noise at snr_db, decomposition, oracle selection
// of the component best correlated with the rotor truth.
TrialOutcome run_trial(const Scenario& sc, const TrialSetup& setup, Variant variant, double snr_db,
                       std::uint64_t seed, std::uint64_t cell);

// |<a, b>| / (|a| |b|)
double correlation(std::span<const cplx> a, std::span<const cplx> b);
double relative_rmse(std::span<const cplx> estimate, std::span<const cplx> truth);

struct PointResult {
    Variant variant = Variant::rmd_nsp;
    double snr_db = 0.0;
    double mean_rmse = 0.0;
    double std_rmse = 0.0;
    double convergence_rate = 0.0;
    std::size_t trials = 0;
    std::size_t failures = 0; // excluded from the mean
};

PointResult rmse_point(const Scenario& sc, const TrialSetup& setup, Variant variant, double snr_db,
                       std::size_t trials, std::uint64_t seed, std::size_t workers = 0);

struct SweepConfig {
    std::vector<double> snr_grid;
    std::size_t trials = 20;
    std::vector<Variant> variants{Variant::rmd_nsp, Variant::amfm_nsp, Variant::nsp};
    TrialSetup setup = desk_setup();
    std::uint64_t seed = 1;
    std::size_t workers = 0; // 0: UAVMD_WORKERS or the hardware thread count

    void validate() const;
};

std::vector<double> snr_range(double lo, double hi, double step);

// Worker count from UAVMD_WORKERS, else the hardware thread count.
std::size_t default_workers();

// Calls on_row after every (variant, SNR) point, in grid order.
std::vector<PointResult> sweep(const SweepConfig& cfg, const std::function<void(const PointResult&)>& on_row = {});

void write_sweep_header(const std::filesystem::path& path);
void append_sweep_row(const std::filesystem::path& path, const PointResult& row);

// Period of the blade flash. Per frame, the energy balance between the
// high bands f > 500 Hz and f < -500 Hz is normalised by the frame energy;
// the first autocorrelation peak after the zero lag gives the period.
double flash_period(const Spectrogram& spec, double band_edge_hz = 500.0, double min_peak = 0.5);

// Mean |S|^2 of the component over cells dominated by the rotor truth,
// divided by the mean over cells dominated by the vibration truth, in dB.
// Cells more than floor_db below a truth's peak are ignored.
double vibration_suppression(std::span<const cplx> component, std::span<const cplx> rotor,
                             std::span<const cplx> vibration, std::span<const double> timeline,
                             const StftConfig& cfg = {}, double floor_db = -30.0);

} // namespace uavmd
