#pragma once

#include "uavmd/banded.hpp"
#include "uavmd/error.hpp"
#include "uavmd/types.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace uavmd {

enum class Variant { rmd_nsp, amfm_nsp, nsp };

std::string_view to_string(Variant v);
Variant parse_variant(std::string_view s);

struct DifferencePair {
    Tridiagonal D1; // forward difference, last row [0 ... 0 -1]
    Tridiagonal D2; // second difference with -1 corners
};

DifferencePair difference_matrices(std::size_t M);

struct OperatorParams {
    std::vector<double> p;
    std::vector<double> q;
    Variant variant = Variant::rmd_nsp;
};

// T = D2 + diag(p) D1 + diag(q) as a tridiagonal matrix.
Tridiagonal operator_matrix(const OperatorParams& params);

std::vector<double> apply_operator(std::span<const double> x, const OperatorParams& params);

// Parameters of the operator that annihilates a(m) cos(phi1(m) + phi2(m)),
// neglecting a''/a. Derivatives are central differences in samples.
OperatorParams closed_form_params(std::span<const double> a, std::span<const double> phi1,
                                  std::span<const double> phi2);

struct SolverConfig {
    double epsilon = 1e-4;
    std::size_t max_iter = 30;
    double lambda2 = 1e4;   // smoothness penalty on theta
    double lambda1 = 1e-2;  // initial multiplier
    double gamma0 = 0.0;    // initial leakage
    double coupling = 1e-6; // weight of ||D2 q + p||^2 relative to smoothness (rmd-nsp)
};

// Normal-equation system of the theta step, in the interleaved ordering
// [p0 q0 p1 q1 ...] (q only for nsp).
struct ThetaSystem {
    SymBand matrix;
    std::vector<double> rhs;
};

ThetaSystem theta_system(std::span<const double> u, double lambda2, Variant variant, double coupling);

// theta = -(A^T A + lambda2 M2^T M2)^-1 A^T D2 (s - r).
OperatorParams solve_theta(std::span<const double> s, std::span<const double> r, double lambda2, Variant variant,
                           double coupling = SolverConfig{}.coupling);

struct NspState {
    std::vector<double> r;
    OperatorParams params;
    double lambda1 = 1.0;
    double gamma = 0.0;
    double lambda2 = 1.0;
    double coupling = SolverConfig{}.coupling;
    std::size_t iteration = 0;
    double last_change = 0.0; // ||r_new - r_old||^2 of the latest step
};

NspState initial_state(std::size_t M, const SolverConfig& cfg, Variant variant);

class DivergenceError : public NumericalError {
public:
    DivergenceError(const std::string& what, NspState last) : NumericalError(what), last_(std::move(last)) {}
    const NspState& last_state() const noexcept { return last_; }

private:
    NspState last_;
};

// One sweep: theta, lambda1, r, gamma, in that order.
NspState nsp_iterate(const NspState& state, std::span<const double> s);

// The r step on its own: solves (T^T T + (1+gamma) lambda1 I) r = T^T T s + lambda1 gamma s.
std::vector<double> r_update(std::span<const double> s, const Tridiagonal& T, double lambda1, double gamma);

// Augmented Lagrangian with theta held fixed.
double objective(std::span<const double> s, std::span<const double> r, const NspState& state);

struct NspDiagnostics {
    std::size_t iterations = 0;
    bool converged = false;
    double gamma = 0.0;
    double lambda1 = 0.0;
    double scale = 0.0;       // RMS of the input; the solver runs on s / scale
    double final_change = 0.0; // ||dr||^2 / ||s||^2 at the returned iterate
};

struct NspResult {
    std::vector<double> u;
    NspDiagnostics diagnostics;
};

// Runs until ||dr||^2 <= epsilon ||s||^2 or max_iter. Without convergence the
// iterate with the smallest step is returned and flagged.
NspResult nsp_extract(std::span<const double> s, const SolverConfig& cfg, Variant variant);

enum class PassChain {
    refine,  // pass k+1 runs on the component of pass k
    cascade, // pass k+1 runs on the remainder of pass k
};

std::string_view to_string(PassChain c);
PassChain parse_chain(std::string_view s);

struct PassDiagnostics {
    NspDiagnostics re, im;
};

struct DecompositionOutput {
    PassChain chain = PassChain::refine;
    std::vector<std::vector<cplx>> components; // extracted u per pass
    std::vector<std::vector<cplx>> rejected;   // pass input minus its component
    std::vector<cplx> final_residual;          // input minus what the last pass kept
    std::vector<PassDiagnostics> diagnostics;

    // cascade: sum of components plus final residual.
    // refine: last component plus final residual (= sum of rejected parts).
    std::vector<cplx> reconstruct() const;
};

DecompositionOutput decompose(std::span<const cplx> s_mix, std::size_t passes, Variant variant,
                              const SolverConfig& cfg = {}, PassChain chain = PassChain::refine);

// Index of the component with most energy outside |f| <= guard_hz.
std::size_t select_rotor_component(const DecompositionOutput& out, double sample_rate, double guard_hz = 200.0);

} // namespace uavmd
