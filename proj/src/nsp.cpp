#include "uavmd/nsp.hpp"
#include "uavmd/fft.hpp"
#include "uavmd/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace uavmd {

std::string_view to_string(Variant v) {
    switch (v) {
    case Variant::rmd_nsp: return "rmd-nsp";
    case Variant::amfm_nsp: return "amfm-nsp";
    case Variant::nsp: return "nsp";
    }
    return "?";
}

Variant parse_variant(std::string_view s) {
    if (s == "rmd-nsp") return Variant::rmd_nsp;
    if (s == "amfm-nsp") return Variant::amfm_nsp;
    if (s == "nsp") return Variant::nsp;
    throw ConfigError("unknown variant '" + std::string(s) + "' (expected rmd-nsp, amfm-nsp or nsp)");
}

std::string_view to_string(PassChain c) { return c == PassChain::refine ? "refine" : "cascade"; }

PassChain parse_chain(std::string_view s) {
    if (s == "refine") return PassChain::refine;
    if (s == "cascade") return PassChain::cascade;
    throw ConfigError("unknown pass chain '" + std::string(s) + "' (expected refine or cascade)");
}

DifferencePair difference_matrices(std::size_t M) {
    if (M < 3) throw ParameterError("difference_matrices: M must be at least 3");
    DifferencePair d;
    d.D2.lo.assign(M, 1.0);
    d.D2.di.assign(M, -2.0);
    d.D2.up.assign(M, 1.0);
    d.D2.lo[0] = 0.0;
    d.D2.up[M - 1] = 0.0;
    d.D2.di[0] = -1.0;
    d.D2.di[M - 1] = -1.0;
    d.D1.lo.assign(M, 0.0);
    d.D1.di.assign(M, -1.0);
    d.D1.up.assign(M, 1.0);
    d.D1.up[M - 1] = 0.0;
    return d;
}

Tridiagonal operator_matrix(const OperatorParams& params) {
    const std::size_t M = params.q.size();
    if (params.p.size() != M) throw ParameterError("operator: p and q lengths differ");
    Tridiagonal T = difference_matrices(M).D2;
    for (std::size_t k = 0; k < M; ++k) {
        T.di[k] += params.q[k] - params.p[k];
        if (k + 1 < M) T.up[k] += params.p[k];
    }
    return T;
}

std::vector<double> apply_operator(std::span<const double> x, const OperatorParams& params) {
    if (x.size() != params.q.size()) throw ParameterError("apply_operator: length mismatch");
    return operator_matrix(params).apply(x);
}

namespace {

std::vector<double> gradient(std::span<const double> g) {
    const std::size_t n = g.size();
    std::vector<double> d(n);
    d[0] = g[1] - g[0];
    d[n - 1] = g[n - 1] - g[n - 2];
    for (std::size_t k = 1; k + 1 < n; ++k) d[k] = 0.5 * (g[k + 1] - g[k - 1]);
    return d;
}

std::vector<double> second_difference(std::span<const double> g) {
    const std::size_t n = g.size();
    std::vector<double> d(n);
    for (std::size_t k = 1; k + 1 < n; ++k) d[k] = g[k + 1] - 2 * g[k] + g[k - 1];
    d[0] = d[1];
    d[n - 1] = d[n - 2];
    return d;
}

bool finite(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

} // namespace

OperatorParams closed_form_params(std::span<const double> a, std::span<const double> phi1,
                                  std::span<const double> phi2) {
    const std::size_t M = a.size();
    if (phi1.size() != M || phi2.size() != M) throw ParameterError("closed_form_params: length mismatch");
    if (M < 3) throw ParameterError("closed_form_params: need at least 3 samples");
    const auto da = gradient(a);
    const auto d1 = gradient(phi1);
    const auto d2 = gradient(phi2);
    const auto dd1 = second_difference(phi1);
    OperatorParams out{std::vector<double>(M), std::vector<double>(M), Variant::rmd_nsp};
    for (std::size_t m = 0; m < M; ++m) {
        if (a[m] == 0.0) throw NumericalError("closed_form_params: zero amplitude at sample " + std::to_string(m));
        const double bar = d1[m] + d2[m];
        if (bar == 0.0) throw NumericalError("closed_form_params: zero phase rate at sample " + std::to_string(m));
        const double ar = da[m] / a[m];
        const double pr = dd1[m] / bar;
        out.p[m] = -2 * ar - pr;
        out.q[m] = bar * bar + 2 * ar * ar + ar * pr;
    }
    return out;
}

ThetaSystem theta_system(std::span<const double> u, double lambda2, Variant variant, double coupling) {
    const std::size_t M = u.size();
    const auto dm = difference_matrices(M);
    const auto d2u = dm.D2.apply(u);
    const SymBand smooth = SymBand::gram(dm.D2);

    if (variant == Variant::nsp) {
        ThetaSystem sys{SymBand(M, 2), std::vector<double>(M)};
        for (std::size_t m = 0; m < M; ++m) {
            sys.matrix.add(m, m, u[m] * u[m]);
            sys.rhs[m] = -u[m] * d2u[m];
        }
        sys.matrix.add_scaled(smooth, lambda2);
        return sys;
    }

    const auto d = dm.D1.apply(u);
    ThetaSystem sys{SymBand(2 * M, 4), std::vector<double>(2 * M)};
    auto& A = sys.matrix;
    for (std::size_t m = 0; m < M; ++m) {
        A.add(2 * m, 2 * m, d[m] * d[m]);
        A.add(2 * m, 2 * m + 1, d[m] * u[m]);
        A.add(2 * m + 1, 2 * m + 1, u[m] * u[m]);
        sys.rhs[2 * m] = -d[m] * d2u[m];
        sys.rhs[2 * m + 1] = -u[m] * d2u[m];
    }
    for (std::size_t i = 0; i < M; ++i) {
        for (std::size_t j = i; j < std::min(M, i + 3); ++j) {
            const double s = smooth.get(i, j);
            A.add(2 * i, 2 * j, lambda2 * s);
            A.add(2 * i + 1, 2 * j + 1, lambda2 * s);
        }
    }
    if (variant == Variant::rmd_nsp && coupling > 0) {
        // ||p + D2 q||^2 = p'p + 2 p' D2 q + q' D2'D2 q
        const double w = lambda2 * coupling;
        for (std::size_t i = 0; i < M; ++i) {
            A.add(2 * i, 2 * i, w);
            for (std::size_t j = (i > 0 ? i - 1 : 0); j < std::min(M, i + 2); ++j) {
                const double v = j == i ? dm.D2.di[i] : (j < i ? dm.D2.lo[i] : dm.D2.up[i]);
                A.add(2 * i, 2 * j + 1, w * v);
            }
            for (std::size_t j = i; j < std::min(M, i + 3); ++j) A.add(2 * i + 1, 2 * j + 1, w * smooth.get(i, j));
        }
    }
    return sys;
}

OperatorParams solve_theta(std::span<const double> s, std::span<const double> r, double lambda2, Variant variant,
                           double coupling) {
    const std::size_t M = s.size();
    if (r.size() != M) throw ParameterError("solve_theta: length mismatch");
    if (!(lambda2 > 0)) throw ParameterError("solve_theta: lambda2 must be positive");
    std::vector<double> u(M);
    for (std::size_t m = 0; m < M; ++m) u[m] = s[m] - r[m];
    OperatorParams out{std::vector<double>(M), std::vector<double>(M), variant};
    if (std::all_of(u.begin(), u.end(), [](double x) { return x == 0.0; })) return out;
    const ThetaSystem sys = theta_system(u, lambda2, variant, coupling);
    const auto theta = sys.matrix.solve(sys.rhs);
    if (variant == Variant::nsp) {
        out.q = theta;
    } else {
        for (std::size_t m = 0; m < M; ++m) {
            out.p[m] = theta[2 * m];
            out.q[m] = theta[2 * m + 1];
        }
    }
    return out;
}

NspState initial_state(std::size_t M, const SolverConfig& cfg, Variant variant) {
    NspState st;
    st.r.assign(M, 0.0);
    st.params = {std::vector<double>(M), std::vector<double>(M), variant};
    st.lambda1 = cfg.lambda1;
    st.gamma = cfg.gamma0;
    st.lambda2 = cfg.lambda2;
    st.coupling = cfg.coupling;
    return st;
}

std::vector<double> r_update(std::span<const double> s, const Tridiagonal& T, double lambda1, double gamma) {
    SymBand K = SymBand::gram(T);
    auto rhs = K.multiply(s);
    for (std::size_t m = 0; m < s.size(); ++m) rhs[m] += lambda1 * gamma * s[m];
    K.add_diagonal((1 + gamma) * lambda1);
    return K.solve(rhs);
}

double objective(std::span<const double> s, std::span<const double> r, const NspState& state) {
    const std::size_t M = s.size();
    std::vector<double> u(M);
    for (std::size_t m = 0; m < M; ++m) u[m] = s[m] - r[m];
    const auto Tu = operator_matrix(state.params).apply(u);
    return kernels::dot(Tu, Tu) + state.lambda1 * (kernels::dot(r, r) + state.gamma * kernels::dot(u, u));
}

NspState nsp_iterate(const NspState& state, std::span<const double> s) {
    const std::size_t M = s.size();
    if (state.r.size() != M) throw ParameterError("nsp_iterate: state length mismatch");
    if (!(state.lambda1 > 0)) throw ParameterError("nsp_iterate: lambda1 must be positive");
    auto fail = [&](const char* what) { throw DivergenceError(std::string("nsp_iterate: non-finite ") + what, state); };

    NspState next = state;
    next.params = solve_theta(s, state.r, state.lambda2, state.params.variant, state.coupling);
    if (!finite(next.params.p) || !finite(next.params.q)) fail("operator parameters");

    const Tridiagonal T = operator_matrix(next.params);
    const double g = state.gamma;
    SymBand K = SymBand::gram(T);
    K.add_diagonal((1 + g) * state.lambda1);
    const auto cs = K.solve(s);
    next.lambda1 = kernels::dot(s, cs) / ((1 + g) * kernels::dot(cs, cs));
    if (!std::isfinite(next.lambda1)) fail("multiplier");
    if (!(next.lambda1 > 0)) throw NumericalError("nsp_iterate: multiplier update is not positive");

    next.r = r_update(s, T, next.lambda1, g);
    if (!finite(next.r)) fail("residual");

    std::vector<double> u(M);
    for (std::size_t m = 0; m < M; ++m) u[m] = s[m] - next.r[m];
    next.gamma = kernels::dot(u, s) / kernels::dot(u, u) - 1.0;
    if (!std::isfinite(next.gamma)) fail("leakage");

    double change = 0.0;
    for (std::size_t m = 0; m < M; ++m) change += (next.r[m] - state.r[m]) * (next.r[m] - state.r[m]);
    next.last_change = change;
    next.iteration = state.iteration + 1;
    return next;
}

NspResult nsp_extract(std::span<const double> s, const SolverConfig& cfg, Variant variant) {
    if (!(cfg.epsilon > 0)) throw ParameterError("nsp_extract: epsilon must be positive");
    if (cfg.max_iter == 0) throw ParameterError("nsp_extract: max_iter must be positive");
    if (!(cfg.lambda1 > 0) || !(cfg.lambda2 > 0)) throw ParameterError("nsp_extract: lambda1, lambda2 must be positive");
    const std::size_t M = s.size();
    if (M < 3) throw ParameterError("nsp_extract: need at least 3 samples");
    if (!finite(s)) throw ParameterError("nsp_extract: input is not finite");

    NspResult res;
    res.u.assign(M, 0.0);
    const double energy = kernels::dot(s, s);
    if (energy == 0.0) {
        res.diagnostics = {1, true, cfg.gamma0, cfg.lambda1, 0.0, 0.0};
        return res;
    }
    // The iteration runs on unit-RMS data so the fixed penalties mean the same
    // thing at every signal level.
    const double scale = std::sqrt(energy / static_cast<double>(M));
    std::vector<double> x(M);
    for (std::size_t m = 0; m < M; ++m) x[m] = s[m] / scale;
    const double xx = kernels::dot(x, x);

    NspState st = initial_state(M, cfg, variant);
    NspState best;
    double best_change = std::numeric_limits<double>::infinity();
    bool converged = false;
    while (st.iteration < cfg.max_iter) {
        st = nsp_iterate(st, x);
        if (st.last_change < best_change) {
            best_change = st.last_change;
            best = st;
        }
        if (st.last_change <= cfg.epsilon * xx) {
            converged = true;
            break;
        }
    }
    const NspState& out = converged ? st : best;
    for (std::size_t m = 0; m < M; ++m) res.u[m] = scale * (1 + out.gamma) * (x[m] - out.r[m]);
    res.diagnostics = {st.iteration, converged, out.gamma, out.lambda1, scale, out.last_change / xx};
    return res;
}

std::vector<cplx> DecompositionOutput::reconstruct() const {
    if (components.empty()) return final_residual;
    std::vector<cplx> out = final_residual;
    if (chain == PassChain::cascade) {
        for (const auto& c : components)
            for (std::size_t m = 0; m < out.size(); ++m) out[m] += c[m];
    } else {
        for (std::size_t m = 0; m < out.size(); ++m) out[m] += components.back()[m];
    }
    return out;
}

DecompositionOutput decompose(std::span<const cplx> s_mix, std::size_t passes, Variant variant,
                              const SolverConfig& cfg, PassChain chain) {
    if (passes == 0) throw ParameterError("decompose: passes must be at least 1");
    const std::size_t M = s_mix.size();
    DecompositionOutput out;
    out.chain = chain;
    std::vector<cplx> x(s_mix.begin(), s_mix.end());
    std::vector<double> re(M), im(M);
    for (std::size_t k = 0; k < passes; ++k) {
        for (std::size_t m = 0; m < M; ++m) {
            re[m] = x[m].real();
            im[m] = x[m].imag();
        }
        NspResult a, b;
        try {
            a = nsp_extract(re, cfg, variant);
        } catch (const Error& e) {
            throw NumericalError("decompose: pass " + std::to_string(k + 1) + " (real part): " + e.what());
        }
        try {
            b = nsp_extract(im, cfg, variant);
        } catch (const Error& e) {
            throw NumericalError("decompose: pass " + std::to_string(k + 1) + " (imaginary part): " + e.what());
        }
        std::vector<cplx> u(M), rest(M);
        for (std::size_t m = 0; m < M; ++m) {
            u[m] = {a.u[m], b.u[m]};
            rest[m] = x[m] - u[m];
        }
        out.diagnostics.push_back({a.diagnostics, b.diagnostics});
        out.components.push_back(u);
        out.rejected.push_back(rest);
        x = chain == PassChain::refine ? std::move(u) : std::move(rest);
    }
    out.final_residual.resize(M);
    if (chain == PassChain::cascade) {
        out.final_residual = x;
    } else {
        for (std::size_t m = 0; m < M; ++m) out.final_residual[m] = s_mix[m] - out.components.back()[m];
    }
    return out;
}

std::size_t select_rotor_component(const DecompositionOutput& out, double sample_rate, double guard_hz) {
    if (out.components.empty()) throw ParameterError("select_rotor_component: no components");
    std::size_t best = 0;
    double best_energy = -1.0;
    for (std::size_t k = 0; k < out.components.size(); ++k) {
        const auto& c = out.components[k];
        std::vector<cplx> spec(c.size());
        fft::forward(c, spec);
        double e = 0.0;
        const double n = static_cast<double>(c.size());
        for (std::size_t i = 0; i < spec.size(); ++i) {
            double f = static_cast<double>(i) * sample_rate / n;
            if (f > sample_rate / 2) f -= sample_rate;
            if (std::abs(f) > guard_hz) e += std::norm(spec[i]);
        }
        if (e > best_energy) {
            best_energy = e;
            best = k;
        }
    }
    return best;
}

} // namespace uavmd
