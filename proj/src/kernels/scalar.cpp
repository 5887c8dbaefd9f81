#include "uavmd/kernels.hpp"

#include <cmath>

namespace uavmd::kernels {
namespace {

void cmul_ref(const cplx* a, const cplx* b, cplx* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double ar = a[i].real(), ai = a[i].imag();
        const double br = b[i].real(), bi = b[i].imag();
        out[i] = {ar * br - ai * bi, ai * br + ar * bi};
    }
}

void cdiv_ref(const cplx* a, const cplx* b, cplx* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double ar = a[i].real(), ai = a[i].imag();
        const double br = b[i].real(), bi = b[i].imag();
        const double d = br * br + bi * bi;
        out[i] = {(ar * br + ai * bi) / d, (ai * br - ar * bi) / d};
    }
}

void norm_sq_ref(const cplx* a, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        out[i] = a[i].real() * a[i].real() + a[i].imag() * a[i].imag();
}

double abs_sum_ref(const cplx* a, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        acc += std::sqrt(a[i].real() * a[i].real() + a[i].imag() * a[i].imag());
    return acc;
}

double dot_ref(const double* x, const double* y, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
    return acc;
}

void tridiag_ref(const double* lo, const double* di, const double* up, const double* x, double* y,
                 std::size_t n) {
    if (n == 0) return;
    if (n == 1) {
        y[0] = di[0] * x[0];
        return;
    }
    y[0] = di[0] * x[0] + up[0] * x[1];
    for (std::size_t k = 1; k + 1 < n; ++k)
        y[k] = lo[k] * x[k - 1] + di[k] * x[k] + up[k] * x[k + 1];
    y[n - 1] = lo[n - 1] * x[n - 2] + di[n - 1] * x[n - 1];
}

constexpr KernelTable table{"scalar", cmul_ref, cdiv_ref, norm_sq_ref, abs_sum_ref, dot_ref, tridiag_ref};

} // namespace

const KernelTable& scalar_table() noexcept { return table; }

} // namespace uavmd::kernels
