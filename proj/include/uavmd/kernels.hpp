#pragma once

#include "uavmd/types.hpp"

#include <span>
#include <string_view>

// Hot elementwise loops. Each kernel has a scalar reference and, where the
// build and the CPU allow, an AVX2/FMA variant picked once at runtime.
namespace uavmd::kernels {

struct KernelTable {
    std::string_view name;
    // out[i] = a[i] * b[i]
    void (*cmul)(const cplx* a, const cplx* b, cplx* out, std::size_t n);
    // out[i] = a[i] / b[i]
    void (*cdiv)(const cplx* a, const cplx* b, cplx* out, std::size_t n);
    // out[i] = |a[i]|^2
    void (*norm_sq)(const cplx* a, double* out, std::size_t n);
    // sum |a[i]|
    double (*abs_sum)(const cplx* a, std::size_t n);
    // sum x[i] * y[i]
    double (*dot)(const double* x, const double* y, std::size_t n);
    // y[k] = lo[k] x[k-1] + di[k] x[k] + up[k] x[k+1], missing neighbours dropped
    void (*tridiag)(const double* lo, const double* di, const double* up, const double* x, double* y,
                    std::size_t n);
};

const KernelTable& scalar_table() noexcept;
// nullptr when the binary was built without AVX2 support or the CPU lacks it.
const KernelTable* avx2_table() noexcept;

// Table used by the library. UAVMD_SIMD=scalar in the environment forces the
// reference kernels.
const KernelTable& active() noexcept;

void cmul(std::span<const cplx> a, std::span<const cplx> b, std::span<cplx> out);
void cdiv(std::span<const cplx> a, std::span<const cplx> b, std::span<cplx> out);
void norm_sq(std::span<const cplx> a, std::span<double> out);
double abs_sum(std::span<const cplx> a);
double dot(std::span<const double> x, std::span<const double> y);
void tridiag(std::span<const double> lo, std::span<const double> di, std::span<const double> up,
             std::span<const double> x, std::span<double> y);

} // namespace uavmd::kernels
