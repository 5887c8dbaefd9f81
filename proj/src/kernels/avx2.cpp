// Built with -mavx2 -mfma. Only reached after a runtime CPU check.
#include "uavmd/kernels.hpp"

#include <cmath>
#include <immintrin.h>

namespace uavmd::kernels {
namespace {

void cmul_avx2(const cplx* a, const cplx* b, cplx* out, std::size_t n) {
    auto* pa = reinterpret_cast<const double*>(a);
    auto* pb = reinterpret_cast<const double*>(b);
    auto* po = reinterpret_cast<double*>(out);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d va = _mm256_loadu_pd(pa + 2 * i);
        const __m256d vb = _mm256_loadu_pd(pb + 2 * i);
        const __m256d bre = _mm256_movedup_pd(vb);
        const __m256d bim = _mm256_permute_pd(vb, 0xF);
        const __m256d asw = _mm256_permute_pd(va, 0x5);
        _mm256_storeu_pd(po + 2 * i, _mm256_fmaddsub_pd(va, bre, _mm256_mul_pd(asw, bim)));
    }
    for (; i < n; ++i) out[i] = {a[i].real() * b[i].real() - a[i].imag() * b[i].imag(),
                                 a[i].imag() * b[i].real() + a[i].real() * b[i].imag()};
}

void cdiv_avx2(const cplx* a, const cplx* b, cplx* out, std::size_t n) {
    auto* pa = reinterpret_cast<const double*>(a);
    auto* pb = reinterpret_cast<const double*>(b);
    auto* po = reinterpret_cast<double*>(out);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d va = _mm256_loadu_pd(pa + 2 * i);
        const __m256d vb = _mm256_loadu_pd(pb + 2 * i);
        const __m256d bre = _mm256_movedup_pd(vb);
        const __m256d bim = _mm256_permute_pd(vb, 0xF);
        const __m256d asw = _mm256_permute_pd(va, 0x5);
        const __m256d num = _mm256_fmsubadd_pd(va, bre, _mm256_mul_pd(asw, bim));
        const __m256d den = _mm256_fmadd_pd(bre, bre, _mm256_mul_pd(bim, bim));
        _mm256_storeu_pd(po + 2 * i, _mm256_div_pd(num, den));
    }
    for (; i < n; ++i) {
        const double d = b[i].real() * b[i].real() + b[i].imag() * b[i].imag();
        out[i] = {(a[i].real() * b[i].real() + a[i].imag() * b[i].imag()) / d,
                  (a[i].imag() * b[i].real() - a[i].real() * b[i].imag()) / d};
    }
}

inline __m256d norm4(const double* p) {
    const __m256d x = _mm256_loadu_pd(p);
    const __m256d y = _mm256_loadu_pd(p + 4);
    const __m256d h = _mm256_hadd_pd(_mm256_mul_pd(x, x), _mm256_mul_pd(y, y));
    return _mm256_permute4x64_pd(h, 0xD8);
}

void norm_sq_avx2(const cplx* a, double* out, std::size_t n) {
    auto* pa = reinterpret_cast<const double*>(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out + i, norm4(pa + 2 * i));
    for (; i < n; ++i) out[i] = a[i].real() * a[i].real() + a[i].imag() * a[i].imag();
}

double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double abs_sum_avx2(const cplx* a, std::size_t n) {
    auto* pa = reinterpret_cast<const double*>(a);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_sqrt_pd(norm4(pa + 2 * i)));
    double s = hsum(acc);
    for (; i < n; ++i) s += std::abs(a[i]);
    return s;
}

double dot_avx2(const double* x, const double* y, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
    }
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += x[i] * y[i];
    return s;
}

void tridiag_avx2(const double* lo, const double* di, const double* up, const double* x, double* y,
                  std::size_t n) {
    if (n < 2) {
        if (n == 1) y[0] = di[0] * x[0];
        return;
    }
    y[0] = di[0] * x[0] + up[0] * x[1];
    std::size_t k = 1;
    for (; k + 4 < n; k += 4) {
        __m256d v = _mm256_mul_pd(_mm256_loadu_pd(lo + k), _mm256_loadu_pd(x + k - 1));
        v = _mm256_fmadd_pd(_mm256_loadu_pd(di + k), _mm256_loadu_pd(x + k), v);
        v = _mm256_fmadd_pd(_mm256_loadu_pd(up + k), _mm256_loadu_pd(x + k + 1), v);
        _mm256_storeu_pd(y + k, v);
    }
    for (; k + 1 < n; ++k) y[k] = lo[k] * x[k - 1] + di[k] * x[k] + up[k] * x[k + 1];
    y[n - 1] = lo[n - 1] * x[n - 2] + di[n - 1] * x[n - 1];
}

constexpr KernelTable table{"avx2", cmul_avx2, cdiv_avx2, norm_sq_avx2, abs_sum_avx2, dot_avx2, tridiag_avx2};

} // namespace

const KernelTable* avx2_table_unchecked() noexcept { return &table; }

} // namespace uavmd::kernels
