#include "uavmd/kernels.hpp"
#include "uavmd/error.hpp"

#include <cstdlib>
#include <string_view>

namespace uavmd::kernels {

#if defined(UAVMD_HAVE_AVX2)
const KernelTable* avx2_table_unchecked() noexcept;
#endif

const KernelTable* avx2_table() noexcept {
#if defined(UAVMD_HAVE_AVX2)
    static const bool ok = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    return ok ? avx2_table_unchecked() : nullptr;
#else
    return nullptr;
#endif
}

const KernelTable& active() noexcept {
    static const KernelTable& chosen = [&]() -> const KernelTable& {
        const char* env = std::getenv("UAVMD_SIMD");
        if (env && std::string_view(env) == "scalar") return scalar_table();
        if (const KernelTable* t = avx2_table()) return *t;
        return scalar_table();
    }();
    return chosen;
}

namespace {
void require(bool ok, const char* what) {
    if (!ok) throw ParameterError(what);
}
} // namespace

void cmul(std::span<const cplx> a, std::span<const cplx> b, std::span<cplx> out) {
    require(a.size() == b.size() && a.size() == out.size(), "cmul: length mismatch");
    active().cmul(a.data(), b.data(), out.data(), a.size());
}

void cdiv(std::span<const cplx> a, std::span<const cplx> b, std::span<cplx> out) {
    require(a.size() == b.size() && a.size() == out.size(), "cdiv: length mismatch");
    active().cdiv(a.data(), b.data(), out.data(), a.size());
}

void norm_sq(std::span<const cplx> a, std::span<double> out) {
    require(a.size() == out.size(), "norm_sq: length mismatch");
    active().norm_sq(a.data(), out.data(), a.size());
}

double abs_sum(std::span<const cplx> a) { return active().abs_sum(a.data(), a.size()); }

double dot(std::span<const double> x, std::span<const double> y) {
    require(x.size() == y.size(), "dot: length mismatch");
    return active().dot(x.data(), y.data(), x.size());
}

void tridiag(std::span<const double> lo, std::span<const double> di, std::span<const double> up,
             std::span<const double> x, std::span<double> y) {
    const std::size_t n = x.size();
    require(lo.size() == n && di.size() == n && up.size() == n && y.size() == n, "tridiag: length mismatch");
    active().tridiag(lo.data(), di.data(), up.data(), x.data(), y.data(), n);
}

} // namespace uavmd::kernels
