#include <doctest.h>

#include "uavmd/error.hpp"
#include "uavmd/kernels.hpp"
#include "uavmd/random.hpp"

#include <boost/random/uniform_real_distribution.hpp>

#include <cmath>
#include <vector>

using namespace uavmd;
namespace k = uavmd::kernels;

namespace {

struct Data {
    std::vector<cplx> a, b;
    std::vector<double> x, y, lo, di, up;
};

Data make(std::size_t n, std::uint64_t seed) {
    Rng rng = substream(seed, n);
    boost::random::uniform_real_distribution<double> u(-2.0, 2.0);
    Data d;
    for (std::size_t i = 0; i < n; ++i) {
        d.a.emplace_back(u(rng), u(rng));
        cplx z{u(rng), u(rng)};
        if (std::abs(z) < 0.1) z += 0.5;
        d.b.push_back(z);
        d.x.push_back(u(rng));
        d.y.push_back(u(rng));
        d.lo.push_back(u(rng));
        d.di.push_back(u(rng));
        d.up.push_back(u(rng));
    }
    return d;
}

void close(double got, double want, double scale) { CHECK(std::abs(got - want) <= 1e-13 * (scale + std::abs(want))); }

} // namespace

TEST_CASE("scalar reference kernels") {
    const auto& s = k::scalar_table();
    const Data d = make(9, 1);
    std::vector<cplx> out(9);
    s.cmul(d.a.data(), d.b.data(), out.data(), 9);
    for (std::size_t i = 0; i < 9; ++i) CHECK(out[i] == d.a[i] * d.b[i]);
    s.cdiv(d.a.data(), d.b.data(), out.data(), 9);
    for (std::size_t i = 0; i < 9; ++i) CHECK(std::abs(out[i] - d.a[i] / d.b[i]) < 1e-14 * std::abs(d.a[i] / d.b[i]) + 1e-300);
    std::vector<double> y(9);
    s.tridiag(d.lo.data(), d.di.data(), d.up.data(), d.x.data(), y.data(), 9);
    for (std::size_t i = 0; i < 9; ++i) {
        double want = d.di[i] * d.x[i];
        if (i > 0) want += d.lo[i] * d.x[i - 1];
        if (i + 1 < 9) want += d.up[i] * d.x[i + 1];
        close(y[i], want, 1.0);
    }
}

TEST_CASE("avx2 kernels match the scalar reference") {
    const k::KernelTable* v = k::avx2_table();
    if (!v) {
        MESSAGE("no AVX2 on this machine or build; skipping");
        return;
    }
    const auto& s = k::scalar_table();
    for (std::size_t n : {0u, 1u, 2u, 3u, 4u, 5u, 7u, 8u, 9u, 15u, 16u, 17u, 31u, 33u, 1000u, 4099u}) {
        CAPTURE(n);
        const Data d = make(n, 7);
        std::vector<cplx> o1(n), o2(n);
        s.cmul(d.a.data(), d.b.data(), o1.data(), n);
        v->cmul(d.a.data(), d.b.data(), o2.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(o1[i] - o2[i]) <= 1e-14 * (1 + std::abs(o1[i])));
        s.cdiv(d.a.data(), d.b.data(), o1.data(), n);
        v->cdiv(d.a.data(), d.b.data(), o2.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(o1[i] - o2[i]) <= 1e-13 * (1 + std::abs(o1[i])));
        std::vector<double> r1(n), r2(n);
        s.norm_sq(d.a.data(), r1.data(), n);
        v->norm_sq(d.a.data(), r2.data(), n);
        for (std::size_t i = 0; i < n; ++i) close(r2[i], r1[i], 1.0);
        double mass = 0.0;
        for (std::size_t i = 0; i < n; ++i) mass += std::abs(d.x[i] * d.y[i]);
        close(v->dot(d.x.data(), d.y.data(), n), s.dot(d.x.data(), d.y.data(), n), mass);
        close(v->abs_sum(d.a.data(), n), s.abs_sum(d.a.data(), n), 1.0);
        s.tridiag(d.lo.data(), d.di.data(), d.up.data(), d.x.data(), r1.data(), n);
        v->tridiag(d.lo.data(), d.di.data(), d.up.data(), d.x.data(), r2.data(), n);
        for (std::size_t i = 0; i < n; ++i) close(r2[i], r1[i], 8.0);
    }
}

TEST_CASE("span wrappers check lengths") {
    std::vector<cplx> a(4), b(3), o(4);
    CHECK_THROWS_AS(k::cmul(a, b, o), ParameterError);
    CHECK_THROWS_AS(k::cdiv(a, b, o), ParameterError);
    std::vector<double> x(4), y(5);
    CHECK_THROWS_AS(k::dot(x, y), ParameterError);
    CHECK(!k::active().name.empty());
}
