#include "uavmd/banded.hpp"
#include "uavmd/error.hpp"
#include "uavmd/kernels.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <string>

namespace uavmd {

void Tridiagonal::apply(std::span<const double> x, std::span<double> y) const {
    kernels::tridiag(lo, di, up, x, y);
}

std::vector<double> Tridiagonal::apply(std::span<const double> x) const {
    std::vector<double> y(x.size());
    apply(x, y);
    return y;
}

void Tridiagonal::apply_transpose(std::span<const double> x, std::span<double> y) const {
    const std::size_t n = size();
    if (x.size() != n || y.size() != n) throw ParameterError("tridiagonal: length mismatch");
    for (std::size_t k = 0; k < n; ++k) {
        double v = di[k] * x[k];
        if (k > 0) v += up[k - 1] * x[k - 1];
        if (k + 1 < n) v += lo[k + 1] * x[k + 1];
        y[k] = v;
    }
}

SymBand::SymBand(std::size_t n, std::size_t kd) : n_(n), kd_(kd), ab_((kd + 1) * n, 0.0) {
    if (n == 0) throw ParameterError("band matrix: empty");
}

double SymBand::get(std::size_t i, std::size_t j) const {
    if (i > j) std::swap(i, j);
    if (j - i > kd_) return 0.0;
    return at(i, j);
}

void SymBand::add(std::size_t i, std::size_t j, double v) {
    if (i > j) std::swap(i, j);
    if (j - i > kd_ || j >= n_) throw ParameterError("band matrix: entry outside the band");
    at(i, j) += v;
}

void SymBand::add_diagonal(double v) {
    for (std::size_t i = 0; i < n_; ++i) at(i, i) += v;
}

void SymBand::add_scaled(const SymBand& other, double alpha) {
    if (other.n_ != n_ || other.kd_ > kd_) throw ParameterError("band matrix: incompatible shapes");
    for (std::size_t j = 0; j < n_; ++j)
        for (std::size_t i = (j > other.kd_ ? j - other.kd_ : 0); i <= j; ++i) at(i, j) += alpha * other.at(i, j);
}

void SymBand::multiply(std::span<const double> x, std::span<double> y) const {
    if (x.size() != n_ || y.size() != n_) throw ParameterError("band matrix: length mismatch");
    std::fill(y.begin(), y.end(), 0.0);
    for (std::size_t j = 0; j < n_; ++j) {
        y[j] += at(j, j) * x[j];
        for (std::size_t i = (j > kd_ ? j - kd_ : 0); i < j; ++i) {
            const double a = at(i, j);
            y[i] += a * x[j];
            y[j] += a * x[i];
        }
    }
}

std::vector<double> SymBand::multiply(std::span<const double> x) const {
    std::vector<double> y(n_);
    multiply(x, y);
    return y;
}

std::vector<double> SymBand::solve(std::span<const double> b) const {
    if (b.size() != n_) throw ParameterError("band solve: length mismatch");
    const auto n = static_cast<lapack_int>(n_);
    const auto kd = static_cast<lapack_int>(kd_);
    const auto ldab = kd + 1;
    double anorm = 0.0;
    for (std::size_t j = 0; j < n_; ++j) {
        double col = 0.0;
        for (std::size_t i = (j > kd_ ? j - kd_ : 0); i < std::min(n_, j + kd_ + 1); ++i) col += std::abs(get(i, j));
        anorm = std::max(anorm, col);
    }
    std::vector<double> fac = ab_;
    lapack_int info = LAPACKE_dpbtrf(LAPACK_COL_MAJOR, 'U', n, kd, fac.data(), ldab);
    if (info > 0)
        throw NumericalError("band solve: matrix not positive definite (leading minor " + std::to_string(info) + ")");
    if (info < 0) throw NumericalError("band solve: dpbtrf argument error");
    double rcond = 0.0;
    LAPACKE_dpbcon(LAPACK_COL_MAJOR, 'U', n, kd, fac.data(), ldab, anorm, &rcond);
    if (!(rcond >= 1e-14))
        throw NumericalError("band solve: ill-conditioned system (rcond " + std::to_string(rcond) + ")");
    std::vector<double> x(b.begin(), b.end());
    info = LAPACKE_dpbtrs(LAPACK_COL_MAJOR, 'U', n, kd, 1, fac.data(), ldab, x.data(), n);
    if (info != 0) throw NumericalError("band solve: dpbtrs failed");
    return x;
}

SymBand SymBand::gram(const Tridiagonal& t) {
    const std::size_t n = t.size();
    SymBand g(n, n > 2 ? 2 : n - 1);
    // Row k of T touches columns k-1, k, k+1.
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t cols[3];
        double vals[3];
        std::size_t c = 0;
        if (k > 0) cols[c] = k - 1, vals[c++] = t.lo[k];
        cols[c] = k, vals[c++] = t.di[k];
        if (k + 1 < n) cols[c] = k + 1, vals[c++] = t.up[k];
        for (std::size_t a = 0; a < c; ++a)
            for (std::size_t b = a; b < c; ++b) g.at(cols[a], cols[b]) += vals[a] * vals[b];
    }
    return g;
}

} // namespace uavmd
