#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace uavmd {

// Real tridiagonal matrix; lo[0] and up[n-1] are unused.
struct Tridiagonal {
    std::vector<double> lo, di, up;

    std::size_t size() const noexcept { return di.size(); }
    void apply(std::span<const double> x, std::span<double> y) const;
    std::vector<double> apply(std::span<const double> x) const;
    void apply_transpose(std::span<const double> x, std::span<double> y) const;
};

// Symmetric positive-definite band matrix with kd super-diagonals, kept in
// LAPACK upper band storage.
class SymBand {
public:
    SymBand(std::size_t n, std::size_t kd);

    std::size_t size() const noexcept { return n_; }
    std::size_t bandwidth() const noexcept { return kd_; }

    double get(std::size_t i, std::size_t j) const;
    // Adds v at (i, j) and, implicitly, at (j, i).
    void add(std::size_t i, std::size_t j, double v);
    void add_diagonal(double v);
    // this += alpha * other; other's band must fit.
    void add_scaled(const SymBand& other, double alpha);

    void multiply(std::span<const double> x, std::span<double> y) const;
    std::vector<double> multiply(std::span<const double> x) const;

    // Cholesky solve. Throws NumericalError when the matrix is not positive
    // definite or its reciprocal condition number falls below 1e-14.
    std::vector<double> solve(std::span<const double> b) const;

    // T^T T for a tridiagonal T.
    static SymBand gram(const Tridiagonal& t);

private:
    double& at(std::size_t i, std::size_t j) { return ab_[(kd_ + i - j) + j * (kd_ + 1)]; }
    double at(std::size_t i, std::size_t j) const { return ab_[(kd_ + i - j) + j * (kd_ + 1)]; }

    std::size_t n_, kd_;
    std::vector<double> ab_;
};

} // namespace uavmd
