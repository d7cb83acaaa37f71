#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace dispersal {

/// Square band matrix with kl sub- and ku super-diagonals, row-major band storage.
class BandMatrix {
public:
    BandMatrix() = default;
    BandMatrix(std::size_t n, std::size_t kl, std::size_t ku);

    [[nodiscard]] std::size_t size() const noexcept { return n_; }
    [[nodiscard]] std::size_t lower_bandwidth() const noexcept { return kl_; }
    [[nodiscard]] std::size_t upper_bandwidth() const noexcept { return ku_; }

    /// True when (i, j) lies inside the band.
    [[nodiscard]] bool in_band(std::size_t i, std::size_t j) const noexcept;

    double& operator()(std::size_t i, std::size_t j);
    double operator()(std::size_t i, std::size_t j) const;

    /// out = A x
    void multiply(std::span<const double> x, std::span<double> out) const;

private:
    friend class BandLU;
    std::size_t n_ = 0;
    std::size_t kl_ = 0;
    std::size_t ku_ = 0;
    std::vector<double> data_;
};

/// LU factorisation without pivoting. Intended for the matrices this code
/// produces: nonsingular M-matrices (shifted negatives of cooperative
/// operators, I - dt*d*Laplacian) where every pivot is positive.
/// Throws NumericalError on a non-positive or vanishing pivot.
class BandLU {
public:
    explicit BandLU(BandMatrix a);

    void solve_in_place(std::span<double> rhs) const;
    [[nodiscard]] std::size_t size() const noexcept { return lu_.n_; }

private:
    BandMatrix lu_;
};

/// Thomas algorithm for a tridiagonal system held as three diagonals.
/// Diagonals are copied; the right-hand side is overwritten with the solution.
class TridiagonalLU {
public:
    TridiagonalLU(std::span<const double> lower, std::span<const double> diag,
                  std::span<const double> upper);

    void solve_in_place(std::span<double> rhs) const;
    [[nodiscard]] std::size_t size() const noexcept { return diag_.size(); }

private:
    std::vector<double> lower_;
    std::vector<double> diag_;   // pivots after elimination
    std::vector<double> upper_;
};

}  // namespace dispersal
