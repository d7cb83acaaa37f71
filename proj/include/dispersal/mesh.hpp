#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace dispersal {

/// Nodal values aligned with the nodes of a Grid.
using Field = std::vector<double>;

/// Uniform mesh of the interval [a, b] with trapezoid quadrature weights.
struct Grid {
    double a = 0.0;
    double b = 1.0;
    std::size_t n = 0;
    double h = 0.0;
    std::vector<double> nodes;
    std::vector<double> weights;

    [[nodiscard]] std::size_t size() const noexcept { return n; }
    [[nodiscard]] double length() const noexcept { return b - a; }
};

/// Throws ConfigError unless a < b and n >= 3.
Grid build_grid(double a, double b, std::size_t n);

/// Second-difference Laplacian with mirror (ghost-node) Neumann closure.
///
/// Stored as three diagonals. Interior rows are [1, -2, 1]/h^2; the end rows
/// are [-2, 2]/h^2 so that constants lie in the kernel and the operator is
/// symmetric in the trapezoid inner product.
struct NeumannLaplacian {
    std::vector<double> lower;  // lower[i] multiplies f[i-1]; lower[0] unused
    std::vector<double> diag;
    std::vector<double> upper;  // upper[i] multiplies f[i+1]; upper[n-1] unused

    [[nodiscard]] std::size_t size() const noexcept { return diag.size(); }

    /// out = L f.  Sizes must match.
    void apply(std::span<const double> f, std::span<double> out) const;
    [[nodiscard]] Field apply(std::span<const double> f) const;
};

NeumannLaplacian assemble_neumann_laplacian(const Grid& grid);

/// Trapezoid quadrature of f over the grid.
double integrate(const Grid& grid, std::span<const double> f);

/// Trapezoid quadrature of f*g.
double inner(const Grid& grid, std::span<const double> f, std::span<const double> g);

/// Sum of (f[i+1]-f[i])^2 / h, which equals -<f, L f> for the Laplacian above.
double dirichlet_energy(const Grid& grid, std::span<const double> f);

/// Linear interpolation of nodal values from one grid onto the nodes of another.
Field interpolate(const Grid& from, std::span<const double> f, const Grid& to);

double sup_norm(std::span<const double> f);
double min_value(std::span<const double> f);
double max_value(std::span<const double> f);

}  // namespace dispersal
