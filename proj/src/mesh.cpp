#include "dispersal/mesh.hpp"

#include "dispersal/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dispersal {

namespace {

void require_size(const Grid& grid, std::size_t got, const char* what) {
    if (got != grid.n) {
        throw ConfigError(std::string(what) + ": field has " + std::to_string(got) +
                          " values, grid has " + std::to_string(grid.n) + " nodes");
    }
}

}  // namespace

Grid build_grid(double a, double b, std::size_t n) {
    if (!(a < b) || !std::isfinite(a) || !std::isfinite(b)) {
        throw ConfigError("grid: require finite a < b");
    }
    if (n < 3) {
        throw ConfigError("grid: require at least 3 nodes, got " + std::to_string(n));
    }
    Grid g;
    g.a = a;
    g.b = b;
    g.n = n;
    g.h = (b - a) / static_cast<double>(n - 1);
    g.nodes.resize(n);
    g.weights.assign(n, g.h);
    for (std::size_t i = 0; i < n; ++i) {
        g.nodes[i] = a + static_cast<double>(i) * g.h;
    }
    g.nodes.back() = b;
    g.weights.front() = 0.5 * g.h;
    g.weights.back() = 0.5 * g.h;
    return g;
}

void NeumannLaplacian::apply(std::span<const double> f, std::span<double> out) const {
    const std::size_t n = diag.size();
    if (f.size() != n || out.size() != n) {
        throw ConfigError("laplacian: dimension mismatch");
    }
    out[0] = diag[0] * f[0] + upper[0] * f[1];
    for (std::size_t i = 1; i + 1 < n; ++i) {
        out[i] = lower[i] * f[i - 1] + diag[i] * f[i] + upper[i] * f[i + 1];
    }
    out[n - 1] = lower[n - 1] * f[n - 2] + diag[n - 1] * f[n - 1];
}

Field NeumannLaplacian::apply(std::span<const double> f) const {
    Field out(f.size());
    apply(f, out);
    return out;
}

NeumannLaplacian assemble_neumann_laplacian(const Grid& grid) {
    const std::size_t n = grid.n;
    const double s = 1.0 / (grid.h * grid.h);
    NeumannLaplacian L;
    L.lower.assign(n, s);
    L.diag.assign(n, -2.0 * s);
    L.upper.assign(n, s);
    L.lower[0] = 0.0;
    L.upper[0] = 2.0 * s;
    L.lower[n - 1] = 2.0 * s;
    L.upper[n - 1] = 0.0;
    return L;
}

double integrate(const Grid& grid, std::span<const double> f) {
    require_size(grid, f.size(), "integrate");
    double sum = 0.0;
    for (std::size_t i = 0; i < grid.n; ++i) {
        sum += grid.weights[i] * f[i];
    }
    return sum;
}

double inner(const Grid& grid, std::span<const double> f, std::span<const double> g) {
    require_size(grid, f.size(), "inner");
    require_size(grid, g.size(), "inner");
    double sum = 0.0;
    for (std::size_t i = 0; i < grid.n; ++i) {
        sum += grid.weights[i] * f[i] * g[i];
    }
    return sum;
}

double dirichlet_energy(const Grid& grid, std::span<const double> f) {
    require_size(grid, f.size(), "dirichlet_energy");
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < grid.n; ++i) {
        const double df = f[i + 1] - f[i];
        sum += df * df;
    }
    return sum / grid.h;
}

Field interpolate(const Grid& from, std::span<const double> f, const Grid& to) {
    require_size(from, f.size(), "interpolate");
    Field out(to.n);
    for (std::size_t j = 0; j < to.n; ++j) {
        const double x = std::clamp(to.nodes[j], from.a, from.b);
        const double s = (x - from.a) / from.h;
        auto i = static_cast<std::size_t>(std::floor(s));
        if (i >= from.n - 1) {
            i = from.n - 2;
        }
        const double t = s - static_cast<double>(i);
        out[j] = (1.0 - t) * f[i] + t * f[i + 1];
    }
    return out;
}

double sup_norm(std::span<const double> f) {
    double m = 0.0;
    for (double v : f) {
        m = std::max(m, std::abs(v));
    }
    return m;
}

double min_value(std::span<const double> f) {
    return *std::min_element(f.begin(), f.end());
}

double max_value(std::span<const double> f) {
    return *std::max_element(f.begin(), f.end());
}

}  // namespace dispersal
