#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dispersal/errors.hpp"
#include "dispersal/mesh.hpp"
#include "oracle.hpp"

#include <cmath>
#include <numbers>

using namespace dispersal;
using std::numbers::pi;

TEST_CASE("grid construction") {
    const Grid g = build_grid(-1.0, 2.0, 31);
    CHECK(g.n == 31);
    CHECK(g.h == doctest::Approx(0.1));
    CHECK(g.nodes.front() == -1.0);
    CHECK(g.nodes.back() == 2.0);
    double total = 0.0;
    for (double w : g.weights) {
        total += w;
    }
    CHECK(total == doctest::Approx(3.0).epsilon(1e-14));
    CHECK_THROWS_AS(build_grid(1.0, 1.0, 10), ConfigError);
    CHECK_THROWS_AS(build_grid(0.0, 1.0, 2), ConfigError);
}

TEST_CASE("trapezoid quadrature is exact for affine functions") {
    const Grid g = build_grid(0.0, 2.0, 11);
    Field f(g.n);
    for (std::size_t i = 0; i < g.n; ++i) {
        f[i] = 3.0 * g.nodes[i] - 1.0;
    }
    CHECK(integrate(g, f) == doctest::Approx(4.0).epsilon(1e-14));
    Field one(g.n, 1.0);
    CHECK(inner(g, f, one) == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("Laplacian matches the dense reference") {
    const std::size_t n = 17;
    const Grid g = build_grid(0.0, 1.0, n);
    const NeumannLaplacian L = assemble_neumann_laplacian(g);
    const Eigen::MatrixXd ref = oracle::laplacian(n, g.h);
    Field f(n);
    Eigen::VectorXd fv(n);
    for (std::size_t i = 0; i < n; ++i) {
        f[i] = std::sin(5.0 * g.nodes[i]) + g.nodes[i];
        fv(static_cast<Eigen::Index>(i)) = f[i];
    }
    const Field lf = L.apply(f);
    const Eigen::VectorXd want = ref * fv;
    for (std::size_t i = 0; i < n; ++i) {
        CHECK(lf[i] == doctest::Approx(want(static_cast<Eigen::Index>(i))).epsilon(1e-12));
    }
}

TEST_CASE("Laplacian is second order on cos(pi x)") {
    double prev = 0.0;
    for (std::size_t n : {51u, 101u, 201u}) {
        const Grid g = build_grid(0.0, 1.0, n);
        Field f(n);
        for (std::size_t i = 0; i < n; ++i) {
            f[i] = std::cos(pi * g.nodes[i]);
        }
        const Field lf = assemble_neumann_laplacian(g).apply(f);
        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            err = std::max(err, std::abs(lf[i] + pi * pi * f[i]));
        }
        if (prev > 0.0) {
            CHECK(prev / err > 3.9);
        }
        prev = err;
    }
}

TEST_CASE("constants span the kernel and the operator is symmetric") {
    const Grid g = build_grid(0.0, 3.0, 41);
    const NeumannLaplacian L = assemble_neumann_laplacian(g);
    CHECK(sup_norm(L.apply(Field(g.n, 2.5))) < 1e-9);
    Field f(g.n);
    Field q(g.n);
    for (std::size_t i = 0; i < g.n; ++i) {
        f[i] = std::exp(-g.nodes[i]);
        q[i] = g.nodes[i] * g.nodes[i];
    }
    CHECK(inner(g, f, L.apply(q)) == doctest::Approx(inner(g, L.apply(f), q)).epsilon(1e-12));
    CHECK(dirichlet_energy(g, f) == doctest::Approx(-inner(g, f, L.apply(f))).epsilon(1e-12));
}

TEST_CASE("field helpers") {
    const Field f{1.0, -3.0, 2.0};
    CHECK(sup_norm(f) == 3.0);
    CHECK(min_value(f) == -3.0);
    CHECK(max_value(f) == 2.0);
    const Grid coarse = build_grid(0.0, 1.0, 3);
    const Grid fine = build_grid(0.0, 1.0, 5);
    const Field fi = interpolate(coarse, f, fine);
    CHECK(fi[1] == doctest::Approx(-1.0));
    CHECK(fi[3] == doctest::Approx(-0.5));
    CHECK(fi[4] == doctest::Approx(2.0));
    CHECK_THROWS_AS(integrate(fine, f), ConfigError);
}
