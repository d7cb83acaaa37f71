#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dispersal/banded.hpp"
#include "dispersal/errors.hpp"

#include <Eigen/Dense>

#include <random>
#include <utility>

using namespace dispersal;

namespace {

// Diagonally dominant M-matrix with the given band.
BandMatrix m_matrix(std::size_t n, std::size_t kl, std::size_t ku, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.1, 1.0);
    BandMatrix a(n, kl, ku);
    for (std::size_t i = 0; i < n; ++i) {
        double off = 0.0;
        for (std::size_t j = (i > kl ? i - kl : 0); j <= std::min(n - 1, i + ku); ++j) {
            if (j != i) {
                a(i, j) = -u(rng);
                off += -a(i, j);
            }
        }
        a(i, i) = off + u(rng);
    }
    return a;
}

}  // namespace

TEST_CASE("band storage and product") {
    BandMatrix a(4, 1, 2);
    CHECK(a.in_band(0, 2));
    CHECK_FALSE(a.in_band(0, 3));
    CHECK_FALSE(a.in_band(2, 0));
    a(0, 0) = 1.0;
    a(0, 2) = 2.0;
    a(3, 2) = -1.0;
    CHECK(a(0, 2) == 2.0);
    CHECK(std::as_const(a)(2, 0) == 0.0);
    CHECK_THROWS_AS(a(2, 0) = 1.0, ConfigError);
    std::vector<double> x{1.0, 1.0, 1.0, 1.0};
    std::vector<double> y(4);
    a.multiply(x, y);
    CHECK(y[0] == 3.0);
    CHECK(y[3] == -1.0);
}

TEST_CASE("band LU solves against a dense reference") {
    for (auto [kl, ku] : {std::pair<std::size_t, std::size_t>{1, 1}, {2, 2}, {3, 1}}) {
        const std::size_t n = 30;
        const BandMatrix a = m_matrix(n, kl, ku, 11 + kl * 7 + ku);
        Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (a.in_band(i, j)) {
                    dense(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = a(i, j);
                }
            }
        }
        std::vector<double> b(n);
        Eigen::VectorXd bv(n);
        for (std::size_t i = 0; i < n; ++i) {
            b[i] = std::sin(static_cast<double>(i));
            bv(static_cast<Eigen::Index>(i)) = b[i];
        }
        const Eigen::VectorXd want = dense.partialPivLu().solve(bv);
        BandLU lu(a);
        lu.solve_in_place(b);
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(b[i] == doctest::Approx(want(static_cast<Eigen::Index>(i))).epsilon(1e-12));
        }
    }
}

TEST_CASE("band LU rejects a non-positive pivot") {
    BandMatrix a(3, 1, 1);
    a(0, 0) = 0.0;
    a(1, 1) = 1.0;
    a(2, 2) = 1.0;
    CHECK_THROWS_AS(BandLU{a}, NumericalError);
}

TEST_CASE("tridiagonal solve") {
    const std::size_t n = 6;
    std::vector<double> lo(n, -1.0);
    std::vector<double> di(n, 3.0);
    std::vector<double> up(n, -1.0);
    TridiagonalLU t(lo, di, up);
    std::vector<double> x{1.0, 2.0, 3.0, 4.0, 5.0, 6.0};
    std::vector<double> rhs(n);
    for (std::size_t i = 0; i < n; ++i) {
        rhs[i] = 3.0 * x[i] - (i > 0 ? x[i - 1] : 0.0) - (i + 1 < n ? x[i + 1] : 0.0);
    }
    t.solve_in_place(rhs);
    for (std::size_t i = 0; i < n; ++i) {
        CHECK(rhs[i] == doctest::Approx(x[i]).epsilon(1e-13));
    }
}
