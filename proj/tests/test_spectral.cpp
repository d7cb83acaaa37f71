#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dispersal/errors.hpp"
#include "dispersal/spectral.hpp"
#include "oracle.hpp"

#include <cmath>
#include <numbers>

using namespace dispersal;
using std::numbers::pi;

namespace {

Field cosine(const Grid& g, double mean, double amp, double freq) {
    return sample_coefficient(CosineProfile{mean, amp, freq}, g);
}

ModelParams switching(CoefficientSpec m, double alpha, double beta) {
    ModelParams p;
    p.d1 = 0.1;
    p.d2 = 1.0;
    p.m = std::move(m);
    p.alpha = ConstantProfile{alpha};
    p.beta = ConstantProfile{beta};
    return p;
}

double oracle_lambda(const EigenProblem& p) {
    const std::size_t K = p.components();
    std::vector<std::vector<std::vector<double>>> c(K, std::vector<std::vector<double>>(K));
    for (std::size_t k = 0; k < K; ++k) {
        for (std::size_t l = 0; l < K; ++l) {
            c[k][l] = p.entry(k, l);
        }
    }
    return oracle::rightmost(oracle::system(p.grid.n, p.grid.h, p.diffusions, c));
}

}  // namespace

TEST_CASE("constant potential") {
    const Grid g = build_grid(0.0, 1.0, 51);
    const EigenResult r = principal_eigen(scalar_problem(g, 0.3, Field(g.n, -1.25)));
    CHECK(r.lambda == doctest::Approx(-1.25).epsilon(1e-12));
    CHECK(r.residual < 1e-9);
    CHECK(sup_norm(r.eigenfunctions[0]) == doctest::Approx(1.0));
    CHECK(min_value(r.eigenfunctions[0]) == doctest::Approx(1.0));
}

TEST_CASE("constant switching pair") {
    const Grid g = build_grid(0.0, 1.0, 41);
    const double m = 0.7;
    const double a = 0.5;
    const double b = 2.0;
    const EigenProblem p =
        switching_problem(g, 0.1, 1.0, Field(g.n, a), Field(g.n, b), Field(g.n, m));
    const EigenResult r = principal_eigen(p);
    CHECK(r.lambda == doctest::Approx(m).epsilon(1e-12));
    // Principal direction is (beta, alpha), the adjoint one is (1, 1).
    CHECK(r.eigenfunctions[0][7] / r.eigenfunctions[1][7] == doctest::Approx(b / a));
    const EigenResult s = adjoint_principal_eigen(p);
    CHECK(s.lambda == doctest::Approx(m).epsilon(1e-12));
    CHECK(s.eigenfunctions[0][7] / s.eigenfunctions[1][7] == doctest::Approx(1.0));
}

TEST_CASE("power iteration agrees with the dense reference") {
    const Grid g = build_grid(0.0, 1.0, 61);
    SUBCASE("scalar") {
        for (double d : {0.01, 0.2, 2.0}) {
            const Field e = cosine(g, 0.1, 1.0, 2.0);
            const double lp = principal_eigen(scalar_problem(g, d, e)).lambda;
            CHECK(lp == doctest::Approx(oracle_lambda(scalar_problem(g, d, e))).epsilon(1e-10));
            CHECK(lp == doctest::Approx(oracle::scalar_symmetric(g.n, g.h, d, e)).epsilon(1e-10));
        }
    }
    SUBCASE("switching") {
        const EigenProblem p = switching_problem(g, 0.05, 0.8, cosine(g, 1.0, 0.4, 1.0),
                                                 cosine(g, 0.6, 0.2, 3.0), cosine(g, -0.2, 1.0, 1.0));
        const EigenResult r = principal_eigen(p);
        CHECK(r.lambda == doctest::Approx(oracle_lambda(p)).epsilon(1e-10));
        CHECK(r.lower_bound <= r.lambda);
        CHECK(r.upper_bound >= r.lambda);
        CHECK(min_value(r.eigenfunctions[0]) > 0.0);
        CHECK(min_value(r.eigenfunctions[1]) > 0.0);
        CHECK(adjoint_principal_eigen(p).lambda == doctest::Approx(r.lambda).epsilon(1e-10));
        CHECK(dense_rightmost_eigenvalue(assemble_dense(p), 2 * g.n) ==
              doctest::Approx(r.lambda).epsilon(1e-10));
    }
}

TEST_CASE("operator apply matches the eigen relation") {
    const Grid g = build_grid(0.0, 1.0, 81);
    const EigenProblem p = switching_problem(g, 0.1, 1.0, Field(g.n, 1.0), Field(g.n, 1.0),
                                             cosine(g, 0.4, 0.3, 1.0));
    const EigenResult r = principal_eigen(p);
    const auto ax = apply_operator(p, r.eigenfunctions);
    for (std::size_t k = 0; k < 2; ++k) {
        for (std::size_t i = 0; i < g.n; ++i) {
            CHECK(ax[k][i] == doctest::Approx(r.lambda * r.eigenfunctions[k][i]).epsilon(1e-8));
        }
    }
}

TEST_CASE("problem validation") {
    const Grid g = build_grid(0.0, 1.0, 11);
    EigenProblem p = switching_problem(g, 0.1, 1.0, Field(g.n, 1.0), Field(g.n, 1.0), Field(g.n, 0.0));
    p.coupling[1][3] = -0.1;
    CHECK_THROWS_AS(principal_eigen(p), ConfigError);
    p = switching_problem(g, 0.1, 1.0, Field(g.n, 0.0), Field(g.n, 1.0), Field(g.n, 0.0));
    CHECK_THROWS_AS(principal_eigen(p), ConfigError);
    CHECK_THROWS_AS(principal_eigen(scalar_problem(g, 0.0, Field(g.n, 1.0))), ConfigError);
    CHECK_THROWS_AS(principal_eigen(scalar_problem(g, 1.0, Field(3, 1.0))), ConfigError);
}

TEST_CASE("derivative in the growth scaling") {
    const Grid g = build_grid(0.0, 1.0, 201);
    ModelParams p = switching(CosineProfile{-0.1, 1.0, 1.0}, 1.0, 0.5);
    p.alpha = CosineProfile{1.0, 0.5, 2.0};
    const LambdaPrimeReport r = lambda_prime_at_zero(p, g);
    CHECK(std::abs(r.lambda_at_zero) < 1e-10);
    const double h = 1e-4;
    const double fd = (lambda_of_mu(p, g, h) - lambda_of_mu(p, g, -h)) / (2.0 * h);
    CHECK(r.value == doctest::Approx(fd).epsilon(1e-6));
    CHECK(r.flux_deviation < 1e-9);
    CHECK(r.flux_constant == doctest::Approx(r.flux_formula).epsilon(1e-8));

    const ModelParams q = switching(CosineProfile{-0.1, 1.0, 1.0}, 3.0, 1.0);
    CHECK(lambda_prime_at_zero(q, g).value == doctest::Approx(-0.1).epsilon(1e-10));
}

TEST_CASE("root scanning") {
    auto f = [](double x) { return (x - 0.3) * (x - 2.0); };
    const auto roots = find_roots("r", f, 0.1, 10.0);
    REQUIRE(roots.size() == 2);
    CHECK(roots[0].root == doctest::Approx(0.3).epsilon(1e-9));
    CHECK(roots[1].root == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(roots[0].sign_left == 1);
    CHECK(roots[0].sign_right == -1);
    CHECK(find_roots("r", [](double x) { return x + 1.0; }, 0.0, 1.0).empty());
    CHECK_THROWS_AS(bisect_root("r", f, 0.5, 1.0, f(0.5), f(1.0)), HypothesisError);
    RootScanOptions o;
    o.max_roots = 1;
    CHECK_THROWS_AS(find_roots("r", f, 0.1, 10.0, o), ConfigError);
    o = {};
    o.log_spaced = false;
    CHECK(find_roots("r", [](double x) { return std::sin(x); }, -1.0, 10.0, o).size() == 4);
}

TEST_CASE("scaling family") {
    const Grid g = build_grid(0.0, 1.0, 101);
    const EigenProblem base = switching_problem(g, 1.0, 10.0, Field(g.n, 0.05), Field(g.n, 1.0),
                                                cosine(g, -0.5, 5.0, 1.0));
    for (double mu : {0.5, 4.0}) {
        const double lhs = principal_eigen(scaled_problem(base, 1.0, mu)).lambda;
        const double rhs = mu * principal_eigen(scaled_problem(base, 1.0 / mu, 1.0)).lambda;
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
    }
    const auto roots = find_scaling_roots(base, 1e-3, 1e3);
    REQUIRE(roots.size() == 1);
    CHECK(std::abs(principal_eigen(scaled_problem(base, 1.0, roots[0].root)).lambda) < 1e-8);
}

TEST_CASE("critical growth scaling") {
    const Grid g = build_grid(0.0, 1.0, 101);
    const ModelParams p = switching(CosineProfile{-0.2, 1.0, 1.0}, 1.0, 1.0);
    const auto roots = find_mu_roots(p, g, 1e-3, 1e3);
    REQUIRE(roots.size() == 1);
    CHECK(roots[0].name == "mu_zero");
    CHECK(std::abs(lambda_of_mu(p, g, roots[0].root)) < 1e-8);
}
