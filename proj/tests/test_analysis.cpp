#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dispersal/analysis.hpp"
#include "dispersal/errors.hpp"
#include "oracle.hpp"

#include <cmath>
#include <limits>

using namespace dispersal;

namespace {

ModelParams reference() {
    ModelParams p;
    p.d1 = 0.1;
    p.d2 = 1.0;
    p.d3 = 0.4;
    p.alpha = ConstantProfile{1.0};
    p.beta = ConstantProfile{1.0};
    p.m = CosineProfile{0.4, 0.3, 1.0};
    return p;
}

// lambda2 by dense reference: switching pair with potential m - w.
double oracle_lambda2(const Grid& g, const ModelParams& p, const Field& w) {
    const Field m = sample_coefficient(p.m, g);
    const double a = constant_value(p.alpha, "alpha");
    const double b = constant_value(p.beta, "beta");
    std::vector<std::vector<std::vector<double>>> c(2, std::vector<std::vector<double>>(2));
    c[0][0].resize(g.n);
    c[1][1].resize(g.n);
    for (std::size_t i = 0; i < g.n; ++i) {
        c[0][0][i] = m[i] - w[i] - a;
        c[1][1][i] = m[i] - w[i] - b;
    }
    c[0][1] = Field(g.n, b);
    c[1][0] = Field(g.n, a);
    return oracle::rightmost(oracle::system(g.n, g.h, {p.d1, p.d2}, c));
}

}  // namespace

TEST_CASE("eigenvalue classification") {
    CHECK(classify_eigenvalue(-1e-3) == Stability::linearly_stable);
    CHECK(classify_eigenvalue(1e-3) == Stability::linearly_unstable);
    CHECK(classify_eigenvalue(1e-10) == Stability::marginal);
    CHECK(to_string(Stability::marginal) == "marginal");
    CHECK(to_string(EquilibriumKind::semi_w) == "semi_w");
}

TEST_CASE("threshold names and brackets") {
    for (auto t : {ThresholdName::mu_star, ThresholdName::mu_zero, ThresholdName::d_c,
                   ThresholdName::d_0, ThresholdName::beta_c, ThresholdName::alpha_c}) {
        CHECK(threshold_from_string(to_string(t)) == t);
    }
    CHECK_THROWS_AS(threshold_from_string("d_x"), ConfigError);
    const ModelParams p = reference();
    auto [lo, hi] = threshold_bracket(ThresholdName::d_c, p);
    CHECK(lo == doctest::Approx(0.1));
    CHECK(hi == doctest::Approx(0.55));
    std::tie(lo, hi) = threshold_bracket(ThresholdName::beta_c, p);
    CHECK(lo == 0.0);
    CHECK(hi == doctest::Approx(2.0));
    std::tie(lo, hi) = threshold_bracket(ThresholdName::alpha_c, p);
    CHECK(lo == doctest::Approx(0.5));
    CHECK(hi == std::numeric_limits<double>::infinity());
    ModelParams q = p;
    q.d3 = 1.5;
    CHECK_THROWS_AS(threshold_bracket(ThresholdName::beta_c, q), ConfigError);
}

TEST_CASE("d_c against an independent bisection") {
    const Grid g = build_grid(0.0, 1.0, 101);
    const ModelParams p = reference();
    const ThresholdResult r = find_threshold(ThresholdName::d_c, p, g);
    const SteadyResult uv = switching_steady_state(p, g);
    Field e = sample_coefficient(p.m, g);
    for (std::size_t i = 0; i < g.n; ++i) {
        e[i] -= uv.state.components[0][i] + uv.state.components[1][i];
    }
    const double want = oracle::bisect(
        [&](double d) { return oracle::scalar_symmetric(g.n, g.h, d, e); }, 0.1, 0.55, 60);
    CHECK(r.root == doctest::Approx(want).epsilon(1e-7));
    CHECK(r.residual <= 1e-8);
}

TEST_CASE("beta_c and alpha_c against an independent bisection") {
    const Grid g = build_grid(0.0, 1.0, 61);
    const ModelParams p = reference();
    const Field w = logistic_steady_state(p, g).state.components[0];
    const ThresholdResult b = find_threshold(ThresholdName::beta_c, p, g);
    const double bw = oracle::bisect(
        [&](double beta) {
            return oracle_lambda2(g, with_parameter(p, SweepParameter::beta, beta), w);
        },
        1e-6, 2.0, 50);
    CHECK(b.root == doctest::Approx(bw).epsilon(1e-6));
    const ThresholdResult a = find_threshold(ThresholdName::alpha_c, p, g);
    const double aw = oracle::bisect(
        [&](double alpha) {
            return oracle_lambda2(g, with_parameter(p, SweepParameter::alpha, alpha), w);
        },
        0.5, 8.0, 50);
    CHECK(a.root == doctest::Approx(aw).epsilon(1e-6));
    CHECK(a.root > 0.5);
}

TEST_CASE("switching-rate sensitivity") {
    const Grid g = build_grid(0.0, 1.0, 81);
    const ModelParams p = reference();
    const Field w = logistic_steady_state(p, g).state.components[0];
    const double h = 1e-4;
    for (auto [wrt, par] : {std::pair{SwitchingRate::beta, SweepParameter::beta},
                            {SwitchingRate::alpha, SweepParameter::alpha}}) {
        const double fd = (invasion_rate_of_uv(with_parameter(p, par, 1.0 + h), g, w) -
                           invasion_rate_of_uv(with_parameter(p, par, 1.0 - h), g, w)) /
                          (2.0 * h);
        const SensitivityReport s = lambda2_sensitivity(p, g, wrt, w);
        CHECK(s.derivative == doctest::Approx(fd).epsilon(1e-6));
        CHECK(s.lambda2 == doctest::Approx(invasion_rate_of_uv(p, g, w)));
    }
}

TEST_CASE("linearised stability") {
    const Grid g = build_grid(0.0, 1.0, 41);
    ModelParams p;
    p.m = CosineProfile{1.0, 0.2, 1.0};
    p.alpha = ConstantProfile{0.05};
    p.beta = ConstantProfile{0.05};
    p.b = 0.5;
    p.c = 0.5;
    const SteadyResult eq = integrate_to_steady(SystemKind::two_species_general, p, g,
                                                constant_state(g, {0.5, 0.5}));
    const StabilityReport s =
        linearized_stability(SystemKind::two_species_general, p, g, eq, EquilibriumKind::positive);
    CHECK(s.classification == Stability::linearly_stable);

    // Constant m violates the competition hypothesis.
    ModelParams q = reference();
    q.m = ConstantProfile{0.5};
    const SteadyResult uv = switching_steady_state(q, g);
    CHECK_THROWS_AS(
        linearized_stability(SystemKind::submodel, q, g, uv, EquilibriumKind::semi_uv),
        HypothesisError);

    const ModelParams r = reference();
    const SteadyResult ruv = switching_steady_state(r, g);
    const StabilityReport su =
        linearized_stability(SystemKind::submodel, r, g, ruv, EquilibriumKind::semi_uv);
    CHECK(su.principal_eigenvalue ==
          doctest::Approx(invasion_rate_of_w(r, g, ruv.state.components[0],
                                             ruv.state.components[1], r.d3)));
    const StabilityReport tr =
        linearized_stability(SystemKind::submodel, r, g, ruv, EquilibriumKind::trivial);
    CHECK(tr.classification == Stability::linearly_unstable);
}

TEST_CASE("outcome classification") {
    CHECK(classify_outcome({1e-8, 1e-8, 0.3}) == Outcome::w_wins);
    CHECK(classify_outcome({0.2, 0.2, 1e-9}) == Outcome::uv_wins);
    CHECK(classify_outcome({0.2, 0.2, 0.1}) == Outcome::undetermined);
    CHECK_THROWS_AS(classify_outcome({0.2, 0.2}), ConfigError);
    CHECK(sweep_parameter_from_string("alpha") == SweepParameter::alpha);
    CHECK_THROWS_AS(sweep_parameter_from_string("gamma"), ConfigError);
}

TEST_CASE("d3 sweep at coarse resolution") {
    const Grid g = build_grid(0.0, 1.0, 31);
    const SweepReport s = sweep_outcomes(reference(), g, SweepParameter::d3, {1.5, 0.05});
    REQUIRE(s.points.size() == 2);
    CHECK(s.points[0].value == 0.05);
    CHECK(s.points[0].outcome == Outcome::w_wins);
    CHECK(s.points[1].outcome == Outcome::uv_wins);
    CHECK(s.points[0].lambda_uv0 > 0.0);
    CHECK(s.points[1].lambda_00w > 0.0);
    REQUIRE(s.C1);
    REQUIRE(s.C2);
    CHECK(*s.C1 == 0.05);
    CHECK(*s.C2 == 1.5);

    ModelParams bad = reference();
    bad.m = ConstantProfile{0.5};
    const SweepReport e = sweep_outcomes(bad, g, SweepParameter::d3, {0.3});
    CHECK(e.points[0].error);
    CHECK(e.points[0].outcome == Outcome::undetermined);
}
