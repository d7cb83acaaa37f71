#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dispersal/errors.hpp"
#include "dispersal/model.hpp"

#include <cmath>
#include <numbers>

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

}  // namespace

TEST_CASE("coefficient sampling") {
    const Grid g = build_grid(2.0, 4.0, 5);
    const Field c = sample_coefficient(CosineProfile{1.0, 0.5, 1.0}, g);
    CHECK(c.front() == doctest::Approx(1.5));
    CHECK(c[2] == doctest::Approx(1.0));
    CHECK(c.back() == doctest::Approx(0.5));
    CHECK(sample_coefficient(ConstantProfile{3.0}, g) == Field(5, 3.0));
    CHECK(sample_coefficient(SampledProfile{{1, 2, 3, 4, 5}}, g)[3] == 4.0);
    CHECK_THROWS_AS(sample_coefficient(SampledProfile{{1, 2}}, g), ConfigError);
    CHECK(is_constant(ConstantProfile{1.0}));
    CHECK(is_constant(CosineProfile{1.0, 0.0, 2.0}));
    CHECK_FALSE(is_constant(CosineProfile{1.0, 0.2, 2.0}));
    CHECK(constant_value(ConstantProfile{2.0}, "x") == 2.0);
    CHECK_THROWS_AS(constant_value(CosineProfile{1.0, 0.2, 1.0}, "x"), ConfigError);
}

TEST_CASE("parameter validation") {
    const Grid g = build_grid(0.0, 1.0, 11);
    ModelParams p = reference();
    CHECK_NOTHROW(sample_coefficients(p, g));
    p.d1 = 2.0;
    CHECK_THROWS_AS(sample_coefficients(p, g), ConfigError);
    p = reference();
    p.d3 = 0.0;
    CHECK_THROWS_AS(sample_coefficients(p, g), ConfigError);
    p = reference();
    p.alpha = ConstantProfile{-0.1};
    CHECK_THROWS_AS(sample_coefficients(p, g), ConfigError);
    p = reference();
    p.m = ConstantProfile{-1.0};
    CHECK_THROWS_AS(sample_coefficients(p, g), ConfigError);
    CHECK_NOTHROW(sample_coefficients_unchecked(p, g));
}

TEST_CASE("system names round-trip") {
    for (auto k : {SystemKind::two_species_general, SystemKind::submodel, SystemKind::logistic,
                   SystemKind::three_component}) {
        CHECK(system_kind_from_string(to_string(k)) == k);
    }
    CHECK(component_count(SystemKind::logistic) == 1);
    CHECK(component_count(SystemKind::three_component) == 3);
    CHECK_THROWS_AS(system_kind_from_string("bogus"), ConfigError);
}

TEST_CASE("reaction terms") {
    const Grid g = build_grid(0.0, 1.0, 3);
    ModelParams p;
    p.alpha = ConstantProfile{0.3};
    p.beta = ConstantProfile{0.7};
    p.m = ConstantProfile{2.0};
    p.b = 2.0;
    p.c = 0.5;
    const double u = 0.4;
    const double v = 0.9;
    const double w = 0.2;
    auto r = reaction_terms(SystemKind::two_species_general, p, g, std::vector{u, v}, 1);
    CHECK(r[0] == doctest::Approx(u * (2.0 - 0.3 - u - 2.0 * v) + 0.7 * v));
    CHECK(r[1] == doctest::Approx(v * (2.0 - 0.7 - v - 0.5 * u) + 0.3 * u));
    r = reaction_terms(SystemKind::submodel, p, g, std::vector{u, v}, 1);
    CHECK(r[0] == doctest::Approx(u * (2.0 - 0.3 - u - v) + 0.7 * v));
    r = reaction_terms(SystemKind::logistic, p, g, std::vector{w}, 0);
    CHECK(r[0] == doctest::Approx(w * (2.0 - w)));
    r = reaction_terms(SystemKind::three_component, p, g, std::vector{u, v, w}, 2);
    const double free = 2.0 - u - v - w;
    CHECK(r[0] == doctest::Approx(-0.3 * u + 0.7 * v + u * free));
    CHECK(r[1] == doctest::Approx(0.3 * u - 0.7 * v + v * free));
    CHECK(r[2] == doctest::Approx(w * free));
    CHECK_THROWS_AS(reaction_terms(SystemKind::submodel, p, g, std::vector{u}, 0), ConfigError);
    CHECK_THROWS_AS(reaction_terms(SystemKind::logistic, p, g, std::vector{u}, 3), ConfigError);
}

TEST_CASE("interaction root") {
    for (auto [b, c] : {std::pair{0.5, 0.5}, {1.0, 2.0}, {3.0, 0.2}}) {
        const double x = larger_interaction_root(b, c);
        CHECK((b * x - c) * (c * x - b) - 1.0 == doctest::Approx(0.0).epsilon(1e-12));
    }
}

TEST_CASE("regime classification") {
    const Grid g = build_grid(0.0, 1.0, 51);
    ModelParams p;
    p.m = CosineProfile{1.0, 0.2, 1.0};
    p.alpha = ConstantProfile{0.05};
    p.beta = ConstantProfile{0.05};
    p.b = 0.5;
    p.c = 0.5;
    const RegimeReport r = classify_regime(p, g);
    CHECK(r.in_S1);
    REQUIRE(r.competitive_rectangle);
    CHECK(r.competitive_rectangle->lower[0] == doctest::Approx(0.1));
    CHECK(r.competitive_rectangle->upper[1] == doctest::Approx(1.2));
    CHECK_NOTHROW(require_competitive_regime(p, g));

    p.m = CosineProfile{-0.1, 1.0, 1.0};
    const RegimeReport s = classify_regime(p, g);
    CHECK_FALSE(s.in_S1);
    CHECK(s.s1_skipped);
    CHECK_THROWS_AS(require_competitive_regime(p, g), HypothesisError);

    // Fast switching with weak interaction is cooperative.
    ModelParams q;
    q.m = ConstantProfile{0.5};
    q.alpha = ConstantProfile{2.0};
    q.beta = ConstantProfile{2.0};
    q.b = 0.5;
    q.c = 0.5;
    const RegimeReport t = classify_regime(q, g);
    CHECK(t.in_S2);
    REQUIRE(t.cooperative_rectangle);
    CHECK(t.cooperative_rectangle->upper[0] == doctest::Approx(4.0));
}

TEST_CASE("invariant rectangle points inward") {
    const Grid g = build_grid(0.0, 1.0, 41);
    ModelParams p;
    p.m = CosineProfile{0.4, 0.3, 1.0};
    p.b = 0.3;
    p.c = 2.0;
    const Rectangle r = invariant_rectangle(p, g);
    CHECK(upper_bounds_hold(p, sample_coefficients(p, g), r.upper[0], r.upper[1]));
    CHECK(r.contains(0.5 * r.upper[0], 0.5 * r.upper[1]));
    CHECK_FALSE(r.contains(2.0 * r.upper[0], 0.0));
}

TEST_CASE("competition hypothesis") {
    const Grid g = build_grid(0.0, 1.0, 41);
    ModelParams p = reference();
    CHECK_FALSE(check_competition_hypothesis(p, g));
    p.m = ConstantProfile{0.4};
    CHECK(check_competition_hypothesis(p, g));
    p = reference();
    p.m = CosineProfile{2.5, 0.3, 1.0};
    CHECK(check_competition_hypothesis(p, g));
    CHECK_THROWS_AS(require_competition_hypothesis(p, g), HypothesisError);
    p = reference();
    p.m = CosineProfile{-0.1, 0.3, 1.0};
    CHECK(check_competition_hypothesis(p, g));
    p = reference();
    p.alpha = CosineProfile{1.0, 0.1, 1.0};
    CHECK(check_competition_hypothesis(p, g));
}
