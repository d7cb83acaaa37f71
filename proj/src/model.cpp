#include "dispersal/model.hpp"

#include "dispersal/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace dispersal {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_nonnegative_somewhere_positive(const Field& f, const char* name) {
    if (min_value(f) < 0.0) {
        throw ConfigError(std::string(name) + " must be nonnegative on the grid");
    }
    if (!(max_value(f) > 0.0)) {
        throw ConfigError(std::string(name) + " must be positive somewhere");
    }
}

}  // namespace

Field sample_coefficient(const CoefficientSpec& spec, const Grid& grid) {
    return std::visit(
        overloaded{
            [&](const ConstantProfile& p) { return Field(grid.n, p.value); },
            [&](const CosineProfile& p) {
                Field f(grid.n);
                for (std::size_t i = 0; i < grid.n; ++i) {
                    const double s = (grid.nodes[i] - grid.a) / grid.length();
                    f[i] = p.mean + p.amplitude * std::cos(p.frequency * std::numbers::pi * s);
                }
                return f;
            },
            [&](const SampledProfile& p) {
                if (p.values.size() != grid.n) {
                    throw ConfigError("sampled coefficient has " + std::to_string(p.values.size()) +
                                      " values, grid has " + std::to_string(grid.n) + " nodes");
                }
                return Field(p.values);
            },
        },
        spec);
}

bool is_constant(const CoefficientSpec& spec) {
    return std::visit(overloaded{
                          [](const ConstantProfile&) { return true; },
                          [](const CosineProfile& p) { return p.amplitude == 0.0; },
                          [](const SampledProfile& p) {
                              return p.values.empty() ||
                                     std::all_of(p.values.begin(), p.values.end(),
                                                 [&](double v) { return v == p.values.front(); });
                          },
                      },
                      spec);
}

double constant_value(const CoefficientSpec& spec, std::string_view name) {
    if (!is_constant(spec)) {
        throw ConfigError(std::string(name) + " must be constant for this analysis");
    }
    return std::visit(overloaded{
                          [](const ConstantProfile& p) { return p.value; },
                          [](const CosineProfile& p) { return p.mean + p.amplitude; },
                          [](const SampledProfile& p) {
                              return p.values.empty() ? 0.0 : p.values.front();
                          },
                      },
                      spec);
}

std::size_t component_count(SystemKind kind) noexcept {
    switch (kind) {
        case SystemKind::two_species_general:
        case SystemKind::submodel:
            return 2;
        case SystemKind::logistic:
            return 1;
        case SystemKind::three_component:
            return 3;
    }
    return 0;
}

std::string_view to_string(SystemKind kind) noexcept {
    switch (kind) {
        case SystemKind::two_species_general:
            return "two_species_general";
        case SystemKind::submodel:
            return "submodel";
        case SystemKind::logistic:
            return "logistic";
        case SystemKind::three_component:
            return "three_component";
    }
    return "unknown";
}

SystemKind system_kind_from_string(std::string_view name) {
    for (auto k : {SystemKind::two_species_general, SystemKind::submodel, SystemKind::logistic,
                   SystemKind::three_component}) {
        if (to_string(k) == name) {
            return k;
        }
    }
    throw ConfigError("unknown system kind '" + std::string(name) + "'");
}

CoefficientFields sample_coefficients_unchecked(const ModelParams& params, const Grid& grid) {
    return CoefficientFields{sample_coefficient(params.alpha, grid),
                             sample_coefficient(params.beta, grid),
                             sample_coefficient(params.m, grid)};
}

CoefficientFields sample_coefficients(const ModelParams& params, const Grid& grid) {
    if (!(params.d1 > 0.0) || !(params.d1 <= params.d2)) {
        throw ConfigError("diffusion rates must satisfy 0 < d1 <= d2");
    }
    if (!(params.d3 > 0.0)) {
        throw ConfigError("d3 must be positive");
    }
    if (!(params.b >= 0.0) || !(params.c >= 0.0)) {
        throw ConfigError("interaction coefficients b, c must be nonnegative");
    }
    CoefficientFields f = sample_coefficients_unchecked(params, grid);
    check_nonnegative_somewhere_positive(f.alpha, "alpha");
    check_nonnegative_somewhere_positive(f.beta, "beta");
    if (!(max_value(f.m) > 0.0)) {
        throw ConfigError("m must be positive somewhere");
    }
    return f;
}

Reaction::Reaction(SystemKind kind, const ModelParams& params, CoefficientFields fields)
    : kind_(kind), b_(params.b), c_(params.c), fields_(std::move(fields)) {
    if (kind_ != SystemKind::two_species_general) {
        b_ = 1.0;
        c_ = 1.0;
    }
}

void Reaction::evaluate(std::size_t i, std::span<const double> s, std::span<double> out) const {
    const double m = fields_.m[i];
    switch (kind_) {
        case SystemKind::two_species_general:
        case SystemKind::submodel: {
            const double a = fields_.alpha[i];
            const double be = fields_.beta[i];
            const double u = s[0];
            const double v = s[1];
            out[0] = (m - a - u) * u + (be - b_ * u) * v;
            out[1] = (m - be - v) * v + (a - c_ * v) * u;
            return;
        }
        case SystemKind::logistic:
            out[0] = s[0] * (m - s[0]);
            return;
        case SystemKind::three_component: {
            const double a = fields_.alpha[i];
            const double be = fields_.beta[i];
            const double u = s[0];
            const double v = s[1];
            const double w = s[2];
            const double free = m - u - v - w;
            out[0] = -a * u + be * v + u * free;
            out[1] = a * u - be * v + v * free;
            out[2] = w * free;
            return;
        }
    }
}

std::vector<double> reaction_terms(SystemKind kind, const ModelParams& params, const Grid& grid,
                                   std::span<const double> state_values, std::size_t x_index) {
    const std::size_t k = component_count(kind);
    if (state_values.size() != k) {
        throw ConfigError("reaction_terms: " + std::string(to_string(kind)) + " expects " +
                          std::to_string(k) + " components, got " +
                          std::to_string(state_values.size()));
    }
    if (x_index >= grid.n) {
        throw ConfigError("reaction_terms: node index out of range");
    }
    Reaction r(kind, params, sample_coefficients_unchecked(params, grid));
    std::vector<double> out(k);
    r.evaluate(x_index, state_values, out);
    return out;
}

bool Rectangle::contains(double u, double v, double slack) const noexcept {
    return u >= lower[0] - slack && u <= upper[0] + slack && v >= lower[1] - slack &&
           v <= upper[1] + slack;
}

double larger_interaction_root(double b, double c) {
    if (!(b > 0.0) || !(c > 0.0)) {
        throw ConfigError("interaction root requires b, c > 0");
    }
    const double qa = b * c;
    const double qb = -(b * b + c * c);
    const double qc = b * c - 1.0;
    const double disc = qb * qb - 4.0 * qa * qc;
    // disc = (b^2 - c^2)^2 + 4 b c > 0 always
    const double sq = std::sqrt(disc);
    // -qb > 0, so the '+' root is computed without cancellation.
    return (-qb + sq) / (2.0 * qa);
}

RegimeReport classify_regime(const ModelParams& params, const Grid& grid) {
    const double b = params.b;
    const double c = params.c;
    if (!(b > 0.0) || !(c > 0.0)) {
        throw ConfigError("regime classification requires b, c > 0");
    }
    const CoefficientFields f = sample_coefficients(params, grid);
    const double a_lo = min_value(f.alpha);
    const double a_hi = max_value(f.alpha);
    const double be_lo = min_value(f.beta);
    const double be_hi = max_value(f.beta);
    const double m_lo = min_value(f.m);
    const double m_hi = max_value(f.m);

    RegimeReport r;
    r.k = std::min(a_lo / a_hi, be_lo / be_hi);
    r.k1 = (a_lo > 0.0 && be_lo > 0.0) ? std::max(be_hi / be_lo, a_hi / a_lo)
                                       : std::numeric_limits<double>::infinity();
    r.k0 = larger_interaction_root(b, c);

    if (!(m_lo > 0.0)) {
        r.s1_skipped = "competitive regime test requires min m > 0";
    } else if (!(a_lo > 0.0) || !(be_lo > 0.0)) {
        r.s1_skipped = "competitive regime test requires min alpha, min beta > 0";
    } else {
        const double k = r.k;
        const bool k_ok = k > std::max(1.0 - m_lo / (b * m_hi), 1.0 - m_lo / (c * m_hi));
        const double x = be_hi;
        const double y = a_hi;
        const bool in_set = (m_lo + b * (k - 1.0) * m_hi - y - x / b > 0.0) &&
                            (m_lo + c * (k - 1.0) * m_hi - x - y / c > 0.0);
        r.in_S1 = k_ok && in_set;
        if (r.in_S1) {
            r.competitive_rectangle = Rectangle{{be_hi / b, a_hi / c}, {m_hi, m_hi}};
        }
    }

    if (std::isfinite(r.k1) && r.k1 < 1.0 + r.k0) {
        const double k1 = r.k1;
        const double x = be_lo / b;
        const double y = a_lo / c;
        r.in_S2 = (m_hi - x + (b * (k1 - 1.0) - c) * y < 0.0) &&
                  (m_hi - y + (c * (k1 - 1.0) - b) * x < 0.0);
        if (r.in_S2) {
            r.cooperative_rectangle = Rectangle{{0.0, 0.0}, {x, y}};
        }
    }
    return r;
}

RegimeReport require_competitive_regime(const ModelParams& params, const Grid& grid) {
    RegimeReport r = classify_regime(params, grid);
    if (r.s1_skipped) {
        throw HypothesisError(*r.s1_skipped);
    }
    if (!r.in_S1) {
        throw HypothesisError("parameters are not in the eventually competitive regime");
    }
    return r;
}

bool upper_bounds_hold(const ModelParams& params, const CoefficientFields& f, double B1,
                       double B2) {
    const double b = params.b;
    const double c = params.c;
    for (std::size_t i = 0; i < f.m.size(); ++i) {
        const double m = f.m[i];
        const double a = f.alpha[i];
        const double be = f.beta[i];
        // g1(x, B1, v) and g2(x, u, B2) are affine in v and u; check both ends.
        const double g1_v0 = (m - a - B1) * B1;
        const double g1_vB = g1_v0 + (be - b * B1) * B2;
        const double g2_u0 = (m - be - B2) * B2;
        const double g2_uB = g2_u0 + (a - c * B2) * B1;
        if (!(g1_v0 < 0.0) || !(g1_vB < 0.0) || !(g2_u0 < 0.0) || !(g2_uB < 0.0)) {
            return false;
        }
    }
    return true;
}

Rectangle invariant_rectangle(const ModelParams& params, const Grid& grid) {
    const CoefficientFields f = sample_coefficients(params, grid);
    if (params.b > 0.0 && params.c > 0.0) {
        const RegimeReport r = classify_regime(params, grid);
        if (r.competitive_rectangle) {
            return *r.competitive_rectangle;
        }
    }
    const double scale = std::min({params.b, params.c, 1.0});
    const double start =
        max_value(f.m) + (max_value(f.beta) + max_value(f.alpha)) / (scale > 0.0 ? scale : 1.0);
    double B = std::max(start, 1e-12);
    for (int k = 0; k < 64; ++k, B *= 2.0) {
        if (upper_bounds_hold(params, f, B, B)) {
            return Rectangle{{0.0, 0.0}, {B, B}};
        }
    }
    std::ostringstream os;
    os << "no attracting upper bound found up to " << B;
    throw NumericalError(os.str());
}

std::optional<std::string> check_competition_hypothesis(const ModelParams& params,
                                                        const Grid& grid) {
    if (!is_constant(params.alpha) || !is_constant(params.beta)) {
        return std::string("switching rates alpha, beta must be constant");
    }
    const double a = constant_value(params.alpha, "alpha");
    const double be = constant_value(params.beta, "beta");
    if (!(a > 0.0) || !(be > 0.0)) {
        return std::string("switching rates alpha, beta must be positive");
    }
    const Field m = sample_coefficient(params.m, grid);
    const double m_hi = max_value(m);
    if (!(m_hi - min_value(m) > 1e-12)) {
        return std::string("m must be non-constant");
    }
    if (integrate(grid, m) < 0.0) {
        return std::string("integral of m must be nonnegative");
    }
    if (!(m_hi > 0.0) || !(m_hi < a + be)) {
        std::ostringstream os;
        os << "require 0 < max m < alpha + beta (max m = " << m_hi << ", alpha + beta = " << a + be
           << ")";
        return os.str();
    }
    return std::nullopt;
}

void require_competition_hypothesis(const ModelParams& params, const Grid& grid) {
    if (auto why = check_competition_hypothesis(params, grid)) {
        throw HypothesisError(*why);
    }
}

}  // namespace dispersal
