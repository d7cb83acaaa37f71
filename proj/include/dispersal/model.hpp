#pragma once

#include "dispersal/mesh.hpp"

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace dispersal {

// ---------------------------------------------------------------------------
// Coefficient functions
// ---------------------------------------------------------------------------

struct ConstantProfile {
    double value = 0.0;
};

/// mean + amplitude * cos(frequency * pi * (x - a) / (b - a)); every integer
/// frequency satisfies the no-flux condition at both ends.
struct CosineProfile {
    double mean = 0.0;
    double amplitude = 0.0;
    double frequency = 1.0;
};

struct SampledProfile {
    std::vector<double> values;
};

using CoefficientSpec = std::variant<ConstantProfile, CosineProfile, SampledProfile>;

/// Throws ConfigError if a sampled profile does not match the grid size.
Field sample_coefficient(const CoefficientSpec& spec, const Grid& grid);

[[nodiscard]] bool is_constant(const CoefficientSpec& spec);

// ---------------------------------------------------------------------------
// Parameters and system variants
// ---------------------------------------------------------------------------

/// Diffusion rates, interaction coefficients and the switching/growth profiles.
///
/// d1 <= d2 are the slow and fast rates of the switching population; d3 is the
/// rate of the single-rate competitor. b and c scale the cross-interaction in
/// the general two-species model; the submodel and three-component model use
/// b = c = 1 regardless of what is stored here.
struct ModelParams {
    double d1 = 0.1;
    double d2 = 1.0;
    double d3 = 0.5;
    double b = 1.0;
    double c = 1.0;
    CoefficientSpec alpha = ConstantProfile{1.0};
    CoefficientSpec beta = ConstantProfile{1.0};
    CoefficientSpec m = ConstantProfile{1.0};
};

enum class SystemKind {
    two_species_general,  // switching population with interaction coefficients b, c
    submodel,             // the same with b = c = 1
    logistic,             // single-rate population alone
    three_component,      // switching population (u, v) competing with w
};

[[nodiscard]] std::size_t component_count(SystemKind kind) noexcept;
[[nodiscard]] std::string_view to_string(SystemKind kind) noexcept;
/// Throws ConfigError for unknown names.
SystemKind system_kind_from_string(std::string_view name);

/// Coefficient profiles evaluated on a grid.
struct CoefficientFields {
    Field alpha;
    Field beta;
    Field m;
};

/// Validates params against the grid and samples the coefficient profiles.
/// Throws ConfigError when 0 < d1 <= d2, d3 > 0, b, c >= 0, alpha, beta >= 0
/// (each positive somewhere) or "m positive somewhere" fails.
CoefficientFields sample_coefficients(const ModelParams& params, const Grid& grid);

/// Same sampling without the sign checks on m; for eigenvalue work where m
/// may be negative everywhere.
CoefficientFields sample_coefficients_unchecked(const ModelParams& params, const Grid& grid);

/// Reaction (non-diffusive) part of the right-hand side, evaluated pointwise.
class Reaction {
public:
    Reaction(SystemKind kind, const ModelParams& params, CoefficientFields fields);

    [[nodiscard]] SystemKind kind() const noexcept { return kind_; }
    [[nodiscard]] std::size_t components() const noexcept { return component_count(kind_); }
    [[nodiscard]] const CoefficientFields& fields() const noexcept { return fields_; }

    /// state and out hold one value per component at node i.
    void evaluate(std::size_t i, std::span<const double> state, std::span<double> out) const;

private:
    SystemKind kind_;
    double b_;
    double c_;
    CoefficientFields fields_;
};

/// Reaction terms at node x_index for the given per-component values.
std::vector<double> reaction_terms(SystemKind kind, const ModelParams& params, const Grid& grid,
                                   std::span<const double> state_values, std::size_t x_index);

// ---------------------------------------------------------------------------
// Regime classification
// ---------------------------------------------------------------------------

struct Rectangle {
    std::array<double, 2> lower{0.0, 0.0};
    std::array<double, 2> upper{0.0, 0.0};

    [[nodiscard]] bool contains(double u, double v, double slack = 0.0) const noexcept;
};

struct RegimeReport {
    double k = 1.0;       // min(alpha_min/alpha_max, beta_min/beta_max)
    double k1 = 1.0;      // max(beta_max/beta_min, alpha_max/alpha_min)
    double k0 = 0.0;      // larger root of (b x - c)(c x - b) - 1 = 0
    bool in_S1 = false;   // eventually competitive
    bool in_S2 = false;   // eventually cooperative
    std::optional<std::string> s1_skipped;  // why the competitive test did not apply
    std::optional<Rectangle> competitive_rectangle;
    std::optional<Rectangle> cooperative_rectangle;
};

/// Larger root of b c x^2 - (b^2 + c^2) x + (b c - 1) = 0, for b, c > 0.
double larger_interaction_root(double b, double c);

/// Evaluates the competitive (S1) and cooperative (S2) regime tests.
/// Requires b, c > 0 (ConfigError otherwise). The competitive test needs
/// positive minima of m, alpha and beta; when they fail in_S1 is false and
/// s1_skipped names the failed requirement.
RegimeReport classify_regime(const ModelParams& params, const Grid& grid);

/// Throws HypothesisError unless the competitive test applies and passes.
RegimeReport require_competitive_regime(const ModelParams& params, const Grid& grid);

/// True when g1(x, B1, v) < 0 for v in [0, B2] and g2(x, u, B2) < 0 for
/// u in [0, B1] at every node (general two-species reaction).
bool upper_bounds_hold(const ModelParams& params, const CoefficientFields& fields, double B1,
                       double B2);

/// Attracting rectangle for the general two-species model. In the competitive
/// regime this is (beta_max/b, m_max] x (alpha_max/c, m_max]; otherwise the
/// lower corner is 0 and the upper corner is the first point of a doubling
/// lattice, started at m_max + (beta_max + alpha_max)/min(b, c, 1), where the
/// reaction points inward.
Rectangle invariant_rectangle(const ModelParams& params, const Grid& grid);

/// Hypothesis for the three-component analysis: constant alpha, beta > 0,
/// m non-constant, integral of m >= 0 and 0 < max m < alpha + beta.
/// Returns an empty optional when it holds, else the reason.
std::optional<std::string> check_competition_hypothesis(const ModelParams& params,
                                                        const Grid& grid);
void require_competition_hypothesis(const ModelParams& params, const Grid& grid);

/// Constant value of a coefficient, ConfigError if it is not constant.
double constant_value(const CoefficientSpec& spec, std::string_view name);

}  // namespace dispersal
