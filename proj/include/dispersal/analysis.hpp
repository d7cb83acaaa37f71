#pragma once

#include "dispersal/dynamics.hpp"
#include "dispersal/mesh.hpp"
#include "dispersal/model.hpp"
#include "dispersal/spectral.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dispersal {

enum class EquilibriumKind {
    trivial,
    semi_uv,   // (u*, v*, 0)
    semi_w,    // (0, 0, w*)
    positive,  // (U*, V*) of the two-species system
};

enum class Stability { linearly_stable, linearly_unstable, marginal };

[[nodiscard]] std::string_view to_string(EquilibriumKind k) noexcept;
[[nodiscard]] std::string_view to_string(Stability s) noexcept;

struct StabilityReport {
    EquilibriumKind equilibrium = EquilibriumKind::trivial;
    double principal_eigenvalue = 0.0;
    Stability classification = Stability::marginal;
};

/// Stable for λ < -margin, unstable for λ > margin, marginal otherwise.
Stability classify_eigenvalue(double lambda, double margin = 1e-8);

struct AnalysisOptions {
    EigenOptions eig;
    SimOptions sim;
    RootScanOptions scan;
    double mu_lo = 1e-3;  // μ scan range for mu_zero / mu_star
    double mu_hi = 1e3;
};

/// Positive steady state of the switching submodel, started from a constant
/// state inside the contracting rectangle. NumericalError if it does not converge.
SteadyResult switching_steady_state(const ModelParams& params, const Grid& grid,
                                    const SimOptions& sim = {});

/// Positive steady state w* of the logistic equation with rate params.d3.
SteadyResult logistic_steady_state(const ModelParams& params, const Grid& grid,
                                   const SimOptions& sim = {});

/// λ(d3, m - u* - v*): growth rate of w invading (u*, v*, 0).
double invasion_rate_of_w(const ModelParams& params, const Grid& grid, const Field& u,
                          const Field& v, double d3, const EigenOptions& eig = {});

/// Switching problem with potential m - w*, whose principal eigenvalue is λ2.
EigenProblem invasion_problem_of_uv(const ModelParams& params, const Grid& grid,
                                    const Field& w_star);

/// λ2: growth rate of (u, v) invading (0, 0, w*).
double invasion_rate_of_uv(const ModelParams& params, const Grid& grid, const Field& w_star,
                           const EigenOptions& eig = {});

/// Linearised stability of an equilibrium. The equilibrium state holds the
/// components of the given kind: (u, v) or (u, v, 0) for semi_uv, (w) or
/// (0, 0, w) for semi_w, (U, V) for positive. Semi-trivial states require
/// the competition hypothesis (HypothesisError); unconverged states raise
/// NumericalError.
StabilityReport linearized_stability(SystemKind kind, const ModelParams& params, const Grid& grid,
                                     const SteadyResult& equilibrium, EquilibriumKind which,
                                     const EigenOptions& eig = {});

/// Jacobian of the two-species reaction at (U, V) as a 2 x 2 coupling field
/// (off-diagonals may be negative).
EigenProblem linearization_problem(const ModelParams& params, const Grid& grid, const Field& U,
                                   const Field& V, double b, double c);

enum class ThresholdName { mu_star, mu_zero, d_c, d_0, beta_c, alpha_c };

[[nodiscard]] std::string_view to_string(ThresholdName t) noexcept;
ThresholdName threshold_from_string(std::string_view s);

/// Bracket proved for the threshold, as (lo, hi). alpha_c has hi = +inf.
/// ConfigError when the bracket is empty (e.g. d3 outside (d1, d2)).
std::pair<double, double> threshold_bracket(ThresholdName name, const ModelParams& params);

/// All sign changes found (the d_0 and mu curves may have several).
std::vector<ThresholdResult> find_all_thresholds(ThresholdName name, const ModelParams& params,
                                                 const Grid& grid,
                                                 const AnalysisOptions& opts = {});

/// Single threshold by bisection inside its bracket after checking the endpoint
/// signs. For d_0 and the mu thresholds returns the first root found.
/// HypothesisError when the endpoint signs do not differ.
ThresholdResult find_threshold(ThresholdName name, const ModelParams& params, const Grid& grid,
                               const AnalysisOptions& opts = {});

enum class SwitchingRate { beta, alpha };

struct SensitivityReport {
    double derivative = 0.0;  // closed-form λ2'(β) or λ2'(α)
    double lambda2 = 0.0;
};

SensitivityReport lambda2_sensitivity(const ModelParams& params, const Grid& grid,
                                      SwitchingRate wrt, const Field& w_star,
                                      const EigenOptions& eig = {});
SensitivityReport lambda2_sensitivity(const ModelParams& params, const Grid& grid,
                                      SwitchingRate wrt, const AnalysisOptions& opts = {});

enum class SweepParameter { d3, beta, alpha };
enum class Outcome { w_wins, uv_wins, undetermined };

[[nodiscard]] std::string_view to_string(SweepParameter p) noexcept;
[[nodiscard]] std::string_view to_string(Outcome o) noexcept;
SweepParameter sweep_parameter_from_string(std::string_view s);

struct SweepPoint {
    double value = 0.0;
    double lambda_uv0 = 0.0;  // λ(d3, m - u* - v*)
    double lambda_00w = 0.0;  // λ2
    Outcome outcome = Outcome::undetermined;
    std::vector<double> floors;      // per-component persistence floors
    std::vector<double> final_mass;  // per-component mass at the end
    std::vector<double> final_max;   // per-component sup at the end
    std::optional<std::string> error;
};

struct SweepReport {
    SweepParameter parameter = SweepParameter::d3;
    std::vector<SweepPoint> points;
    // Empirical analogues of the exclusion constants: C1 is the end of the
    // leading run of the small-value winner, C2 the start of the trailing run
    // of the large-value winner (w then uv for d3 and beta, uv then w for alpha).
    std::optional<double> C1;
    std::optional<double> C2;
};

ModelParams with_parameter(const ModelParams& params, SweepParameter p, double value);

/// Fixed mixed initial state for the three-component sweeps.
State mixed_initial_state(const Grid& grid);

/// Classifies the endpoint of a three-component run by component masses.
Outcome classify_outcome(const std::vector<double>& final_mass);

SweepReport sweep_outcomes(const ModelParams& params, const Grid& grid, SweepParameter parameter,
                           const std::vector<double>& values, const AnalysisOptions& opts = {});

}  // namespace dispersal
