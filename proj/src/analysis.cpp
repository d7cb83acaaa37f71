#include "dispersal/analysis.hpp"

#include "dispersal/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace dispersal {

namespace {

struct SwitchingConstants {
    double alpha;
    double beta;
};

SwitchingConstants constants_of(const ModelParams& p) {
    return {constant_value(p.alpha, "alpha"), constant_value(p.beta, "beta")};
}

double weighted_mean_diffusion(const ModelParams& p) {
    const auto [a, b] = constants_of(p);
    return (b * p.d1 + a * p.d2) / (a + b);
}

Field difference(const Field& m, const Field& u, const Field& v) {
    Field e(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
        e[i] = m[i] - u[i] - v[i];
    }
    return e;
}

void require_converged(const SteadyResult& r, const char* what) {
    if (!r.converged) {
        std::ostringstream os;
        os << what << " did not converge (residual " << r.residual << " after " << r.steps
           << " steps)";
        throw NumericalError(os.str());
    }
}

std::string describe_signs(const char* name, double x0, double f0, double x1, double f1) {
    std::ostringstream os;
    os.precision(10);
    os << name << ": endpoint eigenvalues do not have the expected signs (lambda(" << x0
       << ") = " << f0 << ", lambda(" << x1 << ") = " << f1
       << "); hypothesis violated or grid too coarse";
    return os.str();
}

void require_ordered_rates(const ModelParams& p) {
    if (!(p.d1 < p.d3) || !(p.d3 < p.d2)) {
        std::ostringstream os;
        os << "switching-rate thresholds require d1 < d3 < d2 (d1 = " << p.d1 << ", d3 = " << p.d3
           << ", d2 = " << p.d2 << ")";
        throw ConfigError(os.str());
    }
}

}  // namespace

std::string_view to_string(EquilibriumKind k) noexcept {
    switch (k) {
        case EquilibriumKind::trivial:
            return "trivial";
        case EquilibriumKind::semi_uv:
            return "semi_uv";
        case EquilibriumKind::semi_w:
            return "semi_w";
        case EquilibriumKind::positive:
            return "positive";
    }
    return "unknown";
}

std::string_view to_string(Stability s) noexcept {
    switch (s) {
        case Stability::linearly_stable:
            return "linearly_stable";
        case Stability::linearly_unstable:
            return "linearly_unstable";
        case Stability::marginal:
            return "marginal";
    }
    return "unknown";
}

Stability classify_eigenvalue(double lambda, double margin) {
    if (lambda < -margin) {
        return Stability::linearly_stable;
    }
    if (lambda > margin) {
        return Stability::linearly_unstable;
    }
    return Stability::marginal;
}

SteadyResult switching_steady_state(const ModelParams& params, const Grid& grid,
                                    const SimOptions& sim) {
    const CoefficientFields f = sample_coefficients(params, grid);
    const double start = 0.5 * std::min({max_value(f.m), max_value(f.alpha), max_value(f.beta)});
    SteadyResult r = integrate_to_steady(SystemKind::submodel, params, grid,
                                         constant_state(grid, {start, start}), sim);
    require_converged(r, "switching steady state");
    return r;
}

SteadyResult logistic_steady_state(const ModelParams& params, const Grid& grid,
                                   const SimOptions& sim) {
    const Field m = sample_coefficient(params.m, grid);
    SteadyResult r = integrate_to_steady(SystemKind::logistic, params, grid,
                                         constant_state(grid, {max_value(m)}), sim);
    require_converged(r, "logistic steady state");
    return r;
}

double invasion_rate_of_w(const ModelParams& params, const Grid& grid, const Field& u,
                          const Field& v, double d3, const EigenOptions& eig) {
    const Field m = sample_coefficient(params.m, grid);
    return principal_eigen(scalar_problem(grid, d3, difference(m, u, v)), eig).lambda;
}

EigenProblem invasion_problem_of_uv(const ModelParams& params, const Grid& grid,
                                    const Field& w_star) {
    const CoefficientFields f = sample_coefficients_unchecked(params, grid);
    if (w_star.size() != grid.n) {
        throw ConfigError("w* size does not match grid");
    }
    Field pot(grid.n);
    for (std::size_t i = 0; i < grid.n; ++i) {
        pot[i] = f.m[i] - w_star[i];
    }
    return switching_problem(grid, params.d1, params.d2, f.alpha, f.beta, pot);
}

double invasion_rate_of_uv(const ModelParams& params, const Grid& grid, const Field& w_star,
                           const EigenOptions& eig) {
    return principal_eigen(invasion_problem_of_uv(params, grid, w_star), eig).lambda;
}

EigenProblem linearization_problem(const ModelParams& params, const Grid& grid, const Field& U,
                                   const Field& V, double b, double c) {
    const CoefficientFields f = sample_coefficients(params, grid);
    EigenProblem p;
    p.grid = grid;
    p.diffusions = {params.d1, params.d2};
    p.coupling.assign(4, Field(grid.n));
    for (std::size_t i = 0; i < grid.n; ++i) {
        p.coupling[0][i] = f.m[i] - f.alpha[i] - 2.0 * U[i] - b * V[i];
        p.coupling[1][i] = f.beta[i] - b * U[i];
        p.coupling[2][i] = f.alpha[i] - c * V[i];
        p.coupling[3][i] = f.m[i] - f.beta[i] - 2.0 * V[i] - c * U[i];
    }
    return p;
}

StabilityReport linearized_stability(SystemKind kind, const ModelParams& params, const Grid& grid,
                                     const SteadyResult& equilibrium, EquilibriumKind which,
                                     const EigenOptions& eig) {
    require_converged(equilibrium, "equilibrium");
    const std::vector<Field>& x = equilibrium.state.components;
    if (x.size() != component_count(kind)) {
        throw ConfigError("equilibrium component count does not match the system");
    }
    StabilityReport r;
    r.equilibrium = which;
    switch (which) {
        case EquilibriumKind::semi_uv: {
            if (kind != SystemKind::submodel && kind != SystemKind::three_component) {
                throw ConfigError("(u*, v*, 0) needs the submodel or three-component system");
            }
            require_competition_hypothesis(params, grid);
            r.principal_eigenvalue = invasion_rate_of_w(params, grid, x[0], x[1], params.d3, eig);
            break;
        }
        case EquilibriumKind::semi_w: {
            if (kind != SystemKind::logistic && kind != SystemKind::three_component) {
                throw ConfigError("(0, 0, w*) needs the logistic or three-component system");
            }
            require_competition_hypothesis(params, grid);
            r.principal_eigenvalue = invasion_rate_of_uv(params, grid, x.back(), eig);
            break;
        }
        case EquilibriumKind::positive: {
            if (kind != SystemKind::two_species_general && kind != SystemKind::submodel) {
                throw ConfigError("positive equilibrium analysis needs a two-species system");
            }
            const double b = kind == SystemKind::two_species_general ? params.b : 1.0;
            const double c = kind == SystemKind::two_species_general ? params.c : 1.0;
            const EigenProblem p = linearization_problem(params, grid, x[0], x[1], b, c);
            r.principal_eigenvalue =
                dense_rightmost_eigenvalue(assemble_dense(p), grid.n * p.components());
            break;
        }
        case EquilibriumKind::trivial: {
            const Field m = sample_coefficient(params.m, grid);
            double lam = -std::numeric_limits<double>::infinity();
            if (kind != SystemKind::logistic) {
                lam = principal_eigen(mu_problem(params, grid, 1.0), eig).lambda;
            }
            if (kind == SystemKind::logistic || kind == SystemKind::three_component) {
                lam = std::max(lam, principal_eigen(scalar_problem(grid, params.d3, m), eig).lambda);
            }
            r.principal_eigenvalue = lam;
            break;
        }
    }
    r.classification = classify_eigenvalue(r.principal_eigenvalue);
    return r;
}

std::string_view to_string(ThresholdName t) noexcept {
    switch (t) {
        case ThresholdName::mu_star:
            return "mu_star";
        case ThresholdName::mu_zero:
            return "mu_zero";
        case ThresholdName::d_c:
            return "d_c";
        case ThresholdName::d_0:
            return "d_0";
        case ThresholdName::beta_c:
            return "beta_c";
        case ThresholdName::alpha_c:
            return "alpha_c";
    }
    return "unknown";
}

ThresholdName threshold_from_string(std::string_view s) {
    for (auto t : {ThresholdName::mu_star, ThresholdName::mu_zero, ThresholdName::d_c,
                   ThresholdName::d_0, ThresholdName::beta_c, ThresholdName::alpha_c}) {
        if (to_string(t) == s) {
            return t;
        }
    }
    throw ConfigError("unknown threshold '" + std::string(s) + "'");
}

std::pair<double, double> threshold_bracket(ThresholdName name, const ModelParams& params) {
    const double inf = std::numeric_limits<double>::infinity();
    switch (name) {
        case ThresholdName::mu_star:
        case ThresholdName::mu_zero:
            return {0.0, inf};
        case ThresholdName::d_c:
        case ThresholdName::d_0: {
            const double hi = weighted_mean_diffusion(params);
            if (!(params.d1 < hi)) {
                throw ConfigError("diffusion threshold bracket is empty (need d1 < d2)");
            }
            return {params.d1, hi};
        }
        case ThresholdName::beta_c: {
            require_ordered_rates(params);
            const double a = constant_value(params.alpha, "alpha");
            return {0.0, (params.d2 - params.d3) * a / (params.d3 - params.d1)};
        }
        case ThresholdName::alpha_c: {
            require_ordered_rates(params);
            const double b = constant_value(params.beta, "beta");
            return {(params.d3 - params.d1) * b / (params.d2 - params.d3), inf};
        }
    }
    throw ConfigError("unknown threshold");
}

std::vector<ThresholdResult> find_all_thresholds(ThresholdName name, const ModelParams& params,
                                                 const Grid& grid, const AnalysisOptions& opts) {
    const std::string tag(to_string(name));
    switch (name) {
        case ThresholdName::mu_zero:
            return find_mu_roots(params, grid, opts.mu_lo, opts.mu_hi, opts.scan, opts.eig);
        case ThresholdName::mu_star: {
            const Field m = sample_coefficient(params.m, grid);
            return find_scaling_roots(scalar_problem(grid, 1.0, m), opts.mu_lo, opts.mu_hi,
                                      opts.scan, opts.eig);
        }
        case ThresholdName::d_c: {
            require_competition_hypothesis(params, grid);
            const auto [lo, hi] = threshold_bracket(name, params);
            const SteadyResult uv = switching_steady_state(params, grid, opts.sim);
            const Field& u = uv.state.components[0];
            const Field& v = uv.state.components[1];
            auto curve = [&](double d) { return invasion_rate_of_w(params, grid, u, v, d, opts.eig); };
            const double f_lo = curve(lo);
            const double f_hi = curve(hi);
            if (!(f_lo > 0.0) || !(f_hi < 0.0)) {
                throw HypothesisError(describe_signs("d_c", lo, f_lo, hi, f_hi));
            }
            return {bisect_root(tag, curve, lo, hi, f_lo, f_hi, opts.scan)};
        }
        case ThresholdName::d_0: {
            require_competition_hypothesis(params, grid);
            const auto [lo, hi] = threshold_bracket(name, params);
            auto curve = [&](double d3) {
                ModelParams p = params;
                p.d3 = d3;
                const SteadyResult w = logistic_steady_state(p, grid, opts.sim);
                return invasion_rate_of_uv(p, grid, w.state.components[0], opts.eig);
            };
            const double f_lo = curve(lo);
            const double f_hi = curve(hi);
            if (!(f_lo < 0.0) || !(f_hi > 0.0)) {
                throw HypothesisError(describe_signs("d_0", lo, f_lo, hi, f_hi));
            }
            return find_roots(tag, curve, lo, hi, opts.scan);
        }
        case ThresholdName::beta_c: {
            const auto [lo, hi] = threshold_bracket(name, params);
            const auto [a, b] = constants_of(params);
            const Field m = sample_coefficient(params.m, grid);
            if (!(max_value(m) <= a)) {
                throw HypothesisError("beta_c requires max m <= alpha");
            }
            require_competition_hypothesis(params, grid);
            const SteadyResult w = logistic_steady_state(params, grid, opts.sim);
            const Field& ws = w.state.components[0];
            auto curve = [&](double beta) {
                ModelParams p = params;
                p.beta = ConstantProfile{beta};
                return invasion_rate_of_uv(p, grid, ws, opts.eig);
            };
            // β = 0 decouples the pair; start just inside the bracket.
            const double left = 1e-6 * hi;
            const double f_lo = curve(left);
            const double f_hi = curve(hi);
            if (!(f_lo < 0.0) || !(f_hi > 0.0)) {
                throw HypothesisError(describe_signs("beta_c", left, f_lo, hi, f_hi));
            }
            ThresholdResult r = bisect_root(tag, curve, left, hi, f_lo, f_hi, opts.scan);
            r.lo = lo;
            return {r};
        }
        case ThresholdName::alpha_c: {
            const auto [lo, hi_inf] = threshold_bracket(name, params);
            (void)hi_inf;
            const auto [a, b] = constants_of(params);
            const Field m = sample_coefficient(params.m, grid);
            if (!(max_value(m) <= b)) {
                throw HypothesisError("alpha_c requires max m <= beta");
            }
            require_competition_hypothesis(params, grid);
            const SteadyResult w = logistic_steady_state(params, grid, opts.sim);
            const Field& ws = w.state.components[0];
            auto curve = [&](double alpha) {
                ModelParams p = params;
                p.alpha = ConstantProfile{alpha};
                return invasion_rate_of_uv(p, grid, ws, opts.eig);
            };
            const double f_lo = curve(lo);
            if (!(f_lo > 0.0)) {
                throw HypothesisError(describe_signs("alpha_c", lo, f_lo, lo, f_lo));
            }
            double hi = 2.0 * lo;
            double f_hi = curve(hi);
            for (int k = 0; k < 60 && !(f_hi < 0.0); ++k) {
                hi *= 2.0;
                f_hi = curve(hi);
            }
            if (!(f_hi < 0.0)) {
                throw HypothesisError(describe_signs("alpha_c", lo, f_lo, hi, f_hi));
            }
            return {bisect_root(tag, curve, lo, hi, f_lo, f_hi, opts.scan)};
        }
    }
    throw ConfigError("unknown threshold");
}

ThresholdResult find_threshold(ThresholdName name, const ModelParams& params, const Grid& grid,
                               const AnalysisOptions& opts) {
    std::vector<ThresholdResult> all = find_all_thresholds(name, params, grid, opts);
    if (all.empty()) {
        throw HypothesisError(std::string(to_string(name)) + ": no sign change found in range");
    }
    return all.front();
}

SensitivityReport lambda2_sensitivity(const ModelParams& params, const Grid& grid,
                                      SwitchingRate wrt, const Field& w_star,
                                      const EigenOptions& eig) {
    const auto [a, b] = constants_of(params);
    const EigenResult e = principal_eigen(invasion_problem_of_uv(params, grid, w_star), eig);
    const Field& p1 = e.eigenfunctions[0];
    const Field& p2 = e.eigenfunctions[1];
    const double cross = inner(grid, p1, p2);
    const double n1 = inner(grid, p1, p1);
    const double n2 = inner(grid, p2, p2);
    const double den = a * n1 + b * n2;
    SensitivityReport r;
    r.lambda2 = e.lambda;
    r.derivative = wrt == SwitchingRate::beta ? (a * cross - b * n2) / den
                                              : (b * cross - a * n1) / den;
    return r;
}

SensitivityReport lambda2_sensitivity(const ModelParams& params, const Grid& grid,
                                      SwitchingRate wrt, const AnalysisOptions& opts) {
    const SteadyResult w = logistic_steady_state(params, grid, opts.sim);
    return lambda2_sensitivity(params, grid, wrt, w.state.components[0], opts.eig);
}

std::string_view to_string(SweepParameter p) noexcept {
    switch (p) {
        case SweepParameter::d3:
            return "d3";
        case SweepParameter::beta:
            return "beta";
        case SweepParameter::alpha:
            return "alpha";
    }
    return "unknown";
}

std::string_view to_string(Outcome o) noexcept {
    switch (o) {
        case Outcome::w_wins:
            return "w_wins";
        case Outcome::uv_wins:
            return "uv_wins";
        case Outcome::undetermined:
            return "undetermined";
    }
    return "unknown";
}

SweepParameter sweep_parameter_from_string(std::string_view s) {
    for (auto p : {SweepParameter::d3, SweepParameter::beta, SweepParameter::alpha}) {
        if (to_string(p) == s) {
            return p;
        }
    }
    throw ConfigError("unknown sweep parameter '" + std::string(s) + "'");
}

ModelParams with_parameter(const ModelParams& params, SweepParameter p, double value) {
    ModelParams q = params;
    switch (p) {
        case SweepParameter::d3:
            q.d3 = value;
            break;
        case SweepParameter::beta:
            q.beta = ConstantProfile{value};
            break;
        case SweepParameter::alpha:
            q.alpha = ConstantProfile{value};
            break;
    }
    return q;
}

State mixed_initial_state(const Grid& grid) { return constant_state(grid, {0.2, 0.2, 0.2}); }

Outcome classify_outcome(const std::vector<double>& mass) {
    if (mass.size() != 3) {
        throw ConfigError("outcome classification needs three components");
    }
    if (mass[0] < 1e-6 && mass[1] < 1e-6 && mass[2] > 1e-4) {
        return Outcome::w_wins;
    }
    if (mass[2] < 1e-6 && mass[0] > 1e-4 && mass[1] > 1e-4) {
        return Outcome::uv_wins;
    }
    return Outcome::undetermined;
}

SweepReport sweep_outcomes(const ModelParams& params, const Grid& grid, SweepParameter parameter,
                           const std::vector<double>& values, const AnalysisOptions& opts) {
    if (values.empty()) {
        throw ConfigError("sweep needs at least one value");
    }
    if (parameter != SweepParameter::d3) {
        require_ordered_rates(params);
    }
    SweepReport rep;
    rep.parameter = parameter;
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());

    // (u*, v*) does not depend on d3; w* does not depend on alpha, beta.
    std::optional<SteadyResult> uv_cache;
    std::optional<SteadyResult> w_cache;
    for (double value : sorted) {
        SweepPoint pt;
        pt.value = value;
        try {
            const ModelParams p = with_parameter(params, parameter, value);
            require_competition_hypothesis(p, grid);
            if (parameter == SweepParameter::beta) {
                const Field m = sample_coefficient(p.m, grid);
                if (!(max_value(m) <= constant_value(p.alpha, "alpha"))) {
                    throw HypothesisError("beta sweep requires max m <= alpha");
                }
            } else if (parameter == SweepParameter::alpha) {
                const Field m = sample_coefficient(p.m, grid);
                if (!(max_value(m) <= constant_value(p.beta, "beta"))) {
                    throw HypothesisError("alpha sweep requires max m <= beta");
                }
            }
            SteadyResult uv = (parameter == SweepParameter::d3 && uv_cache)
                                  ? *uv_cache
                                  : switching_steady_state(p, grid, opts.sim);
            SteadyResult w = (parameter != SweepParameter::d3 && w_cache)
                                 ? *w_cache
                                 : logistic_steady_state(p, grid, opts.sim);
            if (parameter == SweepParameter::d3) {
                uv_cache = uv;
            } else {
                w_cache = w;
            }
            pt.lambda_uv0 = invasion_rate_of_w(p, grid, uv.state.components[0],
                                               uv.state.components[1], p.d3, opts.eig);
            pt.lambda_00w = invasion_rate_of_uv(p, grid, w.state.components[0], opts.eig);
            const SimulationResult sim = simulate(SystemKind::three_component, p, grid,
                                                  mixed_initial_state(grid), opts.sim);
            for (const Field& f : sim.steady.state.components) {
                pt.final_mass.push_back(integrate(grid, f));
                pt.final_max.push_back(max_value(f));
            }
            pt.floors = persistence_floors(sim.log, 0.5);
            pt.outcome = classify_outcome(pt.final_mass);
        } catch (const Error& e) {
            pt.error = e.what();
            pt.outcome = Outcome::undetermined;
        }
        rep.points.push_back(std::move(pt));
    }

    const Outcome low = parameter == SweepParameter::alpha ? Outcome::uv_wins : Outcome::w_wins;
    const Outcome high = parameter == SweepParameter::alpha ? Outcome::w_wins : Outcome::uv_wins;
    for (const SweepPoint& pt : rep.points) {
        if (pt.outcome != low) {
            break;
        }
        rep.C1 = pt.value;
    }
    for (auto it = rep.points.rbegin(); it != rep.points.rend(); ++it) {
        if (it->outcome != high) {
            break;
        }
        rep.C2 = it->value;
    }
    return rep;
}

}  // namespace dispersal
