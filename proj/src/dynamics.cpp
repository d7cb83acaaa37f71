#include "dispersal/dynamics.hpp"

#include "dispersal/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace dispersal {

std::vector<double> component_diffusions(SystemKind kind, const ModelParams& params) {
    switch (kind) {
        case SystemKind::two_species_general:
        case SystemKind::submodel:
            return {params.d1, params.d2};
        case SystemKind::logistic:
            return {params.d3};
        case SystemKind::three_component:
            return {params.d1, params.d2, params.d3};
    }
    return {};
}

ImexStepper::ImexStepper(SystemKind kind, const ModelParams& params, const Grid& grid)
    : grid_(grid),
      lap_(assemble_neumann_laplacian(grid)),
      reaction_(kind, params, sample_coefficients(params, grid)),
      diffusions_(component_diffusions(kind, params)) {}

std::vector<Field> ImexStepper::rhs(const State& s) const {
    const std::size_t K = components();
    const std::size_t n = grid_.n;
    if (s.components.size() != K) {
        throw ConfigError("state has " + std::to_string(s.components.size()) +
                          " components, system expects " + std::to_string(K));
    }
    std::vector<Field> out(K);
    for (std::size_t k = 0; k < K; ++k) {
        if (s.components[k].size() != n) {
            throw ConfigError("state component size does not match grid");
        }
        out[k] = lap_.apply(s.components[k]);
        for (double& v : out[k]) {
            v *= diffusions_[k];
        }
    }
    double in[3];
    double r[3];
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < K; ++k) {
            in[k] = s.components[k][i];
        }
        reaction_.evaluate(i, std::span<const double>(in, K), std::span<double>(r, K));
        for (std::size_t k = 0; k < K; ++k) {
            out[k][i] += r[k];
        }
    }
    return out;
}

double ImexStepper::residual(const State& s) const {
    double r = 0.0;
    for (const Field& f : rhs(s)) {
        r = std::max(r, sup_norm(f));
    }
    return r;
}

void ImexStepper::factor(double dt) {
    if (dt == factored_dt_ && !solvers_.empty()) {
        return;
    }
    solvers_.clear();
    const std::size_t n = grid_.n;
    for (double d : diffusions_) {
        Field lo(n);
        Field di(n);
        Field up(n);
        for (std::size_t i = 0; i < n; ++i) {
            lo[i] = -dt * d * lap_.lower[i];
            di[i] = 1.0 - dt * d * lap_.diag[i];
            up[i] = -dt * d * lap_.upper[i];
        }
        solvers_.emplace_back(lo, di, up);
    }
    factored_dt_ = dt;
}

State ImexStepper::step(const State& s, double dt) {
    if (!(dt > 0.0)) {
        throw ConfigError("dt must be positive");
    }
    const std::size_t K = components();
    const std::size_t n = grid_.n;
    if (s.components.size() != K) {
        throw ConfigError("state component count does not match system");
    }
    factor(dt);
    State next;
    next.t = s.t + dt;
    next.components = s.components;
    double in[3];
    double r[3];
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < K; ++k) {
            in[k] = s.components[k][i];
        }
        reaction_.evaluate(i, std::span<const double>(in, K), std::span<double>(r, K));
        for (std::size_t k = 0; k < K; ++k) {
            next.components[k][i] += dt * r[k];
        }
    }
    for (std::size_t k = 0; k < K; ++k) {
        Field& x = next.components[k];
        for (double& v : x) {
            if (v < 0.0) {
                if (v < -1e-13 || !std::isfinite(v)) {
                    std::ostringstream os;
                    os << "reaction overshoot: value " << v << " at dt = " << dt;
                    throw NumericalError(os.str());
                }
                v = 0.0;
            }
        }
        solvers_[k].solve_in_place(x);
        for (double& v : x) {
            v = std::max(v, 0.0);
        }
    }
    return next;
}

State step_imex(SystemKind kind, const ModelParams& params, const Grid& grid, const State& state,
                double dt) {
    ImexStepper stepper(kind, params, grid);
    return stepper.step(state, dt);
}

namespace {

void record_sample(TrajectoryLog& log, const Grid& grid, const State& s,
                   const EigenResult* adjoint, double b, double c, bool keep) {
    log.times.push_back(s.t);
    std::vector<double> mn;
    std::vector<double> mx;
    std::vector<double> ms;
    for (const Field& f : s.components) {
        mn.push_back(min_value(f));
        mx.push_back(max_value(f));
        ms.push_back(integrate(grid, f));
    }
    log.min.push_back(std::move(mn));
    log.max.push_back(std::move(mx));
    log.mass.push_back(std::move(ms));
    if (adjoint != nullptr) {
        log.lyapunov.push_back(lyapunov_value(grid, s, *adjoint));
        log.dissipation.push_back(lyapunov_dissipation(grid, s, *adjoint, b, c));
    }
    if (keep) {
        log.states.push_back(s);
    }
}

void check_contracting_rectangle(SystemKind kind, const ModelParams& params, const Grid& grid,
                                 const SteadyResult& r) {
    if (kind != SystemKind::submodel || !r.converged ||
        check_competition_hypothesis(params, grid).has_value()) {
        return;
    }
    const double beta = constant_value(params.beta, "beta");
    const double alpha = constant_value(params.alpha, "alpha");
    const double u = max_value(r.state.components[0]);
    const double v = max_value(r.state.components[1]);
    if (u > beta || v > alpha) {
        std::ostringstream os;
        os << "steady state (max u = " << u << ", max v = " << v
           << ") leaves the contracting rectangle [0, " << beta << "] x [0, " << alpha << "]";
        throw NumericalError(os.str());
    }
}

SimulationResult run(SystemKind kind, const ModelParams& params, const Grid& grid,
                     const State& initial, const SimOptions& opts, const EigenResult* adjoint,
                     bool sample) {
    if (!(opts.dt > 0.0) || !(opts.t_max >= 0.0) || !(opts.tol > 0.0)) {
        throw ConfigError("simulation options: require dt > 0, t_max >= 0, tol > 0");
    }
    if (sample && !(opts.sample_interval > 0.0)) {
        throw ConfigError("simulation options: sample_interval must be positive");
    }
    ImexStepper stepper(kind, params, grid);
    if (adjoint != nullptr && (stepper.components() != 2 || adjoint->eigenfunctions.size() != 2)) {
        throw ConfigError("Lyapunov monitoring needs a two-component system and eigenpair");
    }
    const double b = kind == SystemKind::two_species_general ? params.b : 1.0;
    const double c = kind == SystemKind::two_species_general ? params.c : 1.0;

    State s = initial;
    if (s.components.size() != stepper.components()) {
        throw ConfigError("initial state has " + std::to_string(s.components.size()) +
                          " components, system expects " + std::to_string(stepper.components()));
    }
    for (const Field& f : s.components) {
        if (f.size() != grid.n) {
            throw ConfigError("initial state size does not match grid");
        }
        if (min_value(f) < 0.0) {
            throw ConfigError("initial state must be nonnegative");
        }
    }

    SimulationResult out;
    double dt = opts.dt;
    int halvings = 0;
    std::size_t steps = 0;
    const double t0 = s.t;
    double t_base = t0;          // time at the last dt change
    std::size_t steps_base = 0;  // steps taken since then
    double next_sample = t0;
    if (sample) {
        record_sample(out.log, grid, s, adjoint, b, c, opts.keep_states);
        next_sample = t0 + opts.sample_interval;
    }
    double res = stepper.residual(s);
    bool converged = opts.stop_at_steady && res <= opts.tol;
    const double t_end = t0 + opts.t_max;
    while (!converged && s.t < t_end - 0.5 * dt) {
        State next;
        try {
            next = stepper.step(s, dt);
        } catch (const NumericalError&) {
            if (halvings >= opts.max_halvings) {
                throw;
            }
            ++halvings;
            t_base = s.t;
            steps_base = 0;
            dt *= 0.5;
            continue;
        }
        ++steps;
        ++steps_base;
        next.t = t_base + static_cast<double>(steps_base) * dt;
        s = std::move(next);
        res = stepper.residual(s);
        if (opts.stop_at_steady && res <= opts.tol) {
            converged = true;
        }
        if (sample && s.t >= next_sample - 1e-9 * dt) {
            record_sample(out.log, grid, s, adjoint, b, c, opts.keep_states);
            while (next_sample <= s.t + 1e-9 * dt) {
                next_sample += opts.sample_interval;
            }
        }
    }
    if (sample && out.log.times.back() < s.t) {
        record_sample(out.log, grid, s, adjoint, b, c, opts.keep_states);
    }
    out.steady.state = std::move(s);
    out.steady.residual = res;
    out.steady.converged = res <= opts.tol;
    out.steady.steps = steps;
    out.steady.dt_used = dt;
    return out;
}

}  // namespace

SteadyResult integrate_to_steady(SystemKind kind, const ModelParams& params, const Grid& grid,
                                 const State& initial, const SimOptions& opts) {
    SimOptions o = opts;
    o.stop_at_steady = true;
    SimulationResult r = run(kind, params, grid, initial, o, nullptr, false);
    check_contracting_rectangle(kind, params, grid, r.steady);
    return std::move(r.steady);
}

SimulationResult simulate(SystemKind kind, const ModelParams& params, const Grid& grid,
                          const State& initial, const SimOptions& opts,
                          const EigenResult* adjoint) {
    return run(kind, params, grid, initial, opts, adjoint, true);
}

double lyapunov_value(const Grid& grid, const State& s, const EigenResult& adjoint) {
    if (s.components.size() != 2 || adjoint.eigenfunctions.size() != 2) {
        throw ConfigError("Lyapunov functional needs two components");
    }
    return inner(grid, adjoint.eigenfunctions[0], s.components[0]) +
           inner(grid, adjoint.eigenfunctions[1], s.components[1]);
}

double lyapunov_dissipation(const Grid& grid, const State& s, const EigenResult& adjoint,
                            double b, double c) {
    if (s.components.size() != 2 || adjoint.eigenfunctions.size() != 2) {
        throw ConfigError("Lyapunov functional needs two components");
    }
    const Field& u = s.components[0];
    const Field& v = s.components[1];
    const Field& p1 = adjoint.eigenfunctions[0];
    const Field& p2 = adjoint.eigenfunctions[1];
    Field g(grid.n);
    for (std::size_t i = 0; i < grid.n; ++i) {
        g[i] = p1[i] * u[i] * (u[i] + b * v[i]) + p2[i] * v[i] * (c * u[i] + v[i]);
    }
    return -integrate(grid, g);
}

std::vector<double> monitor_lyapunov(const Grid& grid, const std::vector<State>& states,
                                     const EigenResult& adjoint) {
    std::vector<double> out;
    out.reserve(states.size());
    for (const State& s : states) {
        out.push_back(lyapunov_value(grid, s, adjoint));
    }
    return out;
}

std::vector<double> persistence_floors(const TrajectoryLog& log, double transient_fraction) {
    if (log.times.empty()) {
        throw ConfigError("persistence floor: empty trajectory");
    }
    const double t0 = log.times.front();
    const double cut = t0 + transient_fraction * (log.times.back() - t0);
    std::vector<double> floors;
    bool any = false;
    for (std::size_t j = 0; j < log.times.size(); ++j) {
        if (log.times[j] < cut) {
            continue;
        }
        if (!any) {
            floors = log.min[j];
            any = true;
        } else {
            for (std::size_t k = 0; k < floors.size(); ++k) {
                floors[k] = std::min(floors[k], log.min[j][k]);
            }
        }
    }
    if (!any) {
        throw ConfigError("persistence floor: no samples after the transient");
    }
    return floors;
}

double persistence_floor(const TrajectoryLog& log, double transient_fraction) {
    const std::vector<double> f = persistence_floors(log, transient_fraction);
    return *std::min_element(f.begin(), f.end());
}

State constant_state(const Grid& grid, const std::vector<double>& values) {
    State s;
    for (double v : values) {
        s.components.emplace_back(grid.n, v);
    }
    return s;
}

State eigenfunction_state(const EigenResult& eig, double scale) {
    State s;
    for (const Field& f : eig.eigenfunctions) {
        Field g(f);
        for (double& v : g) {
            v *= scale;
        }
        s.components.push_back(std::move(g));
    }
    return s;
}

State random_state(const Grid& grid, std::size_t components, double lo, double hi,
                   std::uint64_t seed) {
    if (!(lo >= 0.0) || !(lo < hi)) {
        throw ConfigError("random state: require 0 <= lo < hi");
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(lo, hi);
    State s;
    s.components.assign(components, Field(grid.n));
    for (std::size_t k = 0; k < components; ++k) {
        for (double& v : s.components[k]) {
            v = dist(rng);
        }
    }
    return s;
}

}  // namespace dispersal
