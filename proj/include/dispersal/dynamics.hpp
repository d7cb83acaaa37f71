#pragma once

#include "dispersal/banded.hpp"
#include "dispersal/mesh.hpp"
#include "dispersal/model.hpp"
#include "dispersal/spectral.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace dispersal {

struct State {
    double t = 0.0;
    std::vector<Field> components;
};

struct SimOptions {
    double dt = 0.01;
    double tol = 1e-9;          // steady-state residual (sup-norm of the right-hand side)
    double t_max = 2000.0;
    double sample_interval = 1.0;
    int max_halvings = 4;
    bool stop_at_steady = true;
    bool keep_states = false;   // store the sampled states in the log
};

struct SteadyResult {
    State state;
    double residual = 0.0;
    bool converged = false;
    std::size_t steps = 0;
    double dt_used = 0.0;
};

struct TrajectoryLog {
    std::vector<double> times;
    std::vector<std::vector<double>> min;   // [sample][component]
    std::vector<std::vector<double>> max;
    std::vector<std::vector<double>> mass;
    std::vector<double> lyapunov;           // ∫ψ*·x, filled when weights are given
    std::vector<double> dissipation;        // -∫[ψ1 u(u + bv) + ψ2 v(cu + v)]
    std::vector<State> states;              // when SimOptions::keep_states
};

struct SimulationResult {
    SteadyResult steady;    // final state, residual and step count
    TrajectoryLog log;
};

/// Semi-discrete right-hand side D Δ_h x + f(x) and the IMEX step built on it.
/// Factorisations of I - dt d_k Δ_h are cached for the current dt.
class ImexStepper {
public:
    ImexStepper(SystemKind kind, const ModelParams& params, const Grid& grid);

    [[nodiscard]] SystemKind kind() const noexcept { return reaction_.kind(); }
    [[nodiscard]] std::size_t components() const noexcept { return reaction_.components(); }
    [[nodiscard]] const Grid& grid() const noexcept { return grid_; }
    [[nodiscard]] const Reaction& reaction() const noexcept { return reaction_; }
    [[nodiscard]] double diffusion(std::size_t k) const { return diffusions_.at(k); }

    std::vector<Field> rhs(const State& s) const;
    double residual(const State& s) const;

    /// One backward-Euler diffusion / explicit reaction step. Throws
    /// NumericalError when the explicit reaction drives a value below -1e-13.
    State step(const State& s, double dt);

private:
    void factor(double dt);

    Grid grid_;
    NeumannLaplacian lap_;
    Reaction reaction_;
    std::vector<double> diffusions_;
    double factored_dt_ = 0.0;
    std::vector<TridiagonalLU> solvers_;
};

/// Diffusion rates of each component for the given system.
std::vector<double> component_diffusions(SystemKind kind, const ModelParams& params);

State step_imex(SystemKind kind, const ModelParams& params, const Grid& grid, const State& state,
                double dt);

/// Time-steps until the residual drops to opts.tol or t_max is reached.
/// For the submodel under the competition hypothesis, a converged state must
/// lie in [0, max β] x [0, max α]; NumericalError otherwise.
SteadyResult integrate_to_steady(SystemKind kind, const ModelParams& params, const Grid& grid,
                                 const State& initial, const SimOptions& opts = {});

/// Full trajectory with samples every opts.sample_interval. When adjoint is
/// given (two-component systems only) the Lyapunov series and its predicted
/// derivative are recorded.
SimulationResult simulate(SystemKind kind, const ModelParams& params, const Grid& grid,
                          const State& initial, const SimOptions& opts = {},
                          const EigenResult* adjoint = nullptr);

/// ∫(ψ1 u + ψ2 v) by quadrature.
double lyapunov_value(const Grid& grid, const State& s, const EigenResult& adjoint);

/// -∫[ψ1 u(u + b v) + ψ2 v(c u + v)] by quadrature.
double lyapunov_dissipation(const Grid& grid, const State& s, const EigenResult& adjoint,
                            double b, double c);

/// Lyapunov series over sampled states.
std::vector<double> monitor_lyapunov(const Grid& grid, const std::vector<State>& states,
                                     const EigenResult& adjoint);

/// Minimum over samples with t >= transient_fraction * t_last of the
/// per-component spatial minimum. ConfigError if the window is empty.
double persistence_floor(const TrajectoryLog& log, double transient_fraction = 0.5);

/// Per-component floors over the same window.
std::vector<double> persistence_floors(const TrajectoryLog& log, double transient_fraction = 0.5);

// Initial data library
State constant_state(const Grid& grid, const std::vector<double>& values);
State eigenfunction_state(const EigenResult& eig, double scale);
State random_state(const Grid& grid, std::size_t components, double lo, double hi,
                   std::uint64_t seed);

}  // namespace dispersal
