#include "dispersal/run.hpp"

#include "dispersal/errors.hpp"
#include "dispersal/report.hpp"

#include <sstream>

namespace dispersal {

namespace fs = std::filesystem;

std::string_view to_string(CheckStatus s) noexcept {
    switch (s) {
        case CheckStatus::pass:
            return "PASS";
        case CheckStatus::fail:
            return "FAIL";
        case CheckStatus::skip:
            return "SKIP";
    }
    return "?";
}

int exit_status_for(const std::exception& e) noexcept {
    if (dynamic_cast<const ConfigError*>(&e) != nullptr) {
        return exit_config;
    }
    if (dynamic_cast<const HypothesisError*>(&e) != nullptr) {
        return exit_hypothesis;
    }
    if (dynamic_cast<const NumericalError*>(&e) != nullptr) {
        return exit_numerical;
    }
    if (dynamic_cast<const fs::filesystem_error*>(&e) != nullptr) {
        return exit_config;
    }
    return exit_numerical;
}

namespace {

std::vector<std::string> numbers(std::initializer_list<double> v) {
    std::vector<std::string> out;
    for (double x : v) {
        out.push_back(format_number(x));
    }
    return out;
}

void emit_csv(RunArtifacts& art, const fs::path& path, const CsvTable& t) {
    t.write(path);
    art.csv.push_back(path);
}

void emit_svg(RunArtifacts& art, const fs::path& path, const PlotSpec& spec,
              const std::vector<Series>& series) {
    write_text(path, render_svg(spec, series));
    art.svg.push_back(path);
}

CsvTable field_table(const Grid& grid, const std::vector<Field>& comps, const char* prefix) {
    std::vector<std::string> header{"x"};
    for (std::size_t k = 0; k < comps.size(); ++k) {
        header.push_back(std::string(prefix) + std::to_string(k + 1));
    }
    CsvTable t(header);
    for (std::size_t i = 0; i < grid.n; ++i) {
        std::vector<std::string> row{format_number(grid.nodes[i])};
        for (const Field& f : comps) {
            row.push_back(format_number(f[i]));
        }
        t.add_row(std::move(row));
    }
    return t;
}

std::vector<Series> field_series(const Grid& grid, const std::vector<Field>& comps,
                                 const std::vector<std::string>& labels) {
    std::vector<Series> s;
    for (std::size_t k = 0; k < comps.size(); ++k) {
        s.push_back({k < labels.size() ? labels[k] : "component " + std::to_string(k + 1),
                     grid.nodes, comps[k]});
    }
    return s;
}

std::vector<std::string> component_labels(SystemKind kind) {
    switch (kind) {
        case SystemKind::two_species_general:
        case SystemKind::submodel:
            return {"u", "v"};
        case SystemKind::logistic:
            return {"w"};
        case SystemKind::three_component:
            return {"u", "v", "w"};
    }
    return {};
}

// Linearisation at the origin, used by the eigen task and eigenfunction initial data.
EigenProblem origin_problem(const ScenarioConfig& cfg, const Grid& grid, double mu) {
    switch (cfg.system) {
        case SystemKind::two_species_general:
        case SystemKind::submodel:
            return mu_problem(cfg.params, grid, mu);
        case SystemKind::logistic: {
            Field e = sample_coefficient(cfg.params.m, grid);
            for (double& v : e) {
                v *= mu;
            }
            return scalar_problem(grid, cfg.params.d3, e);
        }
        case SystemKind::three_component:
            break;
    }
    throw ConfigError("eigen task needs a two-species or logistic system");
}

State initial_state(const ScenarioConfig& cfg, const Grid& grid) {
    const std::size_t K = component_count(cfg.system);
    const InitialSpec& s = cfg.task.initial;
    switch (s.kind) {
        case InitialSpec::Kind::constant:
            if (s.values.size() != K) {
                throw ConfigError("task.initial.values must have " + std::to_string(K) +
                                  " entries");
            }
            return constant_state(grid, s.values);
        case InitialSpec::Kind::random:
            return random_state(grid, K, s.lo, s.hi, cfg.seed);
        case InitialSpec::Kind::eigenfunction:
            return eigenfunction_state(principal_eigen(origin_problem(cfg, grid, 1.0)), s.scale);
        case InitialSpec::Kind::automatic:
            break;
    }
    const double m_hi = max_value(sample_coefficient(cfg.params.m, grid));
    return constant_state(grid, std::vector<double>(K, 0.5 * m_hi));
}

void run_eigen(const ScenarioConfig& cfg, RunArtifacts& art, std::ostream& rep) {
    const Grid grid = cfg.grid();
    const EigenProblem p = origin_problem(cfg, grid, cfg.task.mu);
    EigenOptions eo;
    eo.tol = cfg.solver.eigen_tol;
    const EigenResult r = principal_eigen(p, eo);
    CsvTable t({"lambda", "residual", "iterations"});
    t.add_row({format_number(r.lambda), format_number(r.residual),
               std::to_string(r.iterations)});
    emit_csv(art, cfg.output / "eigen.csv", t);
    emit_csv(art, cfg.output / "eigenfunctions.csv", field_table(grid, r.eigenfunctions, "phi"));
    emit_svg(art, cfg.output / "eigenfunctions.svg",
             {"Principal eigenfunction", "x", "phi", false},
             field_series(grid, r.eigenfunctions, {"phi1", "phi2"}));
    rep << "lambda = " << format_number(r.lambda) << "\n";
    rep << "residual = " << format_number(r.residual) << "\n";
    if (cfg.task.adjoint) {
        const EigenResult a = adjoint_principal_eigen(p, eo);
        CsvTable ta({"lambda", "residual", "iterations"});
        ta.add_row({format_number(a.lambda), format_number(a.residual),
                    std::to_string(a.iterations)});
        emit_csv(art, cfg.output / "adjoint_eigen.csv", ta);
        emit_csv(art, cfg.output / "adjoint_eigenfunctions.csv",
                 field_table(grid, a.eigenfunctions, "psi"));
        rep << "adjoint lambda = " << format_number(a.lambda) << "\n";
    }
}

void run_steady(const ScenarioConfig& cfg, RunArtifacts& art, std::ostream& rep) {
    const Grid grid = cfg.grid();
    const SteadyResult r = integrate_to_steady(cfg.system, cfg.params, grid,
                                               initial_state(cfg, grid), cfg.sim_options());
    emit_csv(art, cfg.output / "steady.csv", field_table(grid, r.state.components, "c"));
    CsvTable s({"t", "residual", "converged", "steps"});
    s.add_row({format_number(r.state.t), format_number(r.residual), r.converged ? "1" : "0",
               std::to_string(r.steps)});
    emit_csv(art, cfg.output / "steady_summary.csv", s);
    emit_svg(art, cfg.output / "steady.svg", {"Steady state", "x", "density", false},
             field_series(grid, r.state.components, component_labels(cfg.system)));
    rep << "residual = " << format_number(r.residual) << " after " << r.steps << " steps\n";
    if (!r.converged) {
        std::ostringstream os;
        os << "no steady state within t_max = " << cfg.solver.t_max << " (residual "
           << r.residual << " > tol " << cfg.solver.tol << ")";
        throw NumericalError(os.str());
    }
}

void run_simulate(const ScenarioConfig& cfg, RunArtifacts& art, std::ostream& rep) {
    const Grid grid = cfg.grid();
    SimOptions o = cfg.sim_options();
    o.stop_at_steady = false;
    std::optional<EigenResult> adj;
    if (component_count(cfg.system) == 2) {
        adj = adjoint_principal_eigen(mu_problem(cfg.params, grid, 1.0));
    }
    const SimulationResult r = simulate(cfg.system, cfg.params, grid, initial_state(cfg, grid), o,
                                        adj ? &*adj : nullptr);
    const TrajectoryLog& log = r.log;
    CsvTable t({"t", "comp", "min", "max", "mass"});
    const auto labels = component_labels(cfg.system);
    for (std::size_t j = 0; j < log.times.size(); ++j) {
        for (std::size_t k = 0; k < log.min[j].size(); ++k) {
            t.add_row({format_number(log.times[j]), labels[k], format_number(log.min[j][k]),
                       format_number(log.max[j][k]), format_number(log.mass[j][k])});
        }
    }
    emit_csv(art, cfg.output / "trajectory.csv", t);
    emit_csv(art, cfg.output / "final.csv", field_table(grid, r.steady.state.components, "c"));
    std::vector<Series> mass;
    for (std::size_t k = 0; k < labels.size(); ++k) {
        Series s{labels[k], log.times, {}};
        for (const auto& m : log.mass) {
            s.y.push_back(m[k]);
        }
        mass.push_back(std::move(s));
    }
    emit_svg(art, cfg.output / "trajectory.svg", {"Component mass", "t", "mass", true}, mass);
    if (adj) {
        CsvTable l({"t", "lyapunov", "dissipation"});
        for (std::size_t j = 0; j < log.times.size(); ++j) {
            l.add_row(numbers({log.times[j], log.lyapunov[j], log.dissipation[j]}));
        }
        emit_csv(art, cfg.output / "lyapunov.csv", l);
        rep << "lambda0 (adjoint) = " << format_number(adj->lambda) << "\n";
    }
    rep << "persistence floor (second half) = " << format_number(persistence_floor(log, 0.5))
        << "\n";
    for (std::size_t k = 0; k < labels.size(); ++k) {
        rep << "final mass " << labels[k] << " = " << format_number(log.mass.back()[k]) << "\n";
    }
}

void run_threshold(const ScenarioConfig& cfg, RunArtifacts& art, std::ostream& rep) {
    if (!cfg.task.threshold) {
        throw ConfigError("threshold task needs task.name");
    }
    const Grid grid = cfg.grid();
    const auto roots =
        find_all_thresholds(*cfg.task.threshold, cfg.params, grid, cfg.analysis_options());
    CsvTable t({"name", "lo", "hi", "root", "residual"});
    for (const ThresholdResult& r : roots) {
        t.add_row({r.name, format_number(r.lo), format_number(r.hi), format_number(r.root),
                   format_number(r.residual)});
        rep << r.name << " = " << format_number(r.root) << " in [" << format_number(r.lo) << ", "
            << format_number(r.hi) << "], residual " << format_number(r.residual) << "\n";
    }
    emit_csv(art, cfg.output / "threshold.csv", t);
    if (roots.empty()) {
        rep << "no sign change found\n";
    }
}

void run_sweep(const ScenarioConfig& cfg, RunArtifacts& art, std::ostream& rep) {
    if (!cfg.task.parameter) {
        throw ConfigError("sweep task needs task.parameter");
    }
    if (cfg.task.values.empty()) {
        throw ConfigError("sweep task needs a non-empty task.values");
    }
    const Grid grid = cfg.grid();
    require_competition_hypothesis(cfg.params, grid);
    const SweepReport s =
        sweep_outcomes(cfg.params, grid, *cfg.task.parameter, cfg.task.values,
                       cfg.analysis_options());
    CsvTable t({"value", "lambda_uv0", "lambda_00w", "outcome", "floor_u", "floor_v", "floor_w"});
    Series a{"lambda_uv0", {}, {}};
    Series b{"lambda_00w", {}, {}};
    for (const SweepPoint& p : s.points) {
        std::vector<std::string> row{format_number(p.value), format_number(p.lambda_uv0),
                                     format_number(p.lambda_00w),
                                     std::string(to_string(p.outcome))};
        for (std::size_t k = 0; k < 3; ++k) {
            row.push_back(k < p.floors.size() ? format_number(p.floors[k]) : "nan");
        }
        t.add_row(std::move(row));
        if (p.error) {
            rep << "value " << format_number(p.value) << ": " << *p.error << "\n";
        } else {
            a.x.push_back(p.value);
            a.y.push_back(p.lambda_uv0);
            b.x.push_back(p.value);
            b.y.push_back(p.lambda_00w);
        }
    }
    emit_csv(art, cfg.output / "sweep.csv", t);
    CsvTable c({"parameter", "C1", "C2"});
    c.add_row({std::string(to_string(s.parameter)), s.C1 ? format_number(*s.C1) : "nan",
               s.C2 ? format_number(*s.C2) : "nan"});
    emit_csv(art, cfg.output / "sweep_summary.csv", c);
    emit_svg(art, cfg.output / "sweep.svg",
             {"Invasion eigenvalues", std::string(to_string(s.parameter)), "lambda", false},
             {a, b});
    rep << "empirical C1 = " << (s.C1 ? format_number(*s.C1) : "none")
        << ", empirical C2 = " << (s.C2 ? format_number(*s.C2) : "none") << "\n";
}

}  // namespace

RunArtifacts run_scenario(const ScenarioConfig& cfg) {
    if (cfg.task.kind == TaskKind::verify) {
        return verify_suite(cfg);
    }
    RunArtifacts art;
    art.report = cfg.output / "report.txt";
    std::ostringstream rep;
    rep << "task: " << to_string(cfg.task.kind) << "\n";
    rep << "system: " << to_string(cfg.system) << "\n";
    rep << "grid: [" << format_number(cfg.a) << ", " << format_number(cfg.b) << "], n = " << cfg.n
        << "\n";
    try {
        fs::create_directories(cfg.output);
        write_text(cfg.output / "config.json", dump_config(cfg));
        switch (cfg.task.kind) {
            case TaskKind::eigen:
                run_eigen(cfg, art, rep);
                break;
            case TaskKind::steady:
                run_steady(cfg, art, rep);
                break;
            case TaskKind::simulate:
                run_simulate(cfg, art, rep);
                break;
            case TaskKind::threshold:
                run_threshold(cfg, art, rep);
                break;
            case TaskKind::sweep:
                run_sweep(cfg, art, rep);
                break;
            case TaskKind::verify:
                break;
        }
        rep << "status: ok\n";
    } catch (const std::exception& e) {
        art.exit_status = exit_status_for(e);
        art.message = e.what();
        rep << "status: error (exit " << art.exit_status << ")\n";
        rep << "error: " << e.what() << "\n";
    }
    try {
        write_text(art.report, rep.str());
    } catch (const std::exception& e) {
        if (art.exit_status == exit_ok) {
            art.exit_status = exit_config;
            art.message = e.what();
        }
    }
    return art;
}

}  // namespace dispersal
