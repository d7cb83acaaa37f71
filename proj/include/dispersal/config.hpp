#pragma once

#include "dispersal/analysis.hpp"
#include "dispersal/model.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace dispersal {

enum class TaskKind { eigen, steady, simulate, threshold, sweep, verify };

[[nodiscard]] std::string_view to_string(TaskKind t) noexcept;
TaskKind task_from_string(std::string_view s);

struct InitialSpec {
    enum class Kind { automatic, constant, random, eigenfunction } kind = Kind::automatic;
    std::vector<double> values;  // constant
    double lo = 0.0;             // random
    double hi = 1.0;
    double scale = 0.1;          // eigenfunction
};

struct TaskSpec {
    TaskKind kind = TaskKind::eigen;
    double mu = 1.0;                          // eigen
    bool adjoint = false;                     // eigen
    std::optional<ThresholdName> threshold;
    std::optional<SweepParameter> parameter;
    std::vector<double> values;               // sweep
    std::vector<std::string> checks;          // verify subset; empty = all
    InitialSpec initial;                      // steady / simulate
};

struct SolverSpec {
    double dt = 0.01;
    double tol = 1e-9;
    double t_max = 2000.0;
    double sample_interval = 1.0;
    std::size_t scan_points = 64;
    double eigen_tol = 1e-12;
    double mu_lo = 1e-3;
    double mu_hi = 1e3;
};

struct ScenarioConfig {
    double a = 0.0;
    double b = 1.0;
    std::size_t n = 201;
    ModelParams params;
    SystemKind system = SystemKind::submodel;
    TaskSpec task;
    SolverSpec solver;
    std::filesystem::path output = "out";
    std::uint64_t seed = 1;

    [[nodiscard]] Grid grid() const { return build_grid(a, b, n); }
    [[nodiscard]] AnalysisOptions analysis_options() const;
    [[nodiscard]] SimOptions sim_options() const;
};

/// Parses a JSON document. Throws ConfigError naming the offending field.
/// The task may be omitted when the caller supplies it (CLI subcommand).
ScenarioConfig parse_config(const std::string& json_text);
ScenarioConfig load_config(const std::filesystem::path& path);

/// Config of the built-in reference scenario used by the verify task.
ScenarioConfig default_verify_config();

/// JSON text of a config (inverse of parse_config up to formatting).
std::string dump_config(const ScenarioConfig& cfg);

}  // namespace dispersal
