#pragma once

#include "dispersal/config.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace dispersal {

enum ExitStatus : int {
    exit_ok = 0,
    exit_check_failed = 1,
    exit_config = 2,
    exit_numerical = 3,
    exit_hypothesis = 4,
};

enum class CheckStatus { pass, fail, skip };

[[nodiscard]] std::string_view to_string(CheckStatus s) noexcept;

struct CheckResult {
    std::string group;
    std::string name;
    CheckStatus status = CheckStatus::fail;
    std::string detail;
};

struct RunArtifacts {
    std::vector<std::filesystem::path> csv;
    std::vector<std::filesystem::path> svg;
    std::filesystem::path report;
    int exit_status = exit_ok;
    std::string message;
    std::vector<CheckResult> checks;  // verify task only
};

/// Executes the configured task and writes its outputs under cfg.output.
/// Errors never escape: they are mapped to an exit status and written to
/// report.txt.
RunArtifacts run_scenario(const ScenarioConfig& cfg);

/// Verification groups in report order, with a one-line title each.
struct CheckGroup {
    std::string id;
    std::string title;
};
const std::vector<CheckGroup>& verify_groups();

/// Runs the verification battery (all groups, or the subset named in
/// cfg.task.checks). Exit status 1 when any check fails; skipped checks
/// carry the reason in their detail.
RunArtifacts verify_suite(const ScenarioConfig& cfg);

/// Maps an exception to its exit status.
int exit_status_for(const std::exception& e) noexcept;

}  // namespace dispersal
