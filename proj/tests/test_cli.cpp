#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dispersal/config.hpp"
#include "dispersal/errors.hpp"
#include "dispersal/report.hpp"
#include "dispersal/run.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

using namespace dispersal;
namespace fs = std::filesystem;

namespace {

fs::path base() { return fs::temp_directory_path() / "dispersal_test_cli"; }

fs::path scratch(const std::string& name) {
    const fs::path p = base() / name;
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

const char* kReference = R"({
  "grid": {"a": 0, "b": 1, "n": 101},
  "params": {"d1": 0.1, "d2": 1, "d3": 0.4, "alpha": 1, "beta": 1,
             "m": {"type": "cosine", "mean": 0.4, "amplitude": 0.3, "frequency": 1}},
  "system": "three_component"
})";

}  // namespace

TEST_CASE("config parsing") {
    const ScenarioConfig c = parse_config(kReference);
    CHECK(c.n == 101);
    CHECK(c.system == SystemKind::three_component);
    CHECK(c.params.d3 == 0.4);
    CHECK(std::holds_alternative<CosineProfile>(c.params.m));
    CHECK(c.task.kind == TaskKind::eigen);

    const ScenarioConfig d = parse_config(dump_config(c));
    CHECK(dump_config(d) == dump_config(c));

    CHECK_THROWS_AS(parse_config("{"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"grid": {"n": 2}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"grdi": {}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"params": {"d1": "x"}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"system": "pair"})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"task": {"type": "threshold", "name": "x"}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"solver": {"dt": -1}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"params": {"m": {"type": "cosine", "mean": 1, "phase": 2}}})"),
                    ConfigError);

    const ScenarioConfig s = parse_config(
        R"({"task": {"type": "sweep", "parameter": "beta", "values": [0.1, 0.2]},
            "params": {"m": {"type": "samples", "values": [1, 2, 3]}}, "grid": {"n": 3}, "seed": 9})");
    CHECK(s.task.kind == TaskKind::sweep);
    CHECK(*s.task.parameter == SweepParameter::beta);
    CHECK(s.task.values.size() == 2);
    CHECK(s.seed == 9);
    CHECK(std::get<SampledProfile>(s.params.m).values.size() == 3);
}

TEST_CASE("CSV formatting") {
    CHECK(format_number(0.1) == "0.10000000000000001");
    CHECK(format_number(-2.0) == "-2");
    CsvTable t({"a", "b"});
    t.add_row({"x,y", "1"});
    CHECK(t.str() == "a,b\n\"x,y\",1\n");
    CHECK_THROWS_AS(t.add_row({"1"}), ConfigError);
}

TEST_CASE("eigen task on constant coefficients") {
    ScenarioConfig c;
    c.n = 51;
    c.params.m = ConstantProfile{0.7};
    c.params.alpha = ConstantProfile{0.5};
    c.params.beta = ConstantProfile{2.0};
    c.task.kind = TaskKind::eigen;
    c.task.adjoint = true;
    c.output = scratch("eigen");
    const RunArtifacts art = run_scenario(c);
    REQUIRE(art.exit_status == exit_ok);
    for (const auto& p : art.csv) {
        CHECK(fs::exists(p));
    }
    CHECK(fs::exists(art.report));
    const std::string csv = slurp(c.output / "eigen.csv");
    CHECK(csv.rfind("lambda,residual,iterations\n", 0) == 0);
    const double lambda = std::stod(csv.substr(csv.find('\n') + 1));
    CHECK(std::abs(lambda - 0.7) <= 1e-8);
    CHECK(fs::exists(c.output / "eigenfunctions.svg"));
}

TEST_CASE("exit statuses") {
    ScenarioConfig c = parse_config(kReference);
    SUBCASE("validation error") {
        c.params.d1 = 5.0;
        c.task.kind = TaskKind::steady;
        c.output = scratch("validation");
        const RunArtifacts art = run_scenario(c);
        CHECK(art.exit_status == exit_config);
        CHECK(slurp(art.report).find("d1") != std::string::npos);
    }
    SUBCASE("non-convergence") {
        c.system = SystemKind::submodel;
        c.task.kind = TaskKind::steady;
        c.solver.t_max = 1.0;
        c.output = scratch("numerical");
        CHECK(run_scenario(c).exit_status == exit_numerical);
    }
    SUBCASE("hypothesis violation") {
        c.params.m = ConstantProfile{0.5};
        c.task.kind = TaskKind::threshold;
        c.task.threshold = ThresholdName::d_c;
        c.output = scratch("hypothesis");
        const RunArtifacts art = run_scenario(c);
        CHECK(art.exit_status == exit_hypothesis);
        CHECK(slurp(art.report).find("non-constant") != std::string::npos);
    }
    SUBCASE("missing task field") {
        c.task.kind = TaskKind::sweep;
        c.output = scratch("missing");
        CHECK(run_scenario(c).exit_status == exit_config);
    }
}

TEST_CASE("threshold task writes the bracket and root") {
    ScenarioConfig c = parse_config(kReference);
    c.task.kind = TaskKind::threshold;
    c.task.threshold = ThresholdName::d_c;
    c.output = scratch("threshold");
    const RunArtifacts art = run_scenario(c);
    REQUIRE(art.exit_status == exit_ok);
    const std::string csv = slurp(c.output / "threshold.csv");
    CHECK(csv.rfind("name,lo,hi,root,residual\nd_c,0.10000000000000001,0.55000000000000004,", 0) == 0);
}

TEST_CASE("seeded simulate output is byte-identical") {
    ScenarioConfig c = parse_config(kReference);
    c.system = SystemKind::submodel;
    c.task.kind = TaskKind::simulate;
    c.task.initial.kind = InitialSpec::Kind::random;
    c.solver.t_max = 20.0;
    c.seed = 3;
    c.output = scratch("sim_a");
    REQUIRE(run_scenario(c).exit_status == exit_ok);
    c.output = scratch("sim_b");
    REQUIRE(run_scenario(c).exit_status == exit_ok);
    for (const char* f : {"trajectory.csv", "final.csv", "lyapunov.csv"}) {
        CHECK(slurp(base() / "sim_a" / f) ==
              slurp(base() / "sim_b" / f));
    }
    c.seed = 4;
    c.output = scratch("sim_c");
    REQUIRE(run_scenario(c).exit_status == exit_ok);
    CHECK(slurp(c.output / "final.csv") !=
          slurp(base() / "sim_a" / "final.csv"));
}

TEST_CASE("verify subset and skip semantics") {
    ScenarioConfig c = parse_config(kReference);
    c.task.kind = TaskKind::verify;
    c.task.checks = {"discretization", "diffusion_thresholds"};
    c.output = scratch("verify");
    RunArtifacts art = run_scenario(c);
    CHECK(art.exit_status == exit_ok);
    CHECK(fs::exists(c.output / "checks.csv"));
    const std::string report = slurp(art.report);
    CHECK(report.find("PASS  error ratio") != std::string::npos);

    c.params.m = CosineProfile{2.5, 0.3, 1.0};  // max m above alpha + beta
    c.output = scratch("verify_skip");
    art = run_scenario(c);
    CHECK(art.exit_status == exit_ok);
    bool skipped = false;
    for (const CheckResult& r : art.checks) {
        skipped = skipped || (r.group == "diffusion_thresholds" && r.status == CheckStatus::skip);
    }
    CHECK(skipped);

    c.task.checks = {"nonsense"};
    CHECK(run_scenario(c).exit_status == exit_config);
    CHECK(verify_groups().size() == 13);
}

TEST_CASE("command-line front end") {
    const fs::path dir = scratch("cli");
    fs::create_directories(dir);
    const fs::path cfg = dir / "c.json";
    {
        std::ofstream out(cfg);
        out << kReference;
    }
    auto run = [&](const std::string& args) {
        const std::string cmd = std::string(LAB_EXE) + " " + args + " > " + (dir / "log").string() + " 2>&1";
        const int rc = std::system(cmd.c_str());
        return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    };
    CHECK(run("threshold --config " + cfg.string() + " --name d_c --out " + (dir / "t").string()) == 0);
    CHECK(fs::exists(dir / "t" / "threshold.csv"));
    CHECK(run("eigen --config " + cfg.string() + " --out " + (dir / "e").string()) == 2);
    CHECK(run("steady --config " + (dir / "missing.json").string()) == 2);
    CHECK(run("sweep") == 2);
    CHECK(run("bogus") == 2);
}
