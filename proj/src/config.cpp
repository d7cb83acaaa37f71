#include "dispersal/config.hpp"

#include "dispersal/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace dispersal {

using nlohmann::json;

namespace {

void require_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) {
        throw ConfigError(where + ": expected an object");
    }
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& item : j.items()) {
        if (!ok.count(item.key())) {
            throw ConfigError(where + ": unknown key '" + item.key() + "'");
        }
    }
}

double get_number(const json& j, const char* key, const std::string& where, double fallback) {
    if (!j.contains(key)) {
        return fallback;
    }
    const json& v = j.at(key);
    if (!v.is_number()) {
        throw ConfigError(where + "." + key + ": expected a number");
    }
    return v.get<double>();
}

double require_number(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) {
        throw ConfigError(where + ": missing '" + key + "'");
    }
    return get_number(j, key, where, 0.0);
}

std::string require_string(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key) || !j.at(key).is_string()) {
        throw ConfigError(where + ": missing string '" + key + "'");
    }
    return j.at(key).get<std::string>();
}

std::vector<double> number_array(const json& j, const std::string& where) {
    if (!j.is_array()) {
        throw ConfigError(where + ": expected an array of numbers");
    }
    std::vector<double> out;
    for (const json& v : j) {
        if (!v.is_number()) {
            throw ConfigError(where + ": expected an array of numbers");
        }
        out.push_back(v.get<double>());
    }
    return out;
}

CoefficientSpec parse_coefficient(const json& j, const std::string& where) {
    if (j.is_number()) {
        return ConstantProfile{j.get<double>()};
    }
    if (!j.is_object()) {
        throw ConfigError(where + ": expected a number or a coefficient object");
    }
    const std::string type = require_string(j, "type", where);
    if (type == "constant") {
        require_keys(j, where, {"type", "value"});
        return ConstantProfile{require_number(j, "value", where)};
    }
    if (type == "cosine") {
        require_keys(j, where, {"type", "mean", "amplitude", "frequency"});
        return CosineProfile{require_number(j, "mean", where),
                             require_number(j, "amplitude", where),
                             get_number(j, "frequency", where, 1.0)};
    }
    if (type == "samples") {
        require_keys(j, where, {"type", "values"});
        if (!j.contains("values")) {
            throw ConfigError(where + ": missing 'values'");
        }
        return SampledProfile{number_array(j.at("values"), where + ".values")};
    }
    throw ConfigError(where + ": unknown coefficient type '" + type + "'");
}

json dump_coefficient(const CoefficientSpec& spec) {
    if (const auto* c = std::get_if<ConstantProfile>(&spec)) {
        return c->value;
    }
    if (const auto* c = std::get_if<CosineProfile>(&spec)) {
        return json{{"type", "cosine"},
                    {"mean", c->mean},
                    {"amplitude", c->amplitude},
                    {"frequency", c->frequency}};
    }
    const auto& s = std::get<SampledProfile>(spec);
    return json{{"type", "samples"}, {"values", s.values}};
}

InitialSpec parse_initial(const json& j) {
    const std::string where = "task.initial";
    InitialSpec s;
    const std::string type = require_string(j, "type", where);
    if (type == "constant") {
        require_keys(j, where, {"type", "values"});
        if (!j.contains("values")) {
            throw ConfigError(where + ": missing 'values'");
        }
        s.kind = InitialSpec::Kind::constant;
        s.values = number_array(j.at("values"), where + ".values");
    } else if (type == "random") {
        require_keys(j, where, {"type", "lo", "hi"});
        s.kind = InitialSpec::Kind::random;
        s.lo = get_number(j, "lo", where, 0.0);
        s.hi = get_number(j, "hi", where, 1.0);
    } else if (type == "eigenfunction") {
        require_keys(j, where, {"type", "scale"});
        s.kind = InitialSpec::Kind::eigenfunction;
        s.scale = get_number(j, "scale", where, 0.1);
    } else {
        throw ConfigError(where + ": unknown initial type '" + type + "'");
    }
    return s;
}

json dump_initial(const InitialSpec& s) {
    switch (s.kind) {
        case InitialSpec::Kind::constant:
            return json{{"type", "constant"}, {"values", s.values}};
        case InitialSpec::Kind::random:
            return json{{"type", "random"}, {"lo", s.lo}, {"hi", s.hi}};
        case InitialSpec::Kind::eigenfunction:
            return json{{"type", "eigenfunction"}, {"scale", s.scale}};
        case InitialSpec::Kind::automatic:
            break;
    }
    return nullptr;
}

std::size_t to_count(double v, const std::string& where) {
    if (!(v >= 0.0) || v != std::floor(v) || v > 1e9) {
        throw ConfigError(where + ": expected a non-negative integer");
    }
    return static_cast<std::size_t>(v);
}

}  // namespace

std::string_view to_string(TaskKind t) noexcept {
    switch (t) {
        case TaskKind::eigen:
            return "eigen";
        case TaskKind::steady:
            return "steady";
        case TaskKind::simulate:
            return "simulate";
        case TaskKind::threshold:
            return "threshold";
        case TaskKind::sweep:
            return "sweep";
        case TaskKind::verify:
            return "verify";
    }
    return "unknown";
}

TaskKind task_from_string(std::string_view s) {
    for (auto t : {TaskKind::eigen, TaskKind::steady, TaskKind::simulate, TaskKind::threshold,
                   TaskKind::sweep, TaskKind::verify}) {
        if (to_string(t) == s) {
            return t;
        }
    }
    throw ConfigError("unknown task '" + std::string(s) + "'");
}

AnalysisOptions ScenarioConfig::analysis_options() const {
    AnalysisOptions o;
    o.eig.tol = solver.eigen_tol;
    o.sim = sim_options();
    o.scan.points = solver.scan_points;
    o.mu_lo = solver.mu_lo;
    o.mu_hi = solver.mu_hi;
    return o;
}

SimOptions ScenarioConfig::sim_options() const {
    SimOptions o;
    o.dt = solver.dt;
    o.tol = solver.tol;
    o.t_max = solver.t_max;
    o.sample_interval = solver.sample_interval;
    return o;
}

ScenarioConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    require_keys(j, "config", {"grid", "params", "system", "task", "solver", "output", "seed"});
    ScenarioConfig c;

    if (j.contains("grid")) {
        const json& g = j.at("grid");
        require_keys(g, "grid", {"a", "b", "n"});
        c.a = get_number(g, "a", "grid", c.a);
        c.b = get_number(g, "b", "grid", c.b);
        c.n = to_count(get_number(g, "n", "grid", static_cast<double>(c.n)), "grid.n");
    }
    if (j.contains("params")) {
        const json& p = j.at("params");
        require_keys(p, "params", {"d1", "d2", "d3", "b", "c", "alpha", "beta", "m"});
        ModelParams& mp = c.params;
        mp.d1 = get_number(p, "d1", "params", mp.d1);
        mp.d2 = get_number(p, "d2", "params", mp.d2);
        mp.d3 = get_number(p, "d3", "params", mp.d3);
        mp.b = get_number(p, "b", "params", mp.b);
        mp.c = get_number(p, "c", "params", mp.c);
        if (p.contains("alpha")) {
            mp.alpha = parse_coefficient(p.at("alpha"), "params.alpha");
        }
        if (p.contains("beta")) {
            mp.beta = parse_coefficient(p.at("beta"), "params.beta");
        }
        if (p.contains("m")) {
            mp.m = parse_coefficient(p.at("m"), "params.m");
        }
    }
    if (j.contains("system")) {
        if (!j.at("system").is_string()) {
            throw ConfigError("system: expected a string");
        }
        c.system = system_kind_from_string(j.at("system").get<std::string>());
    }
    if (j.contains("task")) {
        const json& t = j.at("task");
        if (t.is_string()) {
            c.task.kind = task_from_string(t.get<std::string>());
        } else {
            require_keys(t, "task",
                         {"type", "mu", "adjoint", "name", "parameter", "values", "checks",
                          "initial"});
            c.task.kind = task_from_string(require_string(t, "type", "task"));
            c.task.mu = get_number(t, "mu", "task", c.task.mu);
            if (t.contains("adjoint")) {
                if (!t.at("adjoint").is_boolean()) {
                    throw ConfigError("task.adjoint: expected a boolean");
                }
                c.task.adjoint = t.at("adjoint").get<bool>();
            }
            if (t.contains("name")) {
                c.task.threshold = threshold_from_string(require_string(t, "name", "task"));
            }
            if (t.contains("parameter")) {
                c.task.parameter =
                    sweep_parameter_from_string(require_string(t, "parameter", "task"));
            }
            if (t.contains("values")) {
                c.task.values = number_array(t.at("values"), "task.values");
            }
            if (t.contains("checks")) {
                if (!t.at("checks").is_array()) {
                    throw ConfigError("task.checks: expected an array of strings");
                }
                for (const json& v : t.at("checks")) {
                    if (!v.is_string()) {
                        throw ConfigError("task.checks: expected an array of strings");
                    }
                    c.task.checks.push_back(v.get<std::string>());
                }
            }
            if (t.contains("initial")) {
                c.task.initial = parse_initial(t.at("initial"));
            }
        }
    }
    if (j.contains("solver")) {
        const json& s = j.at("solver");
        require_keys(s, "solver",
                     {"dt", "tol", "t_max", "sample_interval", "scan_points", "eigen_tol", "mu_lo",
                      "mu_hi"});
        SolverSpec& o = c.solver;
        o.dt = get_number(s, "dt", "solver", o.dt);
        o.tol = get_number(s, "tol", "solver", o.tol);
        o.t_max = get_number(s, "t_max", "solver", o.t_max);
        o.sample_interval = get_number(s, "sample_interval", "solver", o.sample_interval);
        o.scan_points = to_count(
            get_number(s, "scan_points", "solver", static_cast<double>(o.scan_points)),
            "solver.scan_points");
        o.eigen_tol = get_number(s, "eigen_tol", "solver", o.eigen_tol);
        o.mu_lo = get_number(s, "mu_lo", "solver", o.mu_lo);
        o.mu_hi = get_number(s, "mu_hi", "solver", o.mu_hi);
        if (!(o.dt > 0.0) || !(o.tol > 0.0) || !(o.t_max >= 0.0) || !(o.sample_interval > 0.0) ||
            !(o.eigen_tol > 0.0) || o.scan_points < 2 || !(0.0 < o.mu_lo && o.mu_lo < o.mu_hi)) {
            throw ConfigError("solver: require dt, tol, sample_interval, eigen_tol > 0, "
                              "t_max >= 0, scan_points >= 2, 0 < mu_lo < mu_hi");
        }
    }
    if (j.contains("output")) {
        if (!j.at("output").is_string()) {
            throw ConfigError("output: expected a string");
        }
        c.output = j.at("output").get<std::string>();
    }
    if (j.contains("seed")) {
        const json& s = j.at("seed");
        if (!s.is_number_integer() || s.get<std::int64_t>() < 0) {
            throw ConfigError("seed: expected a non-negative integer");
        }
        c.seed = s.get<std::uint64_t>();
    }
    // Surface grid errors at parse time.
    (void)c.grid();
    return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

ScenarioConfig default_verify_config() {
    ScenarioConfig c;
    c.a = 0.0;
    c.b = 1.0;
    c.n = 401;
    c.params.d1 = 0.1;
    c.params.d2 = 1.0;
    c.params.d3 = 0.4;
    c.params.alpha = ConstantProfile{1.0};
    c.params.beta = ConstantProfile{1.0};
    c.params.m = CosineProfile{0.4, 0.3, 1.0};
    c.system = SystemKind::three_component;
    c.task.kind = TaskKind::verify;
    c.output = "verify_out";
    c.seed = 20240917;
    return c;
}

std::string dump_config(const ScenarioConfig& c) {
    json task{{"type", std::string(to_string(c.task.kind))}};
    switch (c.task.kind) {
        case TaskKind::eigen:
            task["mu"] = c.task.mu;
            task["adjoint"] = c.task.adjoint;
            break;
        case TaskKind::threshold:
            if (c.task.threshold) {
                task["name"] = std::string(to_string(*c.task.threshold));
            }
            break;
        case TaskKind::sweep:
            if (c.task.parameter) {
                task["parameter"] = std::string(to_string(*c.task.parameter));
            }
            task["values"] = c.task.values;
            break;
        case TaskKind::verify:
            if (!c.task.checks.empty()) {
                task["checks"] = c.task.checks;
            }
            break;
        case TaskKind::steady:
        case TaskKind::simulate:
            break;
    }
    if (c.task.initial.kind != InitialSpec::Kind::automatic) {
        task["initial"] = dump_initial(c.task.initial);
    }
    json j{
        {"grid", {{"a", c.a}, {"b", c.b}, {"n", c.n}}},
        {"params",
         {{"d1", c.params.d1},
          {"d2", c.params.d2},
          {"d3", c.params.d3},
          {"b", c.params.b},
          {"c", c.params.c},
          {"alpha", dump_coefficient(c.params.alpha)},
          {"beta", dump_coefficient(c.params.beta)},
          {"m", dump_coefficient(c.params.m)}}},
        {"system", std::string(to_string(c.system))},
        {"task", task},
        {"solver",
         {{"dt", c.solver.dt},
          {"tol", c.solver.tol},
          {"t_max", c.solver.t_max},
          {"sample_interval", c.solver.sample_interval},
          {"scan_points", c.solver.scan_points},
          {"eigen_tol", c.solver.eigen_tol},
          {"mu_lo", c.solver.mu_lo},
          {"mu_hi", c.solver.mu_hi}}},
        {"output", c.output.string()},
        {"seed", c.seed},
    };
    return j.dump(2) + "\n";
}

}  // namespace dispersal
