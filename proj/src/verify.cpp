#include "dispersal/errors.hpp"
#include "dispersal/report.hpp"
#include "dispersal/run.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>

namespace dispersal {

namespace fs = std::filesystem;

namespace {

std::string g6(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

class Recorder {
public:
    Recorder(std::vector<CheckResult>& out, std::size_t n) : out_(out), n_(n) {}

    void set_group(std::string id) { group_ = std::move(id); }

    void expect(std::string name, bool ok, std::string detail) {
        if (!ok && n_ < 201) {
            detail += " (grid n = " + std::to_string(n_) + " may be too coarse)";
        }
        out_.push_back({group_, std::move(name), ok ? CheckStatus::pass : CheckStatus::fail,
                        std::move(detail)});
    }

    void skip(std::string name, std::string reason) {
        out_.push_back({group_, std::move(name), CheckStatus::skip, std::move(reason)});
    }

    void fail(std::string name, std::string reason) {
        out_.push_back({group_, std::move(name), CheckStatus::fail, std::move(reason)});
    }

private:
    std::vector<CheckResult>& out_;
    std::size_t n_;
    std::string group_;
};

struct Ctx {
    const ScenarioConfig& cfg;
    Grid grid;      // eigenvalue work
    Grid dyn_grid;  // long time integrations
    AnalysisOptions opts;
    Recorder& rec;
    RunArtifacts& art;

    void csv(const std::string& file, const CsvTable& t) {
        const fs::path p = cfg.output / file;
        t.write(p);
        art.csv.push_back(p);
    }
    void svg(const std::string& file, const PlotSpec& spec, const std::vector<Series>& s) {
        const fs::path p = cfg.output / file;
        write_text(p, render_svg(spec, s));
        art.svg.push_back(p);
    }
};

Field cosine(const Grid& g, double mean, double amp, double freq) {
    return sample_coefficient(CosineProfile{mean, amp, freq}, g);
}

Field constant(const Grid& g, double v) { return Field(g.n, v); }

Field minus(Field a, const Field& b) {
    for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] -= b[i];
    }
    return a;
}

double lam(const EigenProblem& p, const EigenOptions& eo) { return principal_eigen(p, eo).lambda; }

ModelParams switching_params(const ModelParams& base, CoefficientSpec m, double alpha,
                             double beta) {
    ModelParams p = base;
    p.m = std::move(m);
    p.alpha = ConstantProfile{alpha};
    p.beta = ConstantProfile{beta};
    return p;
}

double rel_diff(double a, double b) { return std::abs(a - b) / std::abs(b); }

// ---------------------------------------------------------------------------

void group_discretization(Ctx& c) {
    const double len = c.cfg.b - c.cfg.a;
    const double k = std::numbers::pi / len;
    CsvTable t({"n", "sup_error"});
    std::vector<double> err;
    for (std::size_t n : {201u, 401u}) {
        const Grid g = build_grid(c.cfg.a, c.cfg.b, n);
        const Field f = cosine(g, 0.0, 1.0, 1.0);
        const Field lf = assemble_neumann_laplacian(g).apply(f);
        double e = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            e = std::max(e, std::abs(lf[i] + k * k * f[i]));
        }
        err.push_back(e);
        t.add_row({std::to_string(n), format_number(e)});
    }
    c.csv("discretization.csv", t);
    const double ratio = err[0] / err[1];
    c.rec.expect("error ratio 201/401 >= 3.5", ratio >= 3.5,
                 "ratio = " + g6(ratio) + ", errors " + g6(err[0]) + ", " + g6(err[1]));

    const Grid& g = c.grid;
    const NeumannLaplacian L = assemble_neumann_laplacian(g);
    const double scale = 1.0 / (g.h * g.h);
    const double row = sup_norm(L.apply(constant(g, 1.0)));
    c.rec.expect("constants in the kernel", row <= 1e-12 * scale, "sup |L 1| = " + g6(row));

    Field f(g.n);
    Field q(g.n);
    for (std::size_t i = 0; i < g.n; ++i) {
        const double s = (g.nodes[i] - g.a) / len;
        f[i] = std::cos(3.0 * s) + s * s;
        q[i] = std::exp(s);
    }
    const double a1 = inner(g, f, L.apply(q));
    const double a2 = inner(g, L.apply(f), q);
    c.rec.expect("symmetric in the quadrature inner product",
                 std::abs(a1 - a2) <= 1e-10 * std::max(std::abs(a1), 1.0),
                 "<f, Lq> = " + g6(a1) + ", <Lf, q> = " + g6(a2));
    const double e1 = dirichlet_energy(g, f);
    const double e2 = -inner(g, f, L.apply(f));
    c.rec.expect("Dirichlet energy equals -<f, Lf>", std::abs(e1 - e2) <= 1e-10 * std::abs(e1),
                 "energy = " + g6(e1) + ", -<f, Lf> = " + g6(e2));
}

Field random_cosine_field(std::mt19937_64& rng, const Grid& g, double mean, double spread) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Field f = constant(g, mean);
    for (int j = 1; j <= 3; ++j) {
        const Field c = cosine(g, 0.0, spread * u(rng) / 3.0, j);
        for (std::size_t i = 0; i < g.n; ++i) {
            f[i] += c[i];
        }
    }
    return f;
}

void group_eigen_oracle(Ctx& c) {
    const Grid g = build_grid(c.cfg.a, c.cfg.b, 101);
    std::mt19937_64 rng(c.cfg.seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    CsvTable t({"case", "components", "lambda_power", "lambda_dense", "rel_diff"});
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
        EigenProblem p;
        if (i % 2 == 0) {
            const double d = 0.05 + 1.95 * u01(rng);
            p = scalar_problem(g, d, random_cosine_field(rng, g, 0.2 + 0.6 * u01(rng), 1.0));
        } else {
            const double d1 = 0.05 + 0.95 * u01(rng);
            const double d2 = d1 + (2.0 - d1) * u01(rng);
            const Field m = random_cosine_field(rng, g, 0.85, 0.8);
            const double am = 0.2 + u01(rng);
            const double bm = 0.2 + u01(rng);
            const Field a = random_cosine_field(rng, g, am, 0.5 * am);
            const Field b = random_cosine_field(rng, g, bm, 0.5 * bm);
            p = switching_problem(g, d1, d2, a, b, m);
        }
        const double lp = lam(p, c.opts.eig);
        const double ld = dense_rightmost_eigenvalue(assemble_dense(p), g.n * p.components());
        const double r = rel_diff(lp, ld);
        worst = std::max(worst, r);
        t.add_row({std::to_string(i), std::to_string(p.components()), format_number(lp),
                   format_number(ld), format_number(r)});
        c.rec.expect("case " + std::to_string(i) + " (K = " + std::to_string(p.components()) +
                         ") matches dense",
                     r <= 1e-7, "power " + g6(lp) + ", dense " + g6(ld) + ", rel " + g6(r));
    }
    c.csv("eigen_oracle.csv", t);
}

void group_scalar(Ctx& c) {
    const Grid& g = c.grid;
    const std::vector<double> shifts{-0.1, 0.0, 0.1};
    const std::vector<double> ds{0.1, 0.3, 1.0, 3.0};
    std::vector<std::vector<double>> tab(shifts.size(), std::vector<double>(ds.size()));
    CsvTable t({"c0", "d", "lambda"});
    for (std::size_t i = 0; i < shifts.size(); ++i) {
        const Field e = cosine(g, shifts[i], 1.0, 2.0);
        for (std::size_t j = 0; j < ds.size(); ++j) {
            tab[i][j] = lam(scalar_problem(g, ds[j], e), c.opts.eig);
            t.add_row({format_number(shifts[i]), format_number(ds[j]), format_number(tab[i][j])});
        }
    }
    c.csv("scalar_eigenvalue.csv", t);
    const double margin = 1e-9;
    bool mono_e = true;
    bool mono_d = true;
    for (std::size_t j = 0; j < ds.size(); ++j) {
        for (std::size_t i = 0; i + 1 < shifts.size(); ++i) {
            mono_e = mono_e && tab[i + 1][j] > tab[i][j] + margin;
        }
    }
    for (std::size_t i = 0; i < shifts.size(); ++i) {
        for (std::size_t j = 0; j + 1 < ds.size(); ++j) {
            mono_d = mono_d && tab[i][j] > tab[i][j + 1] + margin;
        }
    }
    c.rec.expect("increasing in the potential", mono_e, "all 12 pairs by margin 1e-9");
    c.rec.expect("strictly decreasing in d", mono_d, "d in {0.1, 0.3, 1, 3}");
    for (std::size_t i = 1; i < shifts.size(); ++i) {
        const double lo = *std::min_element(tab[i].begin(), tab[i].end());
        c.rec.expect("positive for every d when the mean is >= 0 (c0 = " + g6(shifts[i]) + ")",
                     lo > margin, "min lambda = " + g6(lo));
    }

    const Field e = cosine(g, -0.1, 1.0, 2.0);
    const auto roots = find_scaling_roots(scalar_problem(g, 1.0, e), c.opts.mu_lo, c.opts.mu_hi,
                                          c.opts.scan, c.opts.eig);
    c.rec.expect("unique critical scaling for c0 = -0.1", roots.size() == 1,
                 std::to_string(roots.size()) + " root(s)");
    if (roots.size() == 1) {
        const double ms = roots[0].root;
        const double below = lam(scalar_problem(g, 0.5 / ms, e), c.opts.eig);
        const double above = lam(scalar_problem(g, 2.0 / ms, e), c.opts.eig);
        c.rec.expect("sign(1 - d mu*) = sign(lambda)", below > margin && above < -margin,
                     "mu* = " + g6(ms) + ", lambda(0.5/mu*) = " + g6(below) +
                         ", lambda(2/mu*) = " + g6(above));
        CsvTable r({"name", "lo", "hi", "root", "residual"});
        r.add_row({roots[0].name, format_number(roots[0].lo), format_number(roots[0].hi),
                   format_number(ms), format_number(roots[0].residual)});
        c.csv("scalar_mu_star.csv", r);
    }
}

void group_positivity(Ctx& c) {
    const Grid& g = c.grid;
    struct Variant {
        std::string name;
        ModelParams p;
    };
    const ModelParams& base = c.cfg.params;
    std::vector<Variant> vs{
        {"reference", base},
        {"cos(2 pi x)", switching_params(base, CosineProfile{0.0, 1.0, 2.0}, 1.0, 1.0)},
        {"0.1 + cos(pi x)", switching_params(base, CosineProfile{0.1, 1.0, 1.0}, 1.0, 1.0)},
        {"-0.2 + cos(pi x), slow d1", switching_params(base, CosineProfile{-0.2, 1.0, 1.0}, 0.2, 1.0)},
        {"-0.3 + cos(pi x)", switching_params(base, CosineProfile{-0.3, 1.0, 1.0}, 1.0, 1.0)},
    };
    vs[3].p.d1 = std::min(0.01, vs[3].p.d2);
    CsvTable t({"variant", "lambda0", "lambda_slow", "lambda_fast", "sufficient"});
    for (const Variant& v : vs) {
        const CoefficientFields f = sample_coefficients_unchecked(v.p, g);
        const double l0 = lambda_of_mu(v.p, g, 1.0, c.opts.eig);
        const double l1 = lam(scalar_problem(g, v.p.d1, minus(f.m, f.alpha)), c.opts.eig);
        const double l2 = lam(scalar_problem(g, v.p.d2, minus(f.m, f.beta)), c.opts.eig);
        Field gap(g.n);
        for (std::size_t i = 0; i < g.n; ++i) {
            const double s = std::sqrt(f.alpha[i]) - std::sqrt(f.beta[i]);
            gap[i] = 0.5 * s * s;
        }
        const bool cond = l1 >= 0.0 || integrate(g, f.m) >= integrate(g, gap);
        t.add_row({v.name, format_number(l0), format_number(l1), format_number(l2),
                   cond ? "1" : "0"});
        if (cond) {
            c.rec.expect("positive under a sufficient condition: " + v.name, l0 > 1e-9,
                         "lambda0 = " + g6(l0));
        }
        c.rec.expect("dominates both single-rate eigenvalues: " + v.name,
                     l0 > std::max(l1, l2) + 1e-9,
                     "lambda0 = " + g6(l0) + ", slow " + g6(l1) + ", fast " + g6(l2));
    }
    c.csv("positivity_conditions.csv", t);
}

void group_mu_derivative(Ctx& c) {
    const Grid& g = c.grid;
    const ModelParams& base = c.cfg.params;
    CsvTable t({"case", "formula", "reference", "flux_deviation"});

    ModelParams p = switching_params(base, CosineProfile{-0.1, 1.0, 1.0}, 1.0, 0.5);
    p.alpha = CosineProfile{1.0, 0.5, 1.0};
    const LambdaPrimeReport r = lambda_prime_at_zero(p, g, c.opts.eig);
    const double h = 1e-4;
    const double fd =
        (lambda_of_mu(p, g, h, c.opts.eig) - lambda_of_mu(p, g, -h, c.opts.eig)) / (2.0 * h);
    c.rec.expect("closed form matches central difference", std::abs(r.value - fd) <= 1e-5,
                 "formula " + g6(r.value) + ", difference quotient " + g6(fd));
    c.rec.expect("d1 Phi1 + d2 Phi2 is constant", r.flux_deviation <= 1e-6,
                 "relative sup-deviation " + g6(r.flux_deviation));
    t.add_row({"variable alpha", format_number(r.value), format_number(fd),
               format_number(r.flux_deviation)});

    const ModelParams q = switching_params(base, CosineProfile{-0.1, 1.0, 1.0}, 2.0, 1.0);
    const LambdaPrimeReport rq = lambda_prime_at_zero(q, g, c.opts.eig);
    const double mean = integrate(g, sample_coefficient(q.m, g)) / g.length();
    c.rec.expect("proportional rates give the mean of m", std::abs(rq.value - mean) <= 1e-7,
                 "lambda'(0) = " + g6(rq.value) + ", mean = " + g6(mean));
    t.add_row({"alpha = 2 beta", format_number(rq.value), format_number(mean),
               format_number(rq.flux_deviation)});
    c.csv("mu_derivative.csv", t);

    const ModelParams s = switching_params(base, CosineProfile{-0.2, 1.0, 1.0}, 1.0, 1.0);
    const auto roots = find_mu_roots(s, g, c.opts.mu_lo, c.opts.mu_hi, c.opts.scan, c.opts.eig);
    c.rec.expect("unique mu0 when the integral of m is negative", roots.size() == 1,
                 std::to_string(roots.size()) + " root(s)");
    if (roots.size() == 1) {
        const double l1 = lambda_of_mu(s, g, 1.0, c.opts.eig);
        const double m0 = roots[0].root;
        const bool ok = (1.0 - m0 > 0.0 && l1 > 1e-9) || (1.0 - m0 < 0.0 && l1 < -1e-9);
        c.rec.expect("sign(1 - mu0) = sign(lambda0)", ok,
                     "mu0 = " + g6(m0) + ", lambda0 = " + g6(l1));
    }
}

void group_scaling(Ctx& c) {
    const Grid& g = c.grid;
    const Field alpha = constant(g, 0.05);
    const Field beta = constant(g, 1.0);
    const EigenProblem base = switching_problem(g, 1.0, 10.0, alpha, beta, cosine(g, -0.5, 5.0, 1.0));
    CsvTable t({"kind", "parameter", "lhs", "rhs"});
    for (double mu : {0.5, 2.0, 10.0}) {
        const double lhs = lam(scaled_problem(base, 1.0, mu), c.opts.eig);
        const double rhs = mu * lam(scaled_problem(base, 1.0 / mu, 1.0), c.opts.eig);
        t.add_row({"scaling", format_number(mu), format_number(lhs), format_number(rhs)});
        c.rec.expect("scaling identity at mu = " + g6(mu), rel_diff(lhs, rhs) <= 1e-8,
                     "lambda(1, mu M) = " + g6(lhs) + ", mu lambda(1/mu, M) = " + g6(rhs));
    }

    const Grid fine = build_grid(c.cfg.a, c.cfg.b, 801);
    const Field mf = cosine(fine, -0.5, 5.0, 1.0);
    const EigenProblem bf =
        switching_problem(fine, 1.0, 10.0, constant(fine, 0.05), constant(fine, 1.0), mf);
    std::vector<double> lams;
    for (double d : {0.1, 0.03, 0.01, 0.003}) {
        lams.push_back(lam(scaled_problem(bf, d, 1.0), c.opts.eig));
        t.add_row({"small_d", format_number(d), format_number(lams.back()),
                   format_number(max_value(mf))});
    }
    bool mono = true;
    for (std::size_t i = 0; i + 1 < lams.size(); ++i) {
        mono = mono && lams[i + 1] > lams[i];
    }
    const double gap = max_value(mf) - lams.back();
    const double range = max_value(mf) - min_value(mf);
    c.rec.expect("increases as d decreases", mono, "d in {0.1, 0.03, 0.01, 0.003}");
    c.rec.expect("gap to max m at d = 0.003 within 5% of the range",
                 gap >= 0.0 && gap <= 0.05 * range,
                 "gap = " + g6(gap) + ", range = " + g6(range));

    const double lo = lam(scaled_problem(base, 1.0, c.opts.mu_lo), c.opts.eig);
    const double hi = lam(scaled_problem(base, 1.0, c.opts.mu_hi), c.opts.eig);
    c.rec.expect("negative for small mu", lo < 0.0,
                 "lambda(1, " + g6(c.opts.mu_lo) + " M) = " + g6(lo));
    c.rec.expect("positive for large mu", hi > 0.0,
                 "lambda(1, " + g6(c.opts.mu_hi) + " M) = " + g6(hi));
    const auto roots = find_scaling_roots(base, c.opts.mu_lo, c.opts.mu_hi, c.opts.scan, c.opts.eig);
    c.rec.expect("critical scaling located", !roots.empty(),
                 std::to_string(roots.size()) + " root(s)" +
                     (roots.empty() ? "" : ", first " + g6(roots[0].root)));
    c.csv("scaling_family.csv", t);
}

void group_dichotomy(Ctx& c) {
    const Grid& g = c.dyn_grid;
    const ModelParams& base = c.cfg.params;
    struct Case {
        std::string name;
        ModelParams p;
        bool marginal = false;
    };
    std::vector<Case> cases{
        {"constant m", switching_params(base, ConstantProfile{0.5}, 0.5, 0.5)},
        {"reference", base},
        {"slow switching", switching_params(base, base.m, 0.01, 0.01)},
        {"-0.3 + 0.5 cos(pi x)", switching_params(base, CosineProfile{-0.3, 0.5, 1.0}, 1.0, 1.0)},
        {"-0.5 + 0.6 cos(2 pi x)", switching_params(base, CosineProfile{-0.5, 0.6, 2.0}, 1.0, 1.0)},
    };
    // Marginal case: rescale m of case 4 to its root of lambda(mu).
    {
        const auto roots = find_mu_roots(cases[3].p, g, c.opts.mu_lo, c.opts.mu_hi, c.opts.scan,
                                         c.opts.eig);
        if (roots.size() != 1) {
            throw NumericalError("marginal case: expected one mu0, found " +
                                 std::to_string(roots.size()));
        }
        const double m0 = roots[0].root;
        cases.push_back({"marginal (mu0 scaled)",
                         switching_params(base, CosineProfile{-0.3 * m0, 0.5 * m0, 1.0}, 1.0, 1.0),
                         true});
    }

    CsvTable t({"case", "lambda0", "floor", "final_mass", "identity_rel"});
    for (Case& cs : cases) {
        cs.p.b = 1.0;
        cs.p.c = 1.0;
        const EigenProblem prob = mu_problem(cs.p, g, 1.0);
        const EigenResult adj = adjoint_principal_eigen(prob, c.opts.eig);
        const double l0 = lam(prob, c.opts.eig);
        SimOptions o = c.opts.sim;
        o.stop_at_steady = false;
        if (cs.marginal) {
            o.t_max = 2e4;
            o.dt = 0.05;
            o.sample_interval = 10.0;
        }
        const State x0 = eigenfunction_state(principal_eigen(prob, c.opts.eig), 0.1);
        const SimulationResult sim = simulate(SystemKind::two_species_general, cs.p, g, x0, o, &adj);
        const double floor = persistence_floor(sim.log, 0.5);
        const double mass = sim.log.mass.back()[0] + sim.log.mass.back()[1];

        ImexStepper st(SystemKind::two_species_general, cs.p, g);
        const State x1 = st.step(x0, o.dt);
        const double L0 = lyapunov_value(g, x0, adj);
        const double L1 = lyapunov_value(g, x1, adj);
        const double pred = lyapunov_dissipation(g, x0, adj, 1.0, 1.0) + adj.lambda * L0;
        const double quot = (L1 - L0) / o.dt;
        const double ident = rel_diff(quot, pred);

        t.add_row({cs.name, format_number(l0), format_number(floor), format_number(mass),
                   format_number(ident)});
        const std::string tag = cs.name + " (lambda0 = " + g6(l0) + ")";
        c.rec.expect("persists iff lambda0 > 0: " + cs.name, (floor > 1e-4) == (l0 > 1e-6),
                     tag + ", floor = " + g6(floor));
        c.rec.expect("dies out iff lambda0 < 0: " + cs.name, (mass < 1e-6) == (l0 < -1e-6),
                     tag + ", final mass = " + g6(mass) + " at t = " + g6(sim.log.times.back()));
        c.rec.expect("one-step Lyapunov identity: " + cs.name, ident <= 5.0 * o.dt,
                     "relative mismatch " + g6(ident) + ", dt = " + g6(o.dt));
        if (cs.marginal) {
            const auto& L = sim.log.lyapunov;
            std::size_t bad = 0;
            for (std::size_t i = 0; i + 1 < L.size(); ++i) {
                bad += L[i + 1] < L[i] ? 0 : 1;
            }
            c.rec.expect("Lyapunov series strictly decreasing at lambda0 = 0", bad == 0,
                         std::to_string(L.size()) + " samples, " + std::to_string(bad) +
                             " non-decreasing steps, lambda0 = " + g6(l0));
            CsvTable lt({"t", "lyapunov", "dissipation"});
            for (std::size_t i = 0; i < L.size(); ++i) {
                lt.add_row({format_number(sim.log.times[i]), format_number(L[i]),
                            format_number(sim.log.dissipation[i])});
            }
            c.csv("lyapunov_marginal.csv", lt);
            c.svg("lyapunov_marginal.svg", {"Lyapunov functional at lambda0 = 0", "t", "L", true},
                  {{"L", sim.log.times, L}});
        }
    }
    c.csv("dichotomy.csv", t);
}

void group_uniqueness(Ctx& c) {
    const Grid& g = c.dyn_grid;
    ModelParams p = switching_params(c.cfg.params, CosineProfile{1.0, 0.2, 1.0}, 0.05, 0.05);
    p.b = 0.5;
    p.c = 0.5;
    const RegimeReport reg = classify_regime(p, g);
    c.rec.expect("scenario is in the competitive regime", reg.in_S1 && p.b * p.c <= 1.0,
                 reg.s1_skipped ? *reg.s1_skipped : "bc = " + g6(p.b * p.c));
    std::vector<SteadyResult> limits;
    for (std::uint64_t k = 0; k < 3; ++k) {
        const State x0 = random_state(g, 2, 0.05, 1.5, c.cfg.seed + k);
        limits.push_back(integrate_to_steady(SystemKind::two_species_general, p, g, x0, c.opts.sim));
        c.rec.expect("random start " + std::to_string(k) + " converges", limits.back().converged,
                     "residual " + g6(limits.back().residual));
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < limits.size(); ++i) {
        for (std::size_t j = i + 1; j < limits.size(); ++j) {
            for (std::size_t k = 0; k < 2; ++k) {
                worst = std::max(worst, sup_norm(minus(limits[i].state.components[k],
                                                       limits[j].state.components[k])));
            }
        }
    }
    c.rec.expect("limits agree pairwise", worst <= 1e-6, "max sup difference " + g6(worst));
    const StabilityReport s = linearized_stability(SystemKind::two_species_general, p, g,
                                                   limits[0], EquilibriumKind::positive, c.opts.eig);
    c.rec.expect("linearisation is stable", s.principal_eigenvalue < -1e-9,
                 "rightmost eigenvalue " + g6(s.principal_eigenvalue));
    std::vector<Field> comps = limits[0].state.components;
    CsvTable t({"x", "U", "V"});
    for (std::size_t i = 0; i < g.n; ++i) {
        t.add_row({format_number(g.nodes[i]), format_number(comps[0][i]), format_number(comps[1][i])});
    }
    c.csv("competitive_steady.csv", t);
}

void group_diffusion_thresholds(Ctx& c) {
    const Grid& g = c.grid;
    const ModelParams& p = c.cfg.params;
    require_competition_hypothesis(p, g);
    const auto [lo, hi] = threshold_bracket(ThresholdName::d_c, p);
    const SteadyResult uv = switching_steady_state(p, g, c.opts.sim);
    const Field& u = uv.state.components[0];
    const Field& v = uv.state.components[1];
    Field pot = minus(minus(sample_coefficient(p.m, g), u), v);
    c.rec.expect("m - u* - v* is non-constant", max_value(pot) - min_value(pot) > 1e-8,
                 "range " + g6(max_value(pot) - min_value(pot)));
    const double f_lo = invasion_rate_of_w(p, g, u, v, lo, c.opts.eig);
    const double f_hi = invasion_rate_of_w(p, g, u, v, hi, c.opts.eig);
    c.rec.expect("w invades at d3 = d1", f_lo > 0.0, "lambda = " + g6(f_lo));
    c.rec.expect("w cannot invade at d3 = (d1 + d2)/2", f_hi < 0.0, "lambda = " + g6(f_hi));

    CsvTable t({"name", "lo", "hi", "root", "residual"});
    const ThresholdResult dc = find_threshold(ThresholdName::d_c, p, g, c.opts);
    t.add_row({dc.name, format_number(dc.lo), format_number(dc.hi), format_number(dc.root),
               format_number(dc.residual)});
    c.rec.expect("d_c strictly inside the bracket", dc.root > lo && dc.root < hi,
                 "d_c = " + g6(dc.root) + " in (" + g6(lo) + ", " + g6(hi) + ")");
    c.rec.expect("d_c residual <= 1e-8", dc.residual <= 1e-8, "residual " + g6(dc.residual));

    auto lambda2_at = [&](double d3) {
        ModelParams q = p;
        q.d3 = d3;
        const SteadyResult w = logistic_steady_state(q, g, c.opts.sim);
        return invasion_rate_of_uv(q, g, w.state.components[0], c.opts.eig);
    };
    const double l2_lo = lambda2_at(lo);
    const double l2_hi = lambda2_at(hi);
    c.rec.expect("(u, v) cannot invade at d3 = d1", l2_lo < 0.0, "lambda2 = " + g6(l2_lo));
    c.rec.expect("(u, v) invades at d3 = (d1 + d2)/2", l2_hi > 0.0, "lambda2 = " + g6(l2_hi));
    AnalysisOptions o = c.opts;
    o.scan.points = 16;
    o.scan.log_spaced = false;
    const auto d0 = find_all_thresholds(ThresholdName::d_0, p, g, o);
    for (const ThresholdResult& r : d0) {
        t.add_row({r.name, format_number(r.lo), format_number(r.hi), format_number(r.root),
                   format_number(r.residual)});
    }
    c.rec.expect("lambda2 sign change located", !d0.empty(),
                 std::to_string(d0.size()) + " root(s)" +
                     (d0.empty() ? "" : ", first d_0 = " + g6(d0[0].root)));
    c.csv("diffusion_thresholds.csv", t);
}

void add_sweep_csv(Ctx& c, const std::string& file, const SweepReport& s) {
    CsvTable t({"value", "lambda_uv0", "lambda_00w", "outcome", "floor_u", "floor_v", "floor_w"});
    for (const SweepPoint& pt : s.points) {
        std::vector<std::string> row{format_number(pt.value), format_number(pt.lambda_uv0),
                                     format_number(pt.lambda_00w), std::string(to_string(pt.outcome))};
        for (std::size_t k = 0; k < 3; ++k) {
            row.push_back(k < pt.floors.size() ? format_number(pt.floors[k]) : "nan");
        }
        t.add_row(std::move(row));
    }
    c.csv(file, t);
}

void expect_outcomes(Ctx& c, const SweepReport& s, const std::vector<Outcome>& want) {
    const std::string par(to_string(s.parameter));
    for (std::size_t i = 0; i < s.points.size(); ++i) {
        const SweepPoint& pt = s.points[i];
        const std::string at = par + " = " + g6(pt.value);
        if (pt.error) {
            c.rec.fail("outcome at " + at, *pt.error);
            continue;
        }
        c.rec.expect("outcome at " + at + " is " + std::string(to_string(want[i])),
                     pt.outcome == want[i], "observed " + std::string(to_string(pt.outcome)));
        bool consistent = false;
        if (pt.outcome == Outcome::w_wins) {
            consistent = pt.lambda_uv0 > 0.0 && pt.lambda_00w < 0.0;
        } else if (pt.outcome == Outcome::uv_wins) {
            consistent = pt.lambda_uv0 < 0.0 && pt.lambda_00w > 0.0;
        }
        c.rec.expect("eigenvalue signs match outcome at " + at, consistent,
                     "lambda(u*, v*, 0) = " + g6(pt.lambda_uv0) + ", lambda(0, 0, w*) = " +
                         g6(pt.lambda_00w));
    }
}

void group_exclusion_d3(Ctx& c) {
    const Grid& g = c.dyn_grid;
    require_competition_hypothesis(c.cfg.params, g);
    const std::vector<double> values{0.05, 0.08, 0.6, 1.5};
    const SweepReport s = sweep_outcomes(c.cfg.params, g, SweepParameter::d3, values, c.opts);
    add_sweep_csv(c, "sweep_d3.csv", s);
    expect_outcomes(c, s, {Outcome::w_wins, Outcome::w_wins, Outcome::uv_wins, Outcome::uv_wins});
    const SweepPoint& first = s.points.front();
    const SweepPoint& last = s.points.back();
    if (first.final_max.size() == 3) {
        const double loser = std::max(first.final_max[0], first.final_max[1]);
        c.rec.expect("no coexistence at d3 = " + g6(first.value), loser < 1e-6,
                     "sup of u, v = " + g6(loser));
    }
    if (last.final_max.size() == 3) {
        c.rec.expect("no coexistence at d3 = " + g6(last.value), last.final_max[2] < 1e-6,
                     "sup of w = " + g6(last.final_max[2]));
    }
    Series a{"lambda(u*, v*, 0)", {}, {}};
    Series b{"lambda(0, 0, w*)", {}, {}};
    for (const SweepPoint& pt : s.points) {
        a.x.push_back(pt.value);
        a.y.push_back(pt.lambda_uv0);
        b.x.push_back(pt.value);
        b.y.push_back(pt.lambda_00w);
    }
    c.svg("sweep_d3.svg", {"Invasion eigenvalues", "d3", "lambda", false}, {a, b});
}

void require_middle_rate(const ModelParams& p) {
    if (!(p.d1 < p.d3 && p.d3 < p.d2)) {
        throw HypothesisError("switching-rate thresholds need d1 < d3 < d2");
    }
}

std::size_t sign_changes(const std::vector<double>& f) {
    std::size_t n = 0;
    for (std::size_t i = 0; i + 1 < f.size(); ++i) {
        n += (f[i] < 0.0) != (f[i + 1] < 0.0) ? 1 : 0;
    }
    return n;
}

void group_switching_thresholds(Ctx& c) {
    const Grid& g = c.grid;
    const ModelParams& p = c.cfg.params;
    require_middle_rate(p);
    require_competition_hypothesis(p, g);
    const double a0 = constant_value(p.alpha, "alpha");
    const double b0 = constant_value(p.beta, "beta");
    const double m_hi = max_value(sample_coefficient(p.m, g));
    const SteadyResult w = logistic_steady_state(p, g, c.opts.sim);
    const Field& ws = w.state.components[0];
    auto lambda2 = [&](double alpha, double beta) {
        ModelParams q = p;
        q.alpha = ConstantProfile{alpha};
        q.beta = ConstantProfile{beta};
        return invasion_rate_of_uv(q, g, ws, c.opts.eig);
    };
    CsvTable t({"name", "lo", "hi", "root", "residual"});
    CsvTable lat({"parameter", "value", "lambda2"});
    const double h = 1e-3;

    if (m_hi <= a0) {
        const auto [lo, hi] = threshold_bracket(ThresholdName::beta_c, p);
        const ThresholdResult bc = find_threshold(ThresholdName::beta_c, p, g, c.opts);
        t.add_row({bc.name, format_number(bc.lo), format_number(bc.hi), format_number(bc.root),
                   format_number(bc.residual)});
        c.rec.expect("beta_c strictly inside (0, " + g6(hi) + ")", bc.root > lo && bc.root < hi,
                     "beta_c = " + g6(bc.root));
        std::vector<double> f;
        for (int j = 1; j <= 64; ++j) {
            const double beta = hi * j / 64.0;
            f.push_back(lambda2(a0, beta));
            lat.add_row({"beta", format_number(beta), format_number(f.back())});
        }
        c.rec.expect("exactly one sign change in beta on 64 points", sign_changes(f) == 1,
                     std::to_string(sign_changes(f)) + " sign change(s)");
        const double fd = (lambda2(a0, b0 + h) - lambda2(a0, b0 - h)) / (2.0 * h);
        const double an = lambda2_sensitivity(p, g, SwitchingRate::beta, ws, c.opts.eig).derivative;
        c.rec.expect("d lambda2 / d beta formula matches finite difference",
                     std::abs(an - fd) <= 1e-4, "formula " + g6(an) + ", difference " + g6(fd));
        ModelParams q = p;
        q.beta = ConstantProfile{bc.root};
        const double at = lambda2_sensitivity(q, g, SwitchingRate::beta, ws, c.opts.eig).derivative;
        c.rec.expect("lambda2 increasing in beta at beta_c", at > 0.0, "derivative " + g6(at));
    } else {
        c.rec.skip("beta_c checks", "max m = " + g6(m_hi) + " exceeds alpha = " + g6(a0));
    }

    if (m_hi <= b0) {
        const auto [lo, hi_inf] = threshold_bracket(ThresholdName::alpha_c, p);
        (void)hi_inf;
        const ThresholdResult ac = find_threshold(ThresholdName::alpha_c, p, g, c.opts);
        t.add_row({ac.name, format_number(lo), "inf", format_number(ac.root),
                   format_number(ac.residual)});
        c.rec.expect("alpha_c strictly above " + g6(lo), ac.root > lo,
                     "alpha_c = " + g6(ac.root));
        std::vector<double> f;
        const double top = 4.0 * ac.root;
        for (int j = 1; j <= 64; ++j) {
            const double alpha = lo + (top - lo) * j / 64.0;
            f.push_back(lambda2(alpha, b0));
            lat.add_row({"alpha", format_number(alpha), format_number(f.back())});
        }
        c.rec.expect("exactly one sign change in alpha on 64 points", sign_changes(f) == 1,
                     std::to_string(sign_changes(f)) + " sign change(s) on (" + g6(lo) + ", " +
                         g6(top) + "]");
        const double fd = (lambda2(a0 + h, b0) - lambda2(a0 - h, b0)) / (2.0 * h);
        const double an = lambda2_sensitivity(p, g, SwitchingRate::alpha, ws, c.opts.eig).derivative;
        c.rec.expect("d lambda2 / d alpha formula matches finite difference",
                     std::abs(an - fd) <= 1e-4, "formula " + g6(an) + ", difference " + g6(fd));
        ModelParams q = p;
        q.alpha = ConstantProfile{ac.root};
        const double at = lambda2_sensitivity(q, g, SwitchingRate::alpha, ws, c.opts.eig).derivative;
        c.rec.expect("lambda2 decreasing in alpha at alpha_c", at < 0.0, "derivative " + g6(at));
    } else {
        c.rec.skip("alpha_c checks", "max m = " + g6(m_hi) + " exceeds beta = " + g6(b0));
    }
    c.csv("switching_thresholds.csv", t);
    c.csv("switching_lattice.csv", lat);
}

void group_switching_dynamics(Ctx& c) {
    const Grid& g = c.dyn_grid;
    const ModelParams& p = c.cfg.params;
    require_middle_rate(p);
    require_competition_hypothesis(p, g);
    const double m_hi = max_value(sample_coefficient(p.m, g));
    // Invasion rates here are O(1e-3), so the loser needs a longer horizon.
    AnalysisOptions o = c.opts;
    o.sim.t_max = std::max(o.sim.t_max, 1e4);
    o.sim.dt = std::max(o.sim.dt, 0.02);
    if (m_hi <= constant_value(p.alpha, "alpha")) {
        const double bc = find_threshold(ThresholdName::beta_c, p, g, c.opts).root;
        const SweepReport s = sweep_outcomes(p, g, SweepParameter::beta, {0.05 * bc, 4.0 * bc}, o);
        add_sweep_csv(c, "sweep_beta.csv", s);
        expect_outcomes(c, s, {Outcome::w_wins, Outcome::uv_wins});
    } else {
        c.rec.skip("beta outcomes", "max m exceeds alpha");
    }
    if (m_hi <= constant_value(p.beta, "beta")) {
        const double ac = find_threshold(ThresholdName::alpha_c, p, g, c.opts).root;
        const SweepReport s =
            sweep_outcomes(p, g, SweepParameter::alpha, {0.25 * ac, 20.0 * ac}, o);
        add_sweep_csv(c, "sweep_alpha.csv", s);
        expect_outcomes(c, s, {Outcome::uv_wins, Outcome::w_wins});
    } else {
        c.rec.skip("alpha outcomes", "max m exceeds beta");
    }
}

void group_determinism(Ctx& c) {
    const Grid& g = c.dyn_grid;
    ModelParams p = switching_params(c.cfg.params, CosineProfile{1.0, 0.2, 1.0}, 0.05, 0.05);
    auto once = [&]() {
        const State x0 = random_state(g, 2, 0.05, 1.5, c.cfg.seed);
        SimOptions o = c.opts.sim;
        o.t_max = std::min(o.t_max, 50.0);
        const SimulationResult r = simulate(SystemKind::submodel, p, g, x0, o);
        CsvTable t({"t", "comp", "min", "max", "mass"});
        for (std::size_t j = 0; j < r.log.times.size(); ++j) {
            for (std::size_t k = 0; k < 2; ++k) {
                t.add_row({format_number(r.log.times[j]), k == 0 ? "u" : "v",
                           format_number(r.log.min[j][k]), format_number(r.log.max[j][k]),
                           format_number(r.log.mass[j][k])});
            }
        }
        return t;
    };
    const CsvTable first = once();
    const CsvTable second = once();
    c.rec.expect("seeded run reproduces its CSV byte for byte", first.str() == second.str(),
                 std::to_string(first.rows()) + " rows");
    c.csv("determinism_trajectory.csv", first);
}

using GroupFn = void (*)(Ctx&);

struct GroupEntry {
    CheckGroup group;
    GroupFn run;
};

const std::vector<GroupEntry>& registry() {
    static const std::vector<GroupEntry> r{
        {{"discretization", "Neumann Laplacian: second order and symmetry"}, group_discretization},
        {{"eigen_oracle", "Principal eigenvalue against a dense solver"}, group_eigen_oracle},
        {{"scalar_eigenvalue", "Scalar eigenvalue: monotonicity, positivity, critical scaling"},
         group_scalar},
        {{"positivity_conditions", "Switching pair: positivity conditions and domination"},
         group_positivity},
        {{"mu_derivative", "Switching pair: derivative in the growth scaling"},
         group_mu_derivative},
        {{"scaling_family", "Joint scaling identity and small-diffusion limit"}, group_scaling},
        {{"extinction_persistence", "Extinction or persistence of the switching population"},
         group_dichotomy},
        {{"competitive_uniqueness", "Uniqueness of the coexistence state when competitive"},
         group_uniqueness},
        {{"diffusion_thresholds", "Invasion thresholds in the competitor's diffusion rate"},
         group_diffusion_thresholds},
        {{"exclusion_d3", "Competitive exclusion across the competitor's diffusion rate"},
         group_exclusion_d3},
        {{"switching_thresholds", "Invasion thresholds in the switching rates"},
         group_switching_thresholds},
        {{"switching_dynamics", "Competitive outcomes across the switching rates"},
         group_switching_dynamics},
        {{"determinism", "Reproducible output"}, group_determinism},
    };
    return r;
}

}  // namespace

const std::vector<CheckGroup>& verify_groups() {
    static const std::vector<CheckGroup> groups = [] {
        std::vector<CheckGroup> out;
        for (const GroupEntry& e : registry()) {
            out.push_back(e.group);
        }
        return out;
    }();
    return groups;
}

RunArtifacts verify_suite(const ScenarioConfig& cfg) {
    RunArtifacts art;
    art.report = cfg.output / "report.txt";
    std::ostringstream rep;
    rep << "verification report\n";
    try {
        for (const std::string& id : cfg.task.checks) {
            const auto& r = registry();
            if (std::none_of(r.begin(), r.end(), [&](const GroupEntry& e) { return e.group.id == id; })) {
                throw ConfigError("task.checks: unknown check group '" + id + "'");
            }
        }
        fs::create_directories(cfg.output);
        write_text(cfg.output / "config.json", dump_config(cfg));
        const Grid grid = cfg.grid();
        const Grid dyn = build_grid(cfg.a, cfg.b, std::min<std::size_t>(cfg.n, 201));
        rep << "grid: [" << format_number(cfg.a) << ", " << format_number(cfg.b)
            << "], n = " << cfg.n << " (time integration n = " << dyn.n << ")\n";
        rep << "seed: " << cfg.seed << "\n";

        Recorder rec(art.checks, cfg.n);
        Ctx ctx{cfg, grid, dyn, cfg.analysis_options(), rec, art};
        for (const GroupEntry& e : registry()) {
            const auto& want = cfg.task.checks;
            if (!want.empty() && std::find(want.begin(), want.end(), e.group.id) == want.end()) {
                continue;
            }
            rec.set_group(e.group.id);
            try {
                e.run(ctx);
            } catch (const HypothesisError& ex) {
                rec.skip("group", std::string("hypothesis not met: ") + ex.what());
            } catch (const std::exception& ex) {
                rec.fail("group", std::string("aborted: ") + ex.what());
            }
        }

        CsvTable t({"group", "check", "status", "detail"});
        std::size_t pass = 0;
        std::size_t fail = 0;
        std::size_t skip = 0;
        for (const CheckGroup& gr : verify_groups()) {
            bool header = false;
            for (const CheckResult& r : art.checks) {
                if (r.group != gr.id) {
                    continue;
                }
                if (!header) {
                    rep << "\n== " << gr.title << " [" << gr.id << "] ==\n";
                    header = true;
                }
                rep << to_string(r.status) << "  " << r.name << ": " << r.detail << "\n";
                t.add_row({r.group, r.name, std::string(to_string(r.status)), r.detail});
                pass += r.status == CheckStatus::pass;
                fail += r.status == CheckStatus::fail;
                skip += r.status == CheckStatus::skip;
            }
        }
        const fs::path checks = cfg.output / "checks.csv";
        t.write(checks);
        art.csv.insert(art.csv.begin(), checks);
        rep << "\nsummary: " << pass << " passed, " << fail << " failed, " << skip
            << " skipped\n";
        art.exit_status = fail == 0 ? exit_ok : exit_check_failed;
        if (fail != 0) {
            art.message = std::to_string(fail) + " check(s) failed";
        }
        rep << "status: " << (fail == 0 ? "ok" : "failed") << "\n";
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
