#include "dispersal/spectral.hpp"

#include "dispersal/banded.hpp"
#include "dispersal/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace dispersal {

namespace {

std::size_t flat(std::size_t i, std::size_t k, std::size_t K) { return i * K + k; }

// sI - A in interleaved band storage.
BandMatrix assemble_shifted(const EigenProblem& p, const NeumannLaplacian& L, double s) {
    const std::size_t K = p.components();
    const std::size_t n = p.grid.n;
    BandMatrix B(n * K, K, K);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < K; ++k) {
            const std::size_t r = flat(i, k, K);
            const double d = p.diffusions[k];
            for (std::size_t l = 0; l < K; ++l) {
                B(r, flat(i, l, K)) = -p.entry(k, l)[i];
            }
            B(r, r) += s - d * L.diag[i];
            if (i > 0) {
                B(r, flat(i - 1, k, K)) = -d * L.lower[i];
            }
            if (i + 1 < n) {
                B(r, flat(i + 1, k, K)) = -d * L.upper[i];
            }
        }
    }
    return B;
}

std::vector<Field> split(const std::vector<double>& x, std::size_t K, std::size_t n) {
    std::vector<Field> out(K, Field(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < K; ++k) {
            out[k][i] = x[flat(i, k, K)];
        }
    }
    return out;
}

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

}  // namespace

EigenProblem scalar_problem(const Grid& grid, double d, Field e) {
    EigenProblem p;
    p.grid = grid;
    p.diffusions = {d};
    p.coupling = {std::move(e)};
    return p;
}

EigenProblem switching_problem(const Grid& grid, double d1, double d2, const Field& alpha,
                               const Field& beta, const Field& potential) {
    const std::size_t n = grid.n;
    if (alpha.size() != n || beta.size() != n || potential.size() != n) {
        throw ConfigError("switching problem: coefficient size does not match grid");
    }
    EigenProblem p;
    p.grid = grid;
    p.diffusions = {d1, d2};
    p.coupling.assign(4, Field(n));
    for (std::size_t i = 0; i < n; ++i) {
        p.coupling[0][i] = potential[i] - alpha[i];
        p.coupling[1][i] = beta[i];
        p.coupling[2][i] = alpha[i];
        p.coupling[3][i] = potential[i] - beta[i];
    }
    return p;
}

EigenProblem scaled_problem(const EigenProblem& base, double d_scale, double coupling_scale) {
    EigenProblem p = base;
    for (double& d : p.diffusions) {
        d *= d_scale;
    }
    for (Field& f : p.coupling) {
        for (double& v : f) {
            v *= coupling_scale;
        }
    }
    return p;
}

EigenProblem adjoint_problem(const EigenProblem& problem) {
    EigenProblem p = problem;
    const std::size_t K = problem.components();
    for (std::size_t k = 0; k < K; ++k) {
        for (std::size_t l = 0; l < K; ++l) {
            p.coupling[k * K + l] = problem.entry(l, k);
        }
    }
    return p;
}

void validate_problem(const EigenProblem& p) {
    const std::size_t K = p.components();
    if (K == 0) {
        throw ConfigError("eigenproblem: no components");
    }
    if (p.coupling.size() != K * K) {
        throw ConfigError("eigenproblem: coupling must be K x K");
    }
    for (double d : p.diffusions) {
        if (!(d > 0.0) || !std::isfinite(d)) {
            throw ConfigError("eigenproblem: diffusion rates must be positive");
        }
    }
    for (const Field& f : p.coupling) {
        if (f.size() != p.grid.n) {
            throw ConfigError("eigenproblem: coupling field size does not match grid");
        }
        for (double v : f) {
            if (!std::isfinite(v)) {
                throw ConfigError("eigenproblem: non-finite coupling entry");
            }
        }
    }
    for (std::size_t k = 0; k < K; ++k) {
        for (std::size_t l = 0; l < K; ++l) {
            if (k != l && min_value(p.entry(k, l)) < 0.0) {
                std::ostringstream os;
                os << "eigenproblem: coupling (" << k << ", " << l
                   << ") is negative somewhere; the system is not cooperative";
                throw ConfigError(os.str());
            }
        }
    }
    if (K == 2) {
        bool linked = false;
        for (std::size_t i = 0; i < p.grid.n && !linked; ++i) {
            linked = p.entry(0, 1)[i] > 0.0 && p.entry(1, 0)[i] > 0.0;
        }
        if (!linked) {
            throw ConfigError("eigenproblem: coupling is reducible (no node with both "
                              "off-diagonal entries positive)");
        }
    }
}

std::vector<Field> apply_operator(const EigenProblem& p, const std::vector<Field>& x) {
    const std::size_t K = p.components();
    if (x.size() != K) {
        throw ConfigError("apply_operator: component count mismatch");
    }
    const NeumannLaplacian L = assemble_neumann_laplacian(p.grid);
    std::vector<Field> out(K);
    for (std::size_t k = 0; k < K; ++k) {
        out[k] = L.apply(x[k]);
        for (std::size_t i = 0; i < p.grid.n; ++i) {
            out[k][i] *= p.diffusions[k];
            for (std::size_t l = 0; l < K; ++l) {
                out[k][i] += p.entry(k, l)[i] * x[l][i];
            }
        }
    }
    return out;
}

EigenResult principal_eigen(const EigenProblem& problem, const EigenOptions& opts) {
    validate_problem(problem);
    const std::size_t K = problem.components();
    const std::size_t n = problem.grid.n;
    const std::size_t N = n * K;
    const NeumannLaplacian L = assemble_neumann_laplacian(problem.grid);

    // Laplacian rows sum to zero, so the largest coupling row sum bounds λ.
    double row_max = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < K; ++k) {
            double s = 0.0;
            for (std::size_t l = 0; l < K; ++l) {
                s += problem.entry(k, l)[i];
            }
            row_max = std::max(row_max, s);
        }
    }

    std::vector<double> x(N, 1.0);
    std::vector<double> y(N);
    double shift = row_max + 1.0;
    double lower = -std::numeric_limits<double>::infinity();
    double upper = row_max;
    double backoff = 1.0;

    for (std::size_t it = 1; it <= opts.max_iterations; ++it) {
        bool ok = true;
        try {
            const BandLU lu(assemble_shifted(problem, L, shift));
            y = x;
            lu.solve_in_place(y);
        } catch (const NumericalError&) {
            ok = false;
        }
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        if (ok) {
            for (std::size_t r = 0; r < N; ++r) {
                if (!(y[r] > 0.0) || !std::isfinite(y[r])) {
                    ok = false;
                    break;
                }
                const double q = shift - x[r] / y[r];
                lo = std::min(lo, q);
                hi = std::max(hi, q);
            }
        }
        if (!ok) {
            // Shift too close to λ for the factorisation; move it away.
            backoff *= 10.0;
            shift = upper + backoff * (1.0 + std::abs(upper)) * 1e-9 + backoff * 1e-9;
            if (!(backoff < 1e12)) {
                throw NumericalError("principal eigen: lost positivity of the resolvent iterate");
            }
            continue;
        }
        lower = std::max(lower, lo);
        upper = std::min(upper, hi);
        if (lower > upper) {
            // Rounding inverted the bracket; keep the newest bounds.
            lower = lo;
            upper = hi;
        }
        const double ymax = *std::max_element(y.begin(), y.end());
        for (std::size_t r = 0; r < N; ++r) {
            x[r] = y[r] / ymax;
        }
        const double lambda = 0.5 * (lower + upper);
        const double gap = upper - lower;
        if (gap <= opts.tol * (1.0 + std::abs(lambda))) {
            EigenResult res;
            res.lambda = lambda;
            res.lower_bound = lower;
            res.upper_bound = upper;
            res.iterations = it;
            res.eigenfunctions = split(x, K, n);
            const std::vector<Field> ax = apply_operator(problem, res.eigenfunctions);
            double r = 0.0;
            for (std::size_t k = 0; k < K; ++k) {
                for (std::size_t i = 0; i < n; ++i) {
                    r = std::max(r, std::abs(ax[k][i] - lambda * res.eigenfunctions[k][i]));
                }
            }
            res.residual = r;
            return res;
        }
        shift = upper + std::max(gap, backoff * 1e-9 * (1.0 + std::abs(upper)));
    }
    std::ostringstream os;
    os << "principal eigen: bracket [" << lower << ", " << upper << "] not closed after "
       << opts.max_iterations << " iterations";
    throw NumericalError(os.str());
}

EigenResult adjoint_principal_eigen(const EigenProblem& problem, const EigenOptions& opts) {
    return principal_eigen(adjoint_problem(problem), opts);
}

EigenProblem mu_problem(const ModelParams& params, const Grid& grid, double mu) {
    if (!std::isfinite(mu)) {
        throw ConfigError("mu must be finite");
    }
    const CoefficientFields f = sample_coefficients_unchecked(params, grid);
    Field pot(f.m);
    for (double& v : pot) {
        v *= mu;
    }
    return switching_problem(grid, params.d1, params.d2, f.alpha, f.beta, pot);
}

double lambda_of_mu(const ModelParams& params, const Grid& grid, double mu,
                    const EigenOptions& opts) {
    return principal_eigen(mu_problem(params, grid, mu), opts).lambda;
}

LambdaPrimeReport lambda_prime_at_zero(const ModelParams& params, const Grid& grid,
                                       const EigenOptions& opts) {
    const CoefficientFields f = sample_coefficients_unchecked(params, grid);
    const EigenResult e = principal_eigen(mu_problem(params, grid, 0.0), opts);
    const Field& p1 = e.eigenfunctions[0];
    const Field& p2 = e.eigenfunctions[1];
    const std::size_t n = grid.n;

    LambdaPrimeReport r;
    r.phi = e.eigenfunctions;
    r.lambda_at_zero = e.lambda;

    Field sum(n);
    Field msum(n);
    Field flux(n);
    Field cw(n);
    for (std::size_t i = 0; i < n; ++i) {
        sum[i] = p1[i] + p2[i];
        msum[i] = f.m[i] * sum[i];
        flux[i] = params.d1 * p1[i] + params.d2 * p2[i];
        cw[i] = (params.d2 * f.alpha[i] + params.d1 * f.beta[i]) * p1[i];
    }
    r.value = integrate(grid, msum) / integrate(grid, sum);
    r.flux_constant = integrate(grid, flux) / grid.length();
    r.flux_deviation = (max_value(flux) - min_value(flux)) / sup_norm(flux);
    r.flux_formula = integrate(grid, cw) / integrate(grid, f.beta);

    if (r.flux_deviation > 1e-6) {
        std::ostringstream os;
        os << "d1*Phi1 + d2*Phi2 deviates from a constant by " << r.flux_deviation
           << " (relative); refine the grid";
        throw NumericalError(os.str());
    }
    const double rel = std::abs(r.flux_formula - r.flux_constant) / std::abs(r.flux_constant);
    if (!(rel <= 1e-6)) {
        std::ostringstream os;
        os << "flux constant " << r.flux_constant << " disagrees with its integral formula "
           << r.flux_formula;
        throw NumericalError(os.str());
    }
    return r;
}

ThresholdResult bisect_root(const std::string& name, const std::function<double(double)>& curve,
                            double lo, double hi, double f_lo, double f_hi,
                            const RootScanOptions& opts) {
    if (sign_of(f_lo) * sign_of(f_hi) >= 0) {
        std::ostringstream os;
        os << name << ": no sign change on [" << lo << ", " << hi << "] (values " << f_lo << ", "
           << f_hi << ")";
        throw HypothesisError(os.str());
    }
    ThresholdResult r;
    r.name = name;
    r.lo = lo;
    r.hi = hi;
    r.sign_left = sign_of(f_lo);
    r.sign_right = sign_of(f_hi);
    double a = lo;
    double b = hi;
    double fa = f_lo;
    double best_x = std::abs(f_lo) < std::abs(f_hi) ? lo : hi;
    double best_f = std::min(std::abs(f_lo), std::abs(f_hi));
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (a + b);
        const double fm = curve(mid);
        if (std::abs(fm) < best_f || (mid > lo && mid < hi && (best_x == lo || best_x == hi))) {
            best_x = mid;
            best_f = std::abs(fm);
        }
        if (std::abs(fm) <= opts.value_tol) {
            break;
        }
        if (sign_of(fm) == sign_of(fa)) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
        if (b - a <= opts.x_rel_tol * (1.0 + std::abs(mid))) {
            break;
        }
    }
    r.root = best_x;
    r.residual = best_f;
    return r;
}

std::vector<ThresholdResult> find_roots(const std::string& name,
                                        const std::function<double(double)>& curve, double lo,
                                        double hi, const RootScanOptions& opts) {
    if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
        throw ConfigError(name + ": invalid bracket");
    }
    if (opts.points < 2) {
        throw ConfigError(name + ": scan needs at least 2 points");
    }
    const bool logs = opts.log_spaced && lo > 0.0;
    std::vector<double> xs(opts.points);
    for (std::size_t j = 0; j < opts.points; ++j) {
        const double t = static_cast<double>(j) / static_cast<double>(opts.points - 1);
        xs[j] = logs ? lo * std::pow(hi / lo, t) : lo + t * (hi - lo);
    }
    xs.front() = lo;
    xs.back() = hi;
    std::vector<double> fs(xs.size());
    for (std::size_t j = 0; j < xs.size(); ++j) {
        fs[j] = curve(xs[j]);
    }
    std::vector<ThresholdResult> roots;
    for (std::size_t j = 0; j + 1 < xs.size(); ++j) {
        const int s0 = sign_of(fs[j]);
        const int s1 = sign_of(fs[j + 1]);
        if (s0 != 0 && s1 != 0 && s0 != s1) {
            roots.push_back(bisect_root(name, curve, xs[j], xs[j + 1], fs[j], fs[j + 1], opts));
        } else if (s0 != 0 && s1 == 0) {
            // Exact zero on the lattice: a root only if the sign flips across it.
            std::size_t k = j + 1;
            while (k < xs.size() && sign_of(fs[k]) == 0) {
                ++k;
            }
            if (k < xs.size() && sign_of(fs[k]) == -s0) {
                ThresholdResult r;
                r.name = name;
                r.lo = xs[j];
                r.hi = xs[k];
                r.root = xs[j + 1];
                r.sign_left = s0;
                r.sign_right = -s0;
                roots.push_back(r);
            }
        }
        if (roots.size() > opts.max_roots) {
            throw ConfigError(name + ": more sign changes than max_roots");
        }
    }
    return roots;
}

std::vector<ThresholdResult> find_mu_roots(const ModelParams& params, const Grid& grid, double lo,
                                           double hi, const RootScanOptions& opts,
                                           const EigenOptions& eig) {
    return find_roots(
        "mu_zero", [&](double mu) { return lambda_of_mu(params, grid, mu, eig); }, lo, hi, opts);
}

std::vector<ThresholdResult> find_scaling_roots(const EigenProblem& base, double lo, double hi,
                                                const RootScanOptions& opts,
                                                const EigenOptions& eig) {
    return find_roots(
        "mu_star",
        [&](double mu) { return principal_eigen(scaled_problem(base, 1.0, mu), eig).lambda; },
        lo, hi, opts);
}

std::vector<double> assemble_dense(const EigenProblem& p) {
    const std::size_t K = p.components();
    const std::size_t n = p.grid.n;
    const std::size_t N = n * K;
    const NeumannLaplacian L = assemble_neumann_laplacian(p.grid);
    std::vector<double> a(N * N, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < K; ++k) {
            const std::size_t r = flat(i, k, K);
            const double d = p.diffusions[k];
            for (std::size_t l = 0; l < K; ++l) {
                a[r * N + flat(i, l, K)] += p.entry(k, l)[i];
            }
            a[r * N + r] += d * L.diag[i];
            if (i > 0) {
                a[r * N + flat(i - 1, k, K)] += d * L.lower[i];
            }
            if (i + 1 < n) {
                a[r * N + flat(i + 1, k, K)] += d * L.upper[i];
            }
        }
    }
    return a;
}

double dense_rightmost_eigenvalue(const std::vector<double>& a, std::size_t n) {
    if (a.size() != n * n || n == 0) {
        throw ConfigError("dense eigenvalue: matrix size mismatch");
    }
    Eigen::MatrixXd m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = a[i * n + j];
        }
    }
    Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
    if (es.info() != Eigen::Success) {
        throw NumericalError("dense eigenvalue: QR iteration failed");
    }
    return es.eigenvalues().real().maxCoeff();
}

}  // namespace dispersal
