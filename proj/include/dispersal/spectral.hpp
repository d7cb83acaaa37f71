#pragma once

#include "dispersal/mesh.hpp"
#include "dispersal/model.hpp"

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace dispersal {

/// Weakly coupled elliptic eigenproblem
///   d_k Δφ_k + Σ_l M_kl(x) φ_l = λ φ_k,  k = 0..K-1,
/// with Neumann closure. Off-diagonal coupling must be nonnegative.
struct EigenProblem {
    Grid grid;
    std::vector<double> diffusions;
    std::vector<Field> coupling;  // row-major K x K, coupling[k * K + l]

    [[nodiscard]] std::size_t components() const noexcept { return diffusions.size(); }
    [[nodiscard]] const Field& entry(std::size_t k, std::size_t l) const {
        return coupling[k * components() + l];
    }
};

struct EigenOptions {
    double tol = 1e-12;             // relative width of the eigenvalue bracket
    std::size_t max_iterations = 2000;
};

struct EigenResult {
    double lambda = 0.0;
    std::vector<Field> eigenfunctions;  // sup-norm 1 across all components
    double residual = 0.0;              // sup |Aφ - λφ|
    double lower_bound = 0.0;           // Collatz-Wielandt bracket at exit
    double upper_bound = 0.0;
    std::size_t iterations = 0;
};

/// λ(d, e): principal eigenvalue of dΔ + e.
EigenProblem scalar_problem(const Grid& grid, double d, Field e);

/// Switching pair with potential p(x):
///   diffusions (d1, d2), coupling [[p - α, β], [α, p - β]].
EigenProblem switching_problem(const Grid& grid, double d1, double d2, const Field& alpha,
                               const Field& beta, const Field& potential);

/// Same problem with diffusions scaled by d_scale and coupling by coupling_scale.
EigenProblem scaled_problem(const EigenProblem& base, double d_scale, double coupling_scale);

/// Same diffusions, transposed coupling. This is the adjoint of the discrete
/// operator in the quadrature inner product.
EigenProblem adjoint_problem(const EigenProblem& problem);

/// Throws ConfigError on a negative off-diagonal coupling entry, mismatched
/// sizes, non-positive diffusion, or (K = 2) no node where both off-diagonals
/// are positive.
void validate_problem(const EigenProblem& problem);

/// Principal eigenpair by power iteration on the resolvent (sI - A)^{-1}.
/// The shift s stays above the Collatz-Wielandt upper bound so sI - A is a
/// nonsingular M-matrix and the iteration preserves positivity.
/// Throws NumericalError if the bracket does not close within max_iterations.
EigenResult principal_eigen(const EigenProblem& problem, const EigenOptions& opts = {});

EigenResult adjoint_principal_eigen(const EigenProblem& problem, const EigenOptions& opts = {});

/// Sparse apply of the assembled operator; components stored as separate fields.
std::vector<Field> apply_operator(const EigenProblem& problem, const std::vector<Field>& x);

/// Principal eigenvalue of the switching pair with coupling
/// [[μm - α, β], [α, μm - β]] and diffusions (d1, d2).
EigenProblem mu_problem(const ModelParams& params, const Grid& grid, double mu);
double lambda_of_mu(const ModelParams& params, const Grid& grid, double mu,
                    const EigenOptions& opts = {});

struct LambdaPrimeReport {
    double value = 0.0;              // ∫m(Φ1 + Φ2) / ∫(Φ1 + Φ2)
    double flux_constant = 0.0;      // mean of d1Φ1 + d2Φ2
    double flux_deviation = 0.0;     // sup-deviation of d1Φ1 + d2Φ2, relative to its sup
    double flux_formula = 0.0;       // ∫(d2α + d1β)Φ1 / ∫β
    std::vector<Field> phi;          // (Φ1, Φ2) at μ = 0, sup-norm 1
    double lambda_at_zero = 0.0;
};

/// Closed-form derivative of λ(μ) at μ = 0. Throws NumericalError when
/// d1Φ1 + d2Φ2 deviates from a constant by more than 1e-6 (relative) or the
/// constant disagrees with its integral formula by more than 1e-6 (relative).
LambdaPrimeReport lambda_prime_at_zero(const ModelParams& params, const Grid& grid,
                                       const EigenOptions& opts = {});

// ---------------------------------------------------------------------------
// Roots of eigenvalue curves
// ---------------------------------------------------------------------------

struct ThresholdResult {
    std::string name;
    double lo = 0.0;  // bracket searched
    double hi = 0.0;
    double root = 0.0;
    double residual = 0.0;  // |curve(root)|
    int sign_left = 0;
    int sign_right = 0;
};

struct RootScanOptions {
    std::size_t points = 64;
    bool log_spaced = true;        // falls back to linear when lo <= 0
    double value_tol = 1e-9;       // stop bisection once |f| <= value_tol
    double x_rel_tol = 1e-14;      // or the bracket is this narrow
    std::size_t max_roots = 16;
};

/// Scans [lo, hi] on a lattice, bisects every sign change and returns the
/// roots in increasing order. Throws ConfigError when more than max_roots
/// sign changes are found. An empty result is valid.
std::vector<ThresholdResult> find_roots(const std::string& name,
                                        const std::function<double(double)>& curve, double lo,
                                        double hi, const RootScanOptions& opts = {});

/// Bisection on [lo, hi] given values at both ends with opposite signs.
ThresholdResult bisect_root(const std::string& name, const std::function<double(double)>& curve,
                            double lo, double hi, double f_lo, double f_hi,
                            const RootScanOptions& opts = {});

/// Roots of μ -> λ(μ) on [lo, hi] (the name "mu_zero").
std::vector<ThresholdResult> find_mu_roots(const ModelParams& params, const Grid& grid, double lo,
                                           double hi, const RootScanOptions& opts = {},
                                           const EigenOptions& eig = {});

/// Roots of μ -> λ(1, μM) for the family with base problem M (the name "mu_star").
std::vector<ThresholdResult> find_scaling_roots(const EigenProblem& base, double lo, double hi,
                                                const RootScanOptions& opts = {},
                                                const EigenOptions& eig = {});

/// Rightmost real part of the spectrum of a dense matrix given row-major.
double dense_rightmost_eigenvalue(const std::vector<double>& a, std::size_t n);

/// Assembles the full operator as a dense row-major matrix with the
/// interleaved ordering (node i, component k) -> i * K + k.
std::vector<double> assemble_dense(const EigenProblem& problem);

}  // namespace dispersal
