#pragma once

// Test-side reference computations built directly on Eigen, independent of
// the library's assembly and solvers.

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <vector>

namespace oracle {

/// Neumann second difference with mirror closure, block ordering.
inline Eigen::MatrixXd laplacian(std::size_t n, double h) {
    const auto N = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(N, N);
    const double s = 1.0 / (h * h);
    for (Eigen::Index i = 0; i < N; ++i) {
        L(i, i) = -2.0 * s;
        if (i == 0) {
            L(i, 1) = 2.0 * s;
        } else if (i == N - 1) {
            L(i, N - 2) = 2.0 * s;
        } else {
            L(i, i - 1) = s;
            L(i, i + 1) = s;
        }
    }
    return L;
}

/// Block operator diag(d_k L) + coupling, unknowns ordered (component, node).
/// coupling[k][l] holds the nodal values of entry (k, l).
inline Eigen::MatrixXd system(std::size_t n, double h, const std::vector<double>& d,
                              const std::vector<std::vector<std::vector<double>>>& coupling) {
    const std::size_t K = d.size();
    const auto N = static_cast<Eigen::Index>(n);
    const Eigen::MatrixXd L = laplacian(n, h);
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(N * K, N * K);
    for (std::size_t k = 0; k < K; ++k) {
        const auto bk = static_cast<Eigen::Index>(k) * N;
        A.block(bk, bk, N, N) += d[k] * L;
        for (std::size_t l = 0; l < K; ++l) {
            const auto bl = static_cast<Eigen::Index>(l) * N;
            for (Eigen::Index i = 0; i < N; ++i) {
                A(bk + i, bl + i) += coupling[k][l][static_cast<std::size_t>(i)];
            }
        }
    }
    return A;
}

inline double rightmost(const Eigen::MatrixXd& A) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(A, false);
    return es.eigenvalues().real().maxCoeff();
}

/// Largest eigenvalue of d L + diag(e) via its symmetrisation with the
/// trapezoid weights.
inline double scalar_symmetric(std::size_t n, double h, double d, const std::vector<double>& e) {
    const auto N = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd A = d * laplacian(n, h);
    for (Eigen::Index i = 0; i < N; ++i) {
        A(i, i) += e[static_cast<std::size_t>(i)];
    }
    Eigen::VectorXd w = Eigen::VectorXd::Constant(N, h);
    w(0) = w(N - 1) = 0.5 * h;
    const Eigen::VectorXd sw = w.array().sqrt();
    const Eigen::MatrixXd S = sw.asDiagonal() * A * sw.cwiseInverse().asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (S + S.transpose()),
                                                      Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
}

/// Bisection on a continuous function with f(lo) f(hi) < 0.
template <class F>
double bisect(F f, double lo, double hi, int iterations = 100) {
    double flo = f(lo);
    for (int k = 0; k < iterations; ++k) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
        if (hi - lo <= 1e-14 * std::abs(hi)) {
            break;
        }
    }
    return 0.5 * (lo + hi);
}

inline std::vector<double> nodes(std::size_t n, double a = 0.0, double b = 1.0) {
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    return x;
}

}  // namespace oracle
