#include "dispersal/banded.hpp"

#include "dispersal/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dispersal {

BandMatrix::BandMatrix(std::size_t n, std::size_t kl, std::size_t ku)
    : n_(n), kl_(kl), ku_(ku), data_(n * (kl + ku + 1), 0.0) {}

bool BandMatrix::in_band(std::size_t i, std::size_t j) const noexcept {
    return i < n_ && j < n_ && j + kl_ >= i && j <= i + ku_;
}

double& BandMatrix::operator()(std::size_t i, std::size_t j) {
    if (!in_band(i, j)) {
        throw ConfigError("band matrix: entry (" + std::to_string(i) + ", " +
                          std::to_string(j) + ") outside band");
    }
    return data_[i * (kl_ + ku_ + 1) + (j + kl_ - i)];
}

double BandMatrix::operator()(std::size_t i, std::size_t j) const {
    if (!in_band(i, j)) {
        return 0.0;
    }
    return data_[i * (kl_ + ku_ + 1) + (j + kl_ - i)];
}

void BandMatrix::multiply(std::span<const double> x, std::span<double> out) const {
    if (x.size() != n_ || out.size() != n_) {
        throw ConfigError("band matrix: dimension mismatch");
    }
    const std::size_t w = kl_ + ku_ + 1;
    for (std::size_t i = 0; i < n_; ++i) {
        const std::size_t j0 = i >= kl_ ? i - kl_ : 0;
        const std::size_t j1 = std::min(n_ - 1, i + ku_);
        const double* row = &data_[i * w];
        double s = 0.0;
        for (std::size_t j = j0; j <= j1; ++j) {
            s += row[j + kl_ - i] * x[j];
        }
        out[i] = s;
    }
}

BandLU::BandLU(BandMatrix a) : lu_(std::move(a)) {
    const std::size_t n = lu_.n_;
    const std::size_t kl = lu_.kl_;
    const std::size_t ku = lu_.ku_;
    const std::size_t w = kl + ku + 1;
    auto at = [&](std::size_t i, std::size_t j) -> double& {
        return lu_.data_[i * w + (j + kl - i)];
    };
    for (std::size_t k = 0; k < n; ++k) {
        const double pivot = at(k, k);
        if (!(pivot > 0.0) || !std::isfinite(pivot)) {
            throw NumericalError("band LU: non-positive pivot " + std::to_string(pivot) +
                                 " at row " + std::to_string(k));
        }
        const std::size_t i1 = std::min(n - 1, k + kl);
        const std::size_t j1 = std::min(n - 1, k + ku);
        for (std::size_t i = k + 1; i <= i1; ++i) {
            double& lik = at(i, k);
            if (lik == 0.0) {
                continue;
            }
            lik /= pivot;
            for (std::size_t j = k + 1; j <= j1; ++j) {
                at(i, j) -= lik * at(k, j);
            }
        }
    }
}

void BandLU::solve_in_place(std::span<double> rhs) const {
    const std::size_t n = lu_.n_;
    if (rhs.size() != n) {
        throw ConfigError("band LU: dimension mismatch");
    }
    const std::size_t kl = lu_.kl_;
    const std::size_t ku = lu_.ku_;
    const std::size_t w = kl + ku + 1;
    const double* d = lu_.data_.data();
    for (std::size_t i = 1; i < n; ++i) {
        const std::size_t j0 = i >= kl ? i - kl : 0;
        double s = rhs[i];
        for (std::size_t j = j0; j < i; ++j) {
            s -= d[i * w + (j + kl - i)] * rhs[j];
        }
        rhs[i] = s;
    }
    for (std::size_t ii = n; ii-- > 0;) {
        const std::size_t j1 = std::min(n - 1, ii + ku);
        double s = rhs[ii];
        for (std::size_t j = ii + 1; j <= j1; ++j) {
            s -= d[ii * w + (j + kl - ii)] * rhs[j];
        }
        rhs[ii] = s / d[ii * w + kl];
    }
}

TridiagonalLU::TridiagonalLU(std::span<const double> lower, std::span<const double> diag,
                             std::span<const double> upper)
    : lower_(lower.begin(), lower.end()),
      diag_(diag.begin(), diag.end()),
      upper_(upper.begin(), upper.end()) {
    const std::size_t n = diag_.size();
    if (lower_.size() != n || upper_.size() != n || n == 0) {
        throw ConfigError("tridiagonal: dimension mismatch");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0) {
            lower_[i] /= diag_[i - 1];
            diag_[i] -= lower_[i] * upper_[i - 1];
        }
        if (!(diag_[i] > 0.0) || !std::isfinite(diag_[i])) {
            throw NumericalError("tridiagonal: non-positive pivot at row " + std::to_string(i));
        }
    }
}

void TridiagonalLU::solve_in_place(std::span<double> rhs) const {
    const std::size_t n = diag_.size();
    if (rhs.size() != n) {
        throw ConfigError("tridiagonal: dimension mismatch");
    }
    for (std::size_t i = 1; i < n; ++i) {
        rhs[i] -= lower_[i] * rhs[i - 1];
    }
    rhs[n - 1] /= diag_[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) {
        rhs[i] = (rhs[i] - upper_[i] * rhs[i + 1]) / diag_[i];
    }
}

}  // namespace dispersal
