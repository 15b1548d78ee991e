#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "nlsball/errors.hpp"

namespace nlsball {

/// Real symmetric tridiagonal matrix; `off` has one entry fewer than `diag`.
struct SymTridiag {
    std::vector<double> diag;
    std::vector<double> off;

    std::size_t size() const { return diag.size(); }
};

/// Number of eigenvalues strictly below x (Sturm sequence / Sylvester inertia).
int count_below(const SymTridiag& t, double x);

/// The k smallest eigenvalues, ascending, by Sturm bisection to the given absolute tolerance.
std::vector<double> lowest_eigenvalues(const SymTridiag& t, int k, double tol);

/// Shifted inverse iteration; returns a unit-norm eigenvector for the eigenvalue nearest `shift`.
/// `iterations` receives the number of solves used.
std::vector<double> inverse_iteration(const SymTridiag& t, double shift, double tol,
                                      int max_iterations, int* iterations = nullptr);

/// y = T x.
std::vector<double> multiply(const SymTridiag& t, std::span<const double> x);

/// Gaussian elimination with partial pivoting for a general tridiagonal system
/// (the LAPACK gtsv scheme). `lower` and `upper` have n-1 entries.
template <class T>
std::vector<T> solve_tridiagonal(std::vector<T> lower, std::vector<T> diag, std::vector<T> upper,
                                 std::vector<T> rhs) {
    const std::size_t n = diag.size();
    if (n == 0) return rhs;
    if (n == 1) {
        if (std::abs(diag[0]) == 0.0) throw SolverError("singular 1x1 system");
        rhs[0] /= diag[0];
        return rhs;
    }
    // lower[i] is reused to hold the second superdiagonal created by row swaps.
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (std::abs(diag[i]) >= std::abs(lower[i])) {
            if (std::abs(diag[i]) == 0.0) throw SolverError("singular tridiagonal system");
            const T fact = lower[i] / diag[i];
            diag[i + 1] -= fact * upper[i];
            rhs[i + 1] -= fact * rhs[i];
            lower[i] = T(0);
        } else {
            const T fact = diag[i] / lower[i];
            diag[i] = lower[i];
            T temp = diag[i + 1];
            diag[i + 1] = upper[i] - fact * temp;
            if (i + 2 < n) {
                lower[i] = upper[i + 1];
                upper[i + 1] = -fact * lower[i];
            } else {
                lower[i] = T(0);
            }
            upper[i] = temp;
            temp = rhs[i];
            rhs[i] = rhs[i + 1];
            rhs[i + 1] = temp - fact * rhs[i + 1];
        }
    }
    if (std::abs(diag[n - 1]) == 0.0) throw SolverError("singular tridiagonal system");
    rhs[n - 1] /= diag[n - 1];
    rhs[n - 2] = (rhs[n - 2] - upper[n - 2] * rhs[n - 1]) / diag[n - 2];
    for (std::size_t k = n - 2; k-- > 0;) {
        rhs[k] = (rhs[k] - upper[k] * rhs[k + 1] - lower[k] * rhs[k + 2]) / diag[k];
    }
    return rhs;
}

}  // namespace nlsball
