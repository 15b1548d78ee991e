#include "nlsball/tridiag.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace nlsball {

int count_below(const SymTridiag& t, double x) {
    const std::size_t n = t.size();
    int count = 0;
    double q = t.diag[0] - x;
    const double tiny = std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon();
    for (std::size_t i = 0;; ++i) {
        if (q == 0.0) q = -tiny;
        if (q < 0.0) ++count;
        if (i + 1 == n) break;
        q = t.diag[i + 1] - x - t.off[i] * t.off[i] / q;
    }
    return count;
}

std::vector<double> lowest_eigenvalues(const SymTridiag& t, int k, double tol) {
    const std::size_t n = t.size();
    k = std::min<int>(k, static_cast<int>(n));
    double lo = std::numeric_limits<double>::max();
    double hi = std::numeric_limits<double>::lowest();
    for (std::size_t i = 0; i < n; ++i) {
        double radius = 0.0;
        if (i > 0) radius += std::abs(t.off[i - 1]);
        if (i + 1 < n) radius += std::abs(t.off[i]);
        lo = std::min(lo, t.diag[i] - radius);
        hi = std::max(hi, t.diag[i] + radius);
    }
    std::vector<double> out;
    out.reserve(k);
    for (int j = 0; j < k; ++j) {
        // j-th eigenvalue (0-based): smallest x with count_below(x) > j.
        double a = j == 0 ? lo : out.back();
        double b = hi;
        for (int it = 0; it < 200 && b - a > tol; ++it) {
            const double mid = 0.5 * (a + b);
            if (mid == a || mid == b) break;
            if (count_below(t, mid) > j) {
                b = mid;
            } else {
                a = mid;
            }
        }
        out.push_back(0.5 * (a + b));
    }
    return out;
}

std::vector<double> multiply(const SymTridiag& t, std::span<const double> x) {
    const std::size_t n = t.size();
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = t.diag[i] * x[i];
        if (i > 0) s += t.off[i - 1] * x[i - 1];
        if (i + 1 < n) s += t.off[i] * x[i + 1];
        y[i] = s;
    }
    return y;
}

std::vector<double> inverse_iteration(const SymTridiag& t, double shift, double tol,
                                      int max_iterations, int* iterations) {
    const std::size_t n = t.size();
    std::vector<double> x(n, 1.0 / std::sqrt(static_cast<double>(n)));
    std::vector<double> lower(t.off), upper(t.off), diag(n);
    for (std::size_t i = 0; i < n; ++i) diag[i] = t.diag[i] - shift;
    double previous = std::numeric_limits<double>::quiet_NaN();
    int it = 0;
    for (; it < max_iterations; ++it) {
        std::vector<double> y;
        try {
            y = solve_tridiagonal<double>(lower, diag, upper, x);
        } catch (const SolverError&) {
            // Shift landed on an eigenvalue to machine precision: nudge it.
            for (auto& d : diag) d -= 1e-12 * (1.0 + std::abs(shift));
            y = solve_tridiagonal<double>(lower, diag, upper, x);
        }
        const double norm = std::sqrt(std::inner_product(y.begin(), y.end(), y.begin(), 0.0));
        for (std::size_t i = 0; i < n; ++i) x[i] = y[i] / norm;
        const auto tx = multiply(t, x);
        const double rayleigh = std::inner_product(x.begin(), x.end(), tx.begin(), 0.0);
        double residual = 0.0;
        for (std::size_t i = 0; i < n; ++i) residual = std::max(residual, std::abs(tx[i] - rayleigh * x[i]));
        if (residual <= tol * std::max(1.0, std::abs(rayleigh)) ||
            (!std::isnan(previous) && std::abs(rayleigh - previous) <= 1e-15 * std::abs(rayleigh))) {
            ++it;
            break;
        }
        previous = rayleigh;
    }
    if (iterations) *iterations = it;
    return x;
}

}  // namespace nlsball
