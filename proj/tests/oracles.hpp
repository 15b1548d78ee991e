#pragma once

// Independent reference computations used only by the tests.

#include <cmath>
#include <functional>
#include <stdexcept>

namespace oracle {

/// Plain bisection on a sign change of f over [a, b].
inline double bisect(const std::function<double(double)>& f, double a, double b, double tol = 1e-15) {
    double fa = f(a);
    if (fa * f(b) > 0) throw std::runtime_error("oracle bisect: no sign change");
    for (int i = 0; i < 300 && b - a > tol * std::max(1.0, std::abs(a)); ++i) {
        const double m = 0.5 * (a + b);
        const double fm = f(m);
        if (fa * fm <= 0) {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
    }
    return 0.5 * (a + b);
}

/// First positive zero of J_nu, located by a coarse scan then bisection.
inline double bessel_j_zero(double nu) {
    const auto j = [nu](double x) { return std::cyl_bessel_j(nu, x); };
    double a = 0.5, step = 0.01;
    while (j(a) * j(a + step) > 0) a += step;
    return bisect(j, a, a + step);
}

/// Composite Simpson on [a, b] with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 20000) {
    if (n % 2) ++n;
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return s * h / 3.0;
}

/// N = 1 positive Dirichlet solution of u'' = lambda u - mu u^p on (-1, 1) from the first integral
/// u'^2 / 2 = F(u) - F(a), F(u) = lambda u^2 / 2 - mu u^{p+1} / (p+1). The half-length
/// int_0^a du / sqrt(2 (F(u) - F(a))) is evaluated with u = a (1 - t^2), which removes the
/// square-root singularity at the center.
struct FirstIntegral {
    double p, lambda, mu;

    double F(double u) const { return lambda * u * u / 2 - mu * std::pow(u, p + 1) / (p + 1); }

    double half_length(double a) const {
        const double Fa = F(a);
        return simpson(
            [&](double t) {
                if (t == 0.0) return 2.0 * a / std::sqrt(2.0 * a * std::abs(lambda * a - mu * std::pow(a, p)));
                const double u = a * (1 - t * t);
                return 2.0 * a * t / std::sqrt(2.0 * (F(u) - Fa));
            },
            0.0, 1.0, 20000);
    }

    /// Center value with half-length 1; `lo` and `hi` must bracket it.
    double center(double lo, double hi) const {
        return bisect([&](double a) { return half_length(a) - 1.0; }, lo, hi, 1e-14);
    }

    double boundary_slope(double a) const { return -std::sqrt(2.0 * (F(0.0) - F(a))); }
};

}  // namespace oracle
