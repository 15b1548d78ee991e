#include "nlsball/ode.hpp"

#include <algorithm>
#include <cmath>

#include "nlsball/errors.hpp"

namespace nlsball {

double RadialODE::accel(double r, double u, double du) const {
    const double nonlinear = mu == 0.0 ? 0.0 : mu * std::pow(std::abs(u), p - 1.0) * u;
    const double friction = N == 1 ? 0.0 : (N - 1) * du / r;
    return -friction + lambda * u - nonlinear;
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

struct Vec2 {
    double u, du;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.u + b.u, a.du + b.du}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.u, s * a.du}; }

struct Stepper {
    const RadialODE& ode;
    Tolerances tol;

    Vec2 f(double r, Vec2 y) const { return {y.du, ode.accel(r, y.u, y.du)}; }

    // One trial step; returns the scaled error norm and fills y_new / k7 (FSAL derivative).
    double attempt(double r, Vec2 y, Vec2 k1, double h, Vec2& y_new, Vec2& k7) const {
        const Vec2 k2 = f(r + c2 * h, y + (h * a21) * k1);
        const Vec2 k3 = f(r + c3 * h, y + h * (a31 * k1 + a32 * k2));
        const Vec2 k4 = f(r + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
        const Vec2 k5 = f(r + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        const Vec2 k6 = f(r + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        y_new = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        k7 = f(r + h, y_new);
        const Vec2 err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        const double su = tol.atol + tol.rtol * std::max(std::abs(y.u), std::abs(y_new.u));
        const double sd = tol.atol_du + tol.rtol * std::max(std::abs(y.du), std::abs(y_new.du));
        const double norm = std::max(std::abs(err.u) / su, std::abs(err.du) / sd);
        return std::isfinite(norm) ? norm : std::numeric_limits<double>::infinity();
    }
};

}  // namespace

Trajectory integrate_through(const RadialODE& ode, double r0, double u0, double du0,
                             std::span<const double> nodes, Tolerances tol, StopRules rules) {
    Trajectory out;
    out.u.reserve(nodes.size());
    out.du.reserve(nodes.size());
    out.r_stop = r0;
    out.u_stop = u0;
    out.du_stop = du0;
    if (nodes.empty()) return out;

    const double dir = nodes.front() >= r0 ? 1.0 : -1.0;
    Stepper stepper{ode, tol};
    double r = r0;
    Vec2 y{u0, du0};
    Vec2 k1 = stepper.f(r, y);
    double h = std::abs(nodes.front() - r0);
    if (nodes.size() > 1) h = std::min(h > 0 ? h : 1.0, std::abs(nodes[1] - nodes[0]));
    if (!(h > 0)) h = 1e-6;

    auto stop_here = [&](StopReason reason) {
        out.reason = reason;
        out.r_stop = r;
        out.u_stop = y.u;
        out.du_stop = y.du;
        return out;
    };

    for (const double target : nodes) {
        while (dir * (target - r) > 0.0) {
            const double remaining = std::abs(target - r);
            bool last = false;
            double step = h;
            if (step >= remaining * (1.0 - 1e-12)) {
                step = remaining;
                last = true;
            }
            Vec2 y_new, k7;
            const double err = stepper.attempt(r, y, k1, dir * step, y_new, k7);
            if (err <= 1.0) {
                r = last ? target : r + dir * step;
                y = y_new;
                k1 = k7;
                ++out.steps;
                const double grow = err == 0.0 ? 5.0 : std::min(5.0, std::max(0.2, 0.9 * std::pow(err, -0.2)));
                // A step shortened to land on a node says nothing about the admissible size.
                if (!last || grow < 1.0) h = step * grow;
                if (!std::isfinite(y.u) || !std::isfinite(y.du) || std::abs(y.u) > rules.overflow) {
                    return stop_here(StopReason::overflow);
                }
                if (rules.on_crossing && y.u < 0.0) return stop_here(StopReason::crossing);
                if (rules.on_turning && (dir > 0 ? y.du > 0.0 : y.du >= 0.0)) {
                    return stop_here(StopReason::turning);
                }
                if (y.u >= rules.ceiling) return stop_here(StopReason::ceiling);
            } else {
                h = step * std::max(0.1, 0.9 * std::pow(err, -0.2));
                if (h < 1e-14 * std::max(1.0, std::abs(r))) {
                    throw SolverError("step size underflow in radial ODE integration at r = " +
                                      std::to_string(r));
                }
            }
        }
        out.u.push_back(y.u);
        out.du.push_back(y.du);
    }
    return stop_here(StopReason::completed);
}

Tolerances scaled_tolerances(const RadialODE& ode, double rtol, double scale) {
    const double stiffness = std::abs(ode.lambda) + std::abs(ode.mu) * std::pow(scale, ode.p - 1.0);
    return {rtol, rtol * 1e-12 * scale, 1e-15 * (stiffness + 1.0) * scale};
}

SeriesStart regular_start(const RadialODE& ode, double a, double first_node) {
    const double fa = ode.lambda * a - ode.mu * std::pow(std::abs(a), ode.p - 1.0) * a;
    const double dfa = ode.lambda - ode.mu * ode.p * std::pow(std::abs(a), ode.p - 1.0);
    const double c = fa / (2.0 * ode.N);
    const double d = dfa * c / (4.0 * (ode.N + 2));
    SeriesStart s;
    s.r = std::min(0.1 * first_node, 1e-2 / std::sqrt(1.0 + std::abs(dfa)));
    const double r2 = s.r * s.r;
    s.u = a + c * r2 + d * r2 * r2;
    s.du = 2.0 * c * s.r + 4.0 * d * r2 * s.r;
    return s;
}

Trajectory shoot_from_origin(const RadialODE& ode, double a, std::span<const double> nodes,
                             Tolerances tol, StopRules rules) {
    const SeriesStart s = regular_start(ode, a, nodes[1]);
    Trajectory t = integrate_through(ode, s.r, s.u, s.du, nodes.subspan(1), tol, rules);
    t.u.insert(t.u.begin(), a);
    t.du.insert(t.du.begin(), 0.0);
    return t;
}

}  // namespace nlsball
