#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace nlsball {

/// u'' = -((N-1)/r) u' + lambda u - mu |u|^{p-1} u, the radial form of
/// -Delta u + lambda u = mu |u|^{p-1} u.
struct RadialODE {
    int N = 1;
    double p = 3.0;
    double lambda = 0.0;
    double mu = 1.0;

    double accel(double r, double u, double du) const;
};

/// Why an integration stopped before its last node.
enum class StopReason { completed, crossing, turning, ceiling, overflow };

/// Stopping rules checked after every accepted step.
struct StopRules {
    bool on_crossing = false;  ///< u < 0
    bool on_turning = false;   ///< u' > 0 (outward) or u' >= 0 (inward)
    double ceiling = std::numeric_limits<double>::infinity();   ///< u >= ceiling
    double overflow = std::numeric_limits<double>::infinity();  ///< |u| > overflow, or non-finite
};

struct Trajectory {
    std::vector<double> u;   ///< value at each node reached
    std::vector<double> du;  ///< derivative at each node reached
    StopReason reason = StopReason::completed;
    double r_stop = 0.0;     ///< radius of the last accepted step
    double u_stop = 0.0;
    double du_stop = 0.0;
    long steps = 0;

    std::size_t reached() const { return u.size(); }
};

struct Tolerances {
    double rtol = 1e-10;
    double atol = 1e-20;     ///< absolute floor for u
    double atol_du = 1e-20;  ///< absolute floor for u'
};

/// Tolerances for solutions of amplitude `scale`. The floor on u' sits above the rounding noise
/// of lambda u - mu |u|^{p-1} u, which otherwise stalls the step size on flat plateaus.
Tolerances scaled_tolerances(const RadialODE& ode, double rtol, double scale);

/// Adaptive Dormand-Prince 5(4) integration from (r0, u0, du0) through the given nodes, which
/// must be monotone in the direction of travel and on the far side of r0. Every node is hit
/// exactly; stopping rules are evaluated after each accepted step.
Trajectory integrate_through(const RadialODE& ode, double r0, double u0, double du0,
                             std::span<const double> nodes, Tolerances tol, StopRules rules = {});

/// Series start for the regular solution with u(0) = a: returns the radius used and the state
/// u = a + c r^2 + d r^4, u' = 2 c r + 4 d r^3.
struct SeriesStart {
    double r = 0.0;
    double u = 0.0;
    double du = 0.0;
};
SeriesStart regular_start(const RadialODE& ode, double a, double first_node);

/// Trajectory from the origin with u(0) = a sampled on `nodes` (nodes[0] == 0).
Trajectory shoot_from_origin(const RadialODE& ode, double a, std::span<const double> nodes,
                             Tolerances tol, StopRules rules = {});

}  // namespace nlsball
