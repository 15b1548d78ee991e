#include "nlsball/shoot.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>

#include "nlsball/errors.hpp"

namespace nlsball {

void validate(const ShootConfig& config) {
    if (!(config.ode_tolerance > 0.0) || !(config.bisection_tolerance > 0.0)) {
        throw ParameterError("shooting tolerances must be positive");
    }
    if (config.max_bisections < 40) throw ParameterError("max_bisections must be >= 40");
    if (config.n_nodes < 16) throw ParameterError("n_nodes must be >= 16");
    if (!(config.grading == 0.0 || config.grading >= 1.0)) throw ParameterError("grading must be 0 or >= 1");
    if (!(config.initial_guess >= 0.0)) throw ParameterError("initial_guess must be >= 0");
}

double ball_grading(const ShootConfig& config, int mu_sign) {
    if (config.grading > 0.0) return config.grading;
    return mu_sign == 1 ? 2.0 : 1.0;
}

namespace {


struct BisectionResult {
    double crossing = 0.0;     // parameter whose trajectory crosses zero
    double noncrossing = 0.0;
    int iterations = 0;
    double width = 0.0;
};

// Bisection between parameters of opposite class; stops at the relative tolerance or when no
// representable midpoint remains.
BisectionResult bisect(const std::function<bool(double)>& crosses, double x_cross, double x_non,
                       const ShootConfig& config) {
    BisectionResult res{x_cross, x_non, 0, std::abs(x_cross - x_non)};
    for (;;) {
        const double width = std::abs(res.crossing - res.noncrossing);
        res.width = width;
        const double mid = 0.5 * (res.crossing + res.noncrossing);
        if (width <= config.bisection_tolerance * std::max(std::abs(res.crossing), std::abs(res.noncrossing)) ||
            mid == res.crossing || mid == res.noncrossing) {
            return res;
        }
        if (res.iterations >= config.max_bisections) {
            std::ostringstream msg;
            msg << "bisection exhausted after " << res.iterations << " steps, bracket [" << res.crossing
                << ", " << res.noncrossing << "] width " << width;
            throw PrecisionError(msg.str(), width);
        }
        ++res.iterations;
        if (crosses(mid)) {
            res.crossing = mid;
        } else {
            res.noncrossing = mid;
        }
    }
}

// Expands geometrically from `guess` until both classes are seen. `lo_limit`/`hi_limit` bound
// the search; returns {x_cross, x_non}.
std::pair<double, double> find_bracket(const std::function<bool(double)>& crosses, double guess,
                                       double lo_limit, double hi_limit, bool crossing_above,
                                       const std::string& what) {
    const bool first = crosses(guess);
    double other = guess;
    double factor = 1.05;
    // Crossing above means larger parameters cross: from a crossing guess, search downward.
    const bool go_up = first != crossing_above;
    for (int it = 0; it < 200; ++it) {
        other = go_up ? std::min(other * factor, hi_limit) : std::max(other / factor, lo_limit);
        const bool cls = crosses(other);
        if (cls != first) return first ? std::pair{guess, other} : std::pair{other, guess};
        guess = other;
        if (other == hi_limit || other == lo_limit) break;
        factor = std::min(factor * factor, 1e3);
    }
    std::ostringstream msg;
    msg << "no bracket for " << what << " within [" << lo_limit << ", " << hi_limit << "], last trial "
        << other << (first ? " crossed" : " did not cross");
    throw BracketError(msg.str());
}

std::vector<double> averaged(const std::vector<double>& a, const std::vector<double>& b, std::size_t n) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = 0.5 * (a[i] + b[i]);
    return out;
}

std::vector<double> reversed_nodes(std::span<const double> nodes, std::size_t from, std::size_t to) {
    // nodes[from], nodes[from-1], ..., nodes[to] (from > to)
    std::vector<double> out;
    for (std::size_t i = from + 1; i-- > to;) out.push_back(nodes[i]);
    return out;
}

// Regular-at-zero solution of Delta e = kappa^2 e, evaluated as a ratio G(kappa r)/G(kappa rb)
// together with the derivative ratio, with G(x) = x^{-nu} I_nu(x), nu = (N-2)/2.
std::pair<double, double> growing_ratio(int N, double kappa, double r, double rb) {
    const double x = kappa * r, xb = kappa * rb;
    const double nu = 0.5 * (N - 2);
    auto G = [&](double t) -> std::pair<double, double> {
        // value and derivative of G, scaled by e^{-xb} to avoid overflow
        if (N == 1) return {0.5 * (std::exp(t - xb) + std::exp(-t - xb)), 0.5 * (std::exp(t - xb) - std::exp(-t - xb))};
        if (t < 1e-8) return {std::exp(-xb) / std::tgamma(nu + 1.0) * std::pow(0.5, nu), 0.0};
        if (xb < 600.0) {
            const double s = std::exp(-xb) * std::pow(t, -nu);
            return {s * std::cyl_bessel_i(nu, t), s * std::cyl_bessel_i(nu + 1.0, t)};
        }
        // large-argument form I_nu(t) ~ e^t / sqrt(2 pi t)
        const double v = std::exp(t - xb) * std::pow(t, -nu) / std::sqrt(2.0 * std::numbers::pi * t);
        return {v, v};
    };
    const auto [gb, gbd] = G(xb);
    const auto [g, gd] = G(x);
    (void)gbd;
    return {g / gb, kappa * gd / gb};
}

// T(r) = r^{-nu} K_|nu|(r) and T'(r) = -r^{-nu} K_|nu+1|(r).
std::pair<double, double> decaying_tail(int N, double r) {
    const double nu = 0.5 * (N - 2);
    const double s = std::pow(r, -nu);
    return {s * std::cyl_bessel_k(std::abs(nu), r), -s * std::cyl_bessel_k(std::abs(nu + 1.0), r)};
}

struct FinalPair {
    Trajectory a, b;
};

std::size_t common_reach(const FinalPair& t) { return std::min(t.a.reached(), t.b.reached()); }

BallSolution focusing_ball(const ProblemParams& params, double lambda, const ShootConfig& config,
                           const GridPtr& grid, double lambda1) {
    const RadialODE ode{params.N, params.p, lambda, 1.0};
    const auto nodes = grid->nodes();
    const std::size_t n = nodes.size();

    double guess = config.initial_guess;
    if (!(guess > 0.0)) guess = 1.5 * std::pow(lambda + lambda1, 1.0 / (params.p - 1.0));
    const double scale_hint = guess;

    StopRules rules;
    rules.on_crossing = true;
    rules.on_turning = true;
    auto crosses = [&](double a) {
        return shoot_from_origin(ode, a, nodes, scaled_tolerances(ode, config.ode_tolerance, a), rules).reason == StopReason::crossing;
    };
    const auto [x_cross, x_non] = find_bracket(crosses, guess, 1e-150 * scale_hint, 1e150 * scale_hint,
                                               true, "the focusing center value");
    const BisectionResult bis = bisect(crosses, x_cross, x_non, config);

    StopRules loose;
    const double a = 0.5 * (bis.crossing + bis.noncrossing);
    loose.overflow = 1e6 * a;
    FinalPair fin{shoot_from_origin(ode, bis.crossing, nodes, scaled_tolerances(ode, config.ode_tolerance, a), loose),
                  shoot_from_origin(ode, bis.noncrossing, nodes, scaled_tolerances(ode, config.ode_tolerance, a), loose)};

    BallSolution sol;
    sol.lambda = lambda;
    sol.mu_sign = 1;
    sol.bisections = bis.iterations;
    sol.bracket_width = bis.width;
    RadialProfile& prof = sol.profile;
    prof.grid = grid;

    const std::size_t reach = common_reach(fin);
    bool smooth = reach == n;
    for (std::size_t i = 0; smooth && i < n; ++i) smooth = std::abs(fin.a.u[i] - fin.b.u[i]) <= 1e-9 * a;
    if (smooth) {
        prof.values = averaged(fin.a.u, fin.b.u, n);
        prof.slopes = averaged(fin.a.du, fin.b.du, n);
        prof.values.back() = 0.0;
        prof.boundary_derivative = prof.slopes.back();
        sol.cut_radius = 1.0;
        return sol;
    }

    // Keep the part where both trajectories agree to 1e-8 relative.
    std::size_t c = 0;
    while (c + 1 < reach) {
        const double avg = 0.5 * (fin.a.u[c + 1] + fin.b.u[c + 1]);
        if (!(avg > 0.0) || std::abs(fin.a.u[c + 1] - fin.b.u[c + 1]) > 1e-8 * avg) break;
        ++c;
    }
    if (c + 1 >= n) c = n - 2;
    if (c < 2) throw PrecisionError("shooting trajectories separate immediately; center value not resolved", bis.width);
    prof.values = averaged(fin.a.u, fin.b.u, c + 1);
    prof.slopes = averaged(fin.a.du, fin.b.du, c + 1);
    const double target = prof.values[c];

    // Inward shot from r = 1 with u(1) = 0, u'(1) = s, matching u at the cut. Trajectories that
    // turn before reaching the cut overshoot into the nonlinear regime and count as too steep.
    const auto inward = reversed_nodes(nodes, n - 2, c);
    StopRules inward_rules;
    inward_rules.on_turning = true;
    inward_rules.overflow = 1e6 * a;
    auto shoot_in = [&](double s, const RadialODE& eq, StopRules r) {
        const double scale = std::abs(s) / std::sqrt(std::abs(lambda) + 1.0);
        return integrate_through(eq, 1.0, 0.0, s, inward, scaled_tolerances(eq, config.ode_tolerance, scale), r);
    };
    auto value_at_cut = [&](double s) {
        const Trajectory t = shoot_in(s, ode, inward_rules);
        return t.reason == StopReason::completed ? t.u.back() : std::numeric_limits<double>::infinity();
    };
    // The tail is nearly linear, so the linear inward solution gives the slope to leading order.
    const RadialODE linear{params.N, params.p, lambda, 0.0};
    const double w_cut = shoot_in(-1.0, linear, {}).u.back();
    double s_small = -0.5 * target / w_cut;
    double s_big = -2.0 * target / w_cut;
    for (int it = 0; value_at_cut(s_small) > target; ++it) {
        if (it > 200) throw BracketError("inward matching: no shallow boundary slope found");
        s_big = s_small;
        s_small *= 0.5;
    }
    for (int it = 0; value_at_cut(s_big) < target; ++it) {
        if (it > 200) throw BracketError("inward matching: no steep boundary slope found");
        s_small = s_big;
        s_big *= 2.0;
    }
    // value increases with |s|: s_small undershoots, s_big overshoots.
    for (int it = 0; it < 400; ++it) {
        const double mid = 0.5 * (s_small + s_big);
        if (mid == s_small || mid == s_big) break;
        (value_at_cut(mid) < target ? s_small : s_big) = mid;
    }
    const double s = 0.5 * (s_small + s_big);
    const Trajectory in = shoot_in(s, ode, {});
    prof.values.resize(n);
    prof.slopes.resize(n);
    // inward[k] = nodes[n-2-k]
    for (std::size_t k = 0; k + 1 < in.u.size(); ++k) {
        prof.values[n - 2 - k] = in.u[k];
        prof.slopes[n - 2 - k] = in.du[k];
    }
    prof.values[n - 1] = 0.0;
    prof.slopes[n - 1] = s;
    prof.boundary_derivative = s;
    double max_slope = 0.0;
    for (double d : prof.slopes) max_slope = std::max(max_slope, std::abs(d));
    sol.slope_jump = std::abs(in.du.back() - prof.slopes[c]) / max_slope;
    sol.grafted = true;
    sol.cut_radius = nodes[c];
    return sol;
}

BallSolution defocusing_ball(const ProblemParams& params, double lambda, const ShootConfig& config,
                             const GridPtr& grid) {
    const RadialODE ode{params.N, params.p, lambda, -1.0};
    const auto nodes = grid->nodes();
    const std::size_t n = nodes.size();
    const double P = std::pow(-lambda, 1.0 / (params.p - 1.0));

    StopRules rules;
    rules.on_crossing = true;
    rules.on_turning = true;
    rules.ceiling = P;
    rules.overflow = 10.0 * P;
    auto crosses = [&](double a) {
        return shoot_from_origin(ode, a, nodes, scaled_tolerances(ode, config.ode_tolerance, P), rules).reason == StopReason::crossing;
    };
    double x_cross = 1e-12 * P, x_non = P;
    if (config.initial_guess > 0.0 && config.initial_guess < P) {
        std::tie(x_cross, x_non) = find_bracket(crosses, config.initial_guess, 1e-12 * P, P, false,
                                                "the defocusing center value");
    } else if (!crosses(x_cross)) {
        throw BracketError("defocusing: small center value does not cross; lambda too close to -lambda_1?");
    }
    const BisectionResult bis = bisect(crosses, x_cross, x_non, config);

    BallSolution sol;
    sol.lambda = lambda;
    sol.mu_sign = -1;
    sol.bisections = bis.iterations;
    sol.bracket_width = bis.width;
    RadialProfile& prof = sol.profile;
    prof.grid = grid;

    StopRules loose;
    loose.overflow = 10.0 * P;
    FinalPair fin{shoot_from_origin(ode, bis.crossing, nodes, scaled_tolerances(ode, config.ode_tolerance, P), loose),
                  shoot_from_origin(ode, bis.noncrossing, nodes, scaled_tolerances(ode, config.ode_tolerance, P), loose)};
    bool smooth = common_reach(fin) == n;
    for (std::size_t i = 0; smooth && i < n; ++i) smooth = std::abs(fin.a.u[i] - fin.b.u[i]) <= 1e-9 * P;
    if (smooth) {
        prof.values = averaged(fin.a.u, fin.b.u, n);
        prof.slopes = averaged(fin.a.du, fin.b.du, n);
        prof.values.back() = 0.0;
        prof.boundary_derivative = prof.slopes.back();
        return sol;
    }

    // Plateau regime: bisect on the boundary slope s = u'(1), integrating inward. Steep slopes
    // overshoot the plateau height P, shallow ones turn around below it.
    const auto inward = reversed_nodes(nodes, n - 2, 1);
    StopRules in_rules;
    in_rules.on_turning = true;
    in_rules.ceiling = P;
    in_rules.overflow = 10.0 * P;
    // Bisection runs on the magnitude m = -s; larger magnitudes are steep.
    auto steep = [&](double m) {
        return integrate_through(ode, 1.0, 0.0, -m, inward, scaled_tolerances(ode, config.ode_tolerance, P), in_rules).reason !=
               StopReason::turning;
    };
    const double m_est = P * std::sqrt(-lambda * (params.p - 1.0) / (params.p + 1.0));
    const auto [m_steep, m_shallow] = find_bracket(steep, m_est, m_est * 1e-6, m_est * 1e3, true,
                                                   "the defocusing boundary slope");
    const BisectionResult sb = bisect(steep, m_steep, m_shallow, config);
    sol.bisections += sb.iterations;

    StopRules in_loose;
    in_loose.overflow = 10.0 * P;
    FinalPair tr{integrate_through(ode, 1.0, 0.0, -sb.crossing, inward, scaled_tolerances(ode, config.ode_tolerance, P), in_loose),
                 integrate_through(ode, 1.0, 0.0, -sb.noncrossing, inward, scaled_tolerances(ode, config.ode_tolerance, P), in_loose)};
    const std::size_t reach = common_reach(tr);
    // inward[k] = nodes[n-2-k]; keep the run from the boundary where the two agree.
    std::size_t k = 0;
    while (k < reach && std::abs(tr.a.u[k] - tr.b.u[k]) <= 1e-9 * P && tr.a.u[k] < P) ++k;
    if (k == 0) throw PrecisionError("defocusing inward trajectories separate at the boundary", sb.width);
    prof.values.assign(n, 0.0);
    prof.slopes.assign(n, 0.0);
    prof.slopes[n - 1] = -0.5 * (sb.crossing + sb.noncrossing);
    prof.boundary_derivative = prof.slopes[n - 1];
    for (std::size_t j = 0; j < k; ++j) {
        prof.values[n - 2 - j] = 0.5 * (tr.a.u[j] + tr.b.u[j]);
        prof.slopes[n - 2 - j] = 0.5 * (tr.a.du[j] + tr.b.du[j]);
    }
    const std::size_t b = n - 1 - k;  // innermost trusted node
    const double eb = P - prof.values[b];
    const double kappa = std::sqrt((params.p - 1.0) * -lambda);
    for (std::size_t i = 0; i < b; ++i) {
        const auto [ratio, dratio] = growing_ratio(params.N, kappa, nodes[i], nodes[b]);
        prof.values[i] = P - eb * ratio;
        prof.slopes[i] = -eb * dratio;
    }
    const auto [one, dslope] = growing_ratio(params.N, kappa, nodes[b], nodes[b]);
    (void)one;
    double max_slope = 0.0;
    for (double d : prof.slopes) max_slope = std::max(max_slope, std::abs(d));
    sol.slope_jump = std::abs(-eb * dslope - prof.slopes[b]) / max_slope;
    sol.grafted = true;
    sol.cut_radius = nodes[b];
    return sol;
}

}  // namespace

BallSolution shoot_ball(const ProblemParams& params, double lambda, int mu_sign, const ShootConfig& config,
                        GridPtr grid) {
    validate(config);
    if (mu_sign != 1 && mu_sign != -1) throw ParameterError("mu_sign must be +1 or -1");
    if (!std::isfinite(lambda)) throw DomainError("lambda must be finite");
    const double lambda1 = ball_lambda1(params.N);
    if (mu_sign == 1 && !(lambda > -lambda1)) {
        throw DomainError("focusing solutions need lambda > -lambda_1 = " + std::to_string(-lambda1));
    }
    if (mu_sign == -1 && !(lambda < -lambda1)) {
        throw DomainError("defocusing solutions need lambda < -lambda_1 = " + std::to_string(-lambda1));
    }
    if (!grid) grid = make_grid(params, config.n_nodes, 1.0, {ball_grading(config, mu_sign)});
    if (std::abs(grid->radius() - 1.0) > 1e-14 || grid->dimension() != params.N) {
        throw ParameterError("ball profiles need a grid on [0, 1] of matching dimension");
    }
    return mu_sign == 1 ? focusing_ball(params, lambda, config, grid, lambda1)
                        : defocusing_ball(params, lambda, config, grid);
}

RadialProfile solve_ball_profile(const ProblemParams& params, double lambda, int mu_sign,
                                 const ShootConfig& config) {
    return shoot_ball(params, lambda, mu_sign, config).profile;
}

double ode_residual(const RadialProfile& u, const ProblemParams& params, double lambda, double mu) {
    const RadialODE ode{params.N, params.p, lambda, mu};
    const auto nodes = u.grid->nodes();
    const auto du = nodal_slopes(u);
    double umax = 0.0;
    for (double v : u.values) umax = std::max(umax, std::abs(v));
    if (umax == 0.0) return 0.0;
    const Tolerances tol = scaled_tolerances(ode, 1e-12, umax);
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        Trajectory t;
        const double next[1] = {nodes[i + 1]};
        if (i == 0 && nodes[0] == 0.0) {
            const SeriesStart s = regular_start(ode, u.values[0], nodes[1]);
            t = integrate_through(ode, s.r, s.u, s.du, next, tol);
        } else {
            t = integrate_through(ode, nodes[i], u.values[i], du[i], next, tol);
        }
        worst = std::max(worst, std::abs(t.u.back() - u.values[i + 1]));
    }
    return worst / umax;
}

double pohozaev_ratio(const ProblemParams& params) {
    const double N = params.N, p = params.p;
    return N * (p - 1.0) / (N + 2.0 - p * (N - 2.0));
}

double WholeSpaceGroundState::nehari_residual() const { return (grad_energy + mass - lp1_norm) / lp1_norm; }

double WholeSpaceGroundState::ratio_residual() const { return grad_energy / mass / pohozaev_ratio(params) - 1.0; }

WholeSpaceGroundState solve_whole_space(const ProblemParams& params, double R_max, const ShootConfig& config) {
    validate(config);
    if (!(R_max > -std::log(1e-8)) || !(R_max <= 600.0)) {
        throw ParameterError("R_max must satisfy exp(-R_max) < 1e-8 and R_max <= 600");
    }
    const int n_nodes = std::max(config.n_nodes, static_cast<int>(std::ceil(200.0 * R_max)) + 1);
    const GridPtr grid = make_grid(params, n_nodes, R_max, {std::max(1.0, config.grading)});
    const auto nodes = grid->nodes();
    const std::size_t n = nodes.size();
    const RadialODE ode{params.N, params.p, 1.0, 1.0};

    StopRules rules;
    rules.on_crossing = true;
    rules.on_turning = true;
    auto crosses = [&](double a) {
        return shoot_from_origin(ode, a, nodes, scaled_tolerances(ode, config.ode_tolerance, a), rules).reason == StopReason::crossing;
    };
    double hi = 2.0;
    for (int it = 0; !crosses(hi); ++it) {
        if (it > 60) throw BracketError("whole space: no crossing center value found");
        hi *= 2.0;
    }
    const BisectionResult bis = bisect(crosses, hi, 1.0, config);
    const double a = 0.5 * (bis.crossing + bis.noncrossing);

    StopRules loose;
    loose.overflow = 1e3 * a;
    FinalPair fin{shoot_from_origin(ode, bis.crossing, nodes, scaled_tolerances(ode, config.ode_tolerance, a), loose),
                  shoot_from_origin(ode, bis.noncrossing, nodes, scaled_tolerances(ode, config.ode_tolerance, a), loose)};
    const std::size_t reach = common_reach(fin);
    std::size_t c = 0;
    while (c + 1 < reach) {
        const double avg = 0.5 * (fin.a.u[c + 1] + fin.b.u[c + 1]);
        if (!(avg > 0.0) || std::abs(fin.a.u[c + 1] - fin.b.u[c + 1]) > 1e-8 * avg) break;
        ++c;
    }
    if (c + 1 >= n) c = n - 1;
    WholeSpaceGroundState z;
    z.params = params;
    z.bisections = bis.iterations;
    z.bracket_width = bis.width;
    RadialProfile& prof = z.profile;
    prof.grid = grid;
    prof.values = averaged(fin.a.u, fin.b.u, n);
    prof.slopes = averaged(fin.a.du, fin.b.du, n);
    const double zc = prof.values[c];
    if (std::pow(zc / a, params.p - 1.0) > 1e-4 || c == 0) {
        std::ostringstream msg;
        msg << "whole space: trajectories separate at r = " << nodes[c] << " before the linear tail regime";
        throw PrecisionError(msg.str(), bis.width);
    }
    const auto [tc, dtc] = decaying_tail(params.N, nodes[c]);
    (void)dtc;
    for (std::size_t i = c + 1; i < n; ++i) {
        const auto [t, dt] = decaying_tail(params.N, nodes[i]);
        prof.values[i] = zc * t / tc;
        prof.slopes[i] = zc * dt / tc;
    }
    prof.boundary_derivative = prof.slopes.back();
    z.cut_radius = nodes[c];
    z.center_value = prof.values.front();
    z.mass = integrate(prof, [](double v) { return v * v; });
    z.grad_energy = grad_norm_sq(prof);
    const double p1 = params.p + 1.0;
    z.lp1_norm = integrate(prof, [p1](double v) { return std::pow(std::abs(v), p1); });
    return z;
}

RadialProfile rescaled_profile(const RadialProfile& u, double lambda, double mu, const ProblemParams& params) {
    if (!(lambda > 0.0)) throw DomainError("rescaling needs lambda > 0");
    if (!(mu > 0.0)) throw DomainError("rescaling needs mu > 0");
    const double stretch = std::sqrt(lambda);
    const double amp = std::pow(mu / lambda, 1.0 / (params.p - 1.0));
    std::vector<double> nodes(u.grid->nodes().begin(), u.grid->nodes().end());
    for (double& r : nodes) r *= stretch;
    RadialProfile v;
    v.grid = std::make_shared<const RadialGrid>(params.N, std::move(nodes));
    v.values = u.values;
    for (double& x : v.values) x *= amp;
    if (u.has_slopes()) {
        v.slopes = u.slopes;
        for (double& d : v.slopes) d *= amp / stretch;
    }
    v.boundary_derivative = u.boundary_derivative * amp / stretch;
    return v;
}

double sup_distance(const RadialProfile& v, const RadialProfile& Z) {
    double worst = 0.0;
    const auto nodes = v.grid->nodes();
    for (std::size_t i = 0; i < nodes.size(); ++i) worst = std::max(worst, std::abs(v.values[i] - Z.evaluate(nodes[i])));
    return worst;
}

}  // namespace nlsball
