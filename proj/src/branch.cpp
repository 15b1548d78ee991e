#include "nlsball/branch.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "nlsball/errors.hpp"

namespace nlsball {

const char* to_string(Stability s) {
    switch (s) {
        case Stability::stable: return "stable";
        case Stability::unstable: return "unstable";
        case Stability::boundary: return "boundary";
        case Stability::unknown: return "unknown";
    }
    return "unknown";
}

double BranchPoint::multiplier_residual() const {
    const double rhs = mu * M_alpha;
    const double scale = std::max({std::abs(alpha), std::abs(lambda), std::abs(rhs)});
    return (alpha + lambda - rhs) / scale;
}

BranchPoint normalize(const RadialProfile& R, double lambda, int mu_sign, const ProblemParams& params) {
    if (mu_sign != 1 && mu_sign != -1) throw ParameterError("mu_sign must be +1 or -1");
    const double mass = integrate(R, [](double v) { return v * v; });
    if (!(mass > 0.0) || !std::isfinite(mass)) throw DegenerateInputError("cannot normalize a zero profile");
    const double norm = std::sqrt(mass);
    BranchPoint pt;
    pt.params = params;
    pt.sign = mu_sign;
    pt.lambda = lambda;
    pt.raw_center = R.center();
    pt.profile = R;
    for (double& v : pt.profile.values) v /= norm;
    for (double& d : pt.profile.slopes) d /= norm;
    pt.profile.boundary_derivative = R.boundary_derivative / norm;
    pt.ur1 = pt.profile.boundary_derivative;
    pt.mu = mu_sign * std::pow(norm, params.p - 1.0);
    pt.alpha = grad_norm_sq(pt.profile);
    const double p1 = params.p + 1.0;
    pt.M_alpha = integrate(pt.profile, [p1](double v) { return std::pow(std::abs(v), p1); });
    if (mu_sign == 1) {
        pt.rho = std::pow(pt.mu, 2.0 / (params.p - 1.0));
        pt.energy = pt.rho * (0.5 * pt.alpha - pt.mu * pt.M_alpha / p1);
    } else {
        pt.rho = std::numeric_limits<double>::quiet_NaN();
        pt.energy = std::numeric_limits<double>::quiet_NaN();
    }
    return pt;
}

BranchPoint point_at_lambda(const ProblemParams& params, double lambda, int sign, const ShootConfig& config,
                            GridPtr grid) {
    const BallSolution sol = shoot_ball(params, lambda, sign, config, std::move(grid));
    return normalize(sol.profile, lambda, sign, params);
}

std::vector<double> log_lambda_grid(const ProblemParams& params, int sign, double d_min, double d_max, int count) {
    if (sign != 1 && sign != -1) throw ParameterError("sign must be +1 or -1");
    if (!(d_min > 0.0) || !(d_max > d_min) || count < 2) {
        throw ParameterError("lambda grid needs 0 < d_min < d_max and count >= 2");
    }
    const double lambda1 = ball_lambda1(params.N);
    std::vector<double> out(count);
    for (int i = 0; i < count; ++i) {
        const double d = d_min * std::pow(d_max / d_min, static_cast<double>(i) / (count - 1));
        out[i] = -lambda1 + sign * d;
    }
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

// Derivative at x of the quadratic through (x[0], f[0]), (x[1], f[1]), (x[2], f[2]).
// Derivative at `at` of the Lagrange interpolant through x, as weights on the sampled values.
std::vector<double> lagrange_derivative_weights(const std::vector<double>& x, double at) {
    const std::size_t m = x.size();
    std::vector<double> w(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        double denom = 1.0;
        for (std::size_t k = 0; k < m; ++k) {
            if (k != i) denom *= x[i] - x[k];
        }
        double sum = 0.0;
        for (std::size_t l = 0; l < m; ++l) {
            if (l == i) continue;
            double prod = 1.0;
            for (std::size_t k = 0; k < m; ++k) {
                if (k != i && k != l) prod *= at - x[k];
            }
            sum += prod;
        }
        w[i] = sum / denom;
    }
    return w;
}

ShootConfig warm(const ShootConfig& config, double guess) {
    ShootConfig c = config;
    c.initial_guess = guess;
    return c;
}

// Illinois root finding on lambda for g(point) = 0 between two points with opposite signs.
BranchPoint refine_on_lambda(const Branch& branch, const BranchPoint& a, const BranchPoint& b,
                             const std::function<double(const BranchPoint&)>& g, double rel_tol) {
    BranchPoint lo = a, hi = b;
    double glo = g(lo), ghi = g(hi);
    if (glo == 0.0) return lo;
    if (ghi == 0.0) return hi;
    if ((glo > 0) == (ghi > 0)) throw SolverError("refinement bracket has no sign change");
    int side = 0;
    BranchPoint best = std::abs(glo) < std::abs(ghi) ? lo : hi;
    for (int it = 0; it < 100; ++it) {
        double lam = (lo.lambda * ghi - hi.lambda * glo) / (ghi - glo);
        if (!(lam > std::min(lo.lambda, hi.lambda) && lam < std::max(lo.lambda, hi.lambda))) {
            lam = 0.5 * (lo.lambda + hi.lambda);
        }
        const double guess = 0.5 * (lo.raw_center + hi.raw_center);
        BranchPoint mid = point_at_lambda(branch.params, lam, branch.sign, warm(branch.config, guess), branch.grid);
        const double gm = g(mid);
        best = mid;
        if (std::abs(gm) <= rel_tol || std::abs(hi.lambda - lo.lambda) <= 1e-14 * std::max(1.0, std::abs(lam))) {
            return best;
        }
        if ((gm > 0) == (glo > 0)) {
            lo = mid;
            glo = gm;
            if (side == -1) ghi *= 0.5;
            side = -1;
        } else {
            hi = mid;
            ghi = gm;
            if (side == 1) glo *= 0.5;
            side = 1;
        }
    }
    return best;
}

}  // namespace

Branch trace(const ProblemParams& params, const std::vector<double>& lambda_grid, int sign, const ShootConfig& config) {
    validate(config);
    if (sign != 1 && sign != -1) throw ParameterError("sign must be +1 or -1");
    if (lambda_grid.empty()) throw ParameterError("empty lambda grid");
    for (std::size_t i = 1; i < lambda_grid.size(); ++i) {
        if (!(lambda_grid[i] > lambda_grid[i - 1])) throw ParameterError("lambda grid must be strictly ascending");
    }
    const double lambda1 = ball_lambda1(params.N);
    for (double l : lambda_grid) {
        if (sign == 1 ? !(l > -lambda1) : !(l < -lambda1)) {
            throw DomainError("lambda = " + std::to_string(l) + " outside the admissible range for this branch");
        }
    }

    Branch branch;
    branch.params = params;
    branch.sign = sign;
    branch.config = config;
    branch.grid = make_grid(params, config.n_nodes, 1.0, {ball_grading(config, sign)});

    // Continue away from -lambda_1, where solutions are small and the cold start is reliable.
    std::vector<double> order = lambda_grid;
    if (sign == -1) std::reverse(order.begin(), order.end());
    double guess = config.initial_guess;
    for (double lambda : order) {
        try {
            BranchPoint pt = point_at_lambda(params, lambda, sign, warm(config, guess), branch.grid);
            guess = pt.raw_center;
            branch.points.push_back(std::move(pt));
        } catch (const Error& e) {
            branch.partial = true;
            branch.failed_lambda = lambda;
            std::ostringstream msg;
            msg << "solve failed at lambda = " << lambda << ": " << e.what();
            branch.failure = msg.str();
            break;
        }
    }
    std::sort(branch.points.begin(), branch.points.end(),
              [](const BranchPoint& a, const BranchPoint& b) { return a.alpha < b.alpha; });
    if (branch.points.size() >= 3) estimate_derivatives(branch);
    return branch;
}

void estimate_derivatives(Branch& branch) {
    const auto& pts = branch.points;
    const std::size_t n = pts.size();
    if (n < 3) throw SizeError("derivative estimates need at least three branch points");
    const std::size_t width = n >= 5 ? 5 : 3;
    branch.derivatives.assign(n, {});
    // Stencil abscissa t = log(1 + d / lambda_1), d = sign (lambda + lambda_1): linear in d near
    // the bifurcation, logarithmic far from it.
    const double l1 = ball_lambda1(branch.params.N);
    auto t_of = [&](const BranchPoint& p) {
        const double d = branch.sign * (p.lambda + l1);
        return d > 0.0 ? std::log1p(d / l1) : std::numeric_limits<double>::quiet_NaN();
    };
    bool use_log = true;
    for (const auto& p : pts) use_log = use_log && std::isfinite(t_of(p));
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = std::min(i - std::min(i, width / 2), n - width);
        std::vector<double> x(width);
        for (std::size_t k = 0; k < width; ++k) x[k] = use_log ? t_of(pts[j + k]) : pts[j + k].lambda;
        const auto w = lagrange_derivative_weights(x, use_log ? t_of(pts[i]) : pts[i].lambda);
        auto d = [&](auto field) {
            double sum = 0.0;
            for (std::size_t k = 0; k < width; ++k) sum += w[k] * field(pts[j + k]);
            return sum;
        };
        const double alpha_dot = d([](const BranchPoint& p) { return p.alpha; });
        BranchDerivative& der = branch.derivatives[i];
        der.mu_prime = d([](const BranchPoint& p) { return p.mu; }) / alpha_dot;
        der.lambda_prime = d([](const BranchPoint& p) { return p.lambda; }) / alpha_dot;
        der.M_prime = d([](const BranchPoint& p) { return p.M_alpha; }) / alpha_dot;
        der.vr1 = d([](const BranchPoint& p) { return p.ur1; }) / alpha_dot;
        der.step = 0.0;
        for (std::size_t k = 0; k + 1 < width; ++k) {
            der.step = std::max(der.step, pts[j + k + 1].alpha - pts[j + k].alpha);
        }
        der.v.grid = pts[i].profile.grid;
        const std::size_t m = pts[i].profile.size();
        der.v.values.assign(m, 0.0);
        der.v.slopes.assign(m, 0.0);
        for (std::size_t k = 0; k < width; ++k) {
            const double wk = w[k] / alpha_dot;
            for (std::size_t q = 0; q < m; ++q) {
                der.v.values[q] += wk * pts[j + k].profile.values[q];
                der.v.slopes[q] += wk * pts[j + k].profile.slopes[q];
            }
        }
        der.v.boundary_derivative = der.vr1;
    }
}

MuStar find_mu_star(const Branch& branch, double alpha_rel_tol) {
    if (branch.sign != 1) throw ScopeError("mu* is defined on the focusing branch");
    const auto& pts = branch.points;
    if (pts.size() < 3) throw RangeError("branch too short to bracket a maximum of mu");
    std::size_t k = 0;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        if (pts[i].mu > pts[k].mu) k = i;
    }
    if (k == 0 || k + 1 == pts.size()) {
        throw RangeError("mu has no interior maximum on the traced window; sweep a wider lambda range");
    }
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    MuStar out;
    auto solve = [&](double lambda, double guess) {
        ++out.solves;
        return point_at_lambda(branch.params, lambda, 1, warm(branch.config, guess), branch.grid);
    };
    BranchPoint a = pts[k - 1], b = pts[k + 1];
    BranchPoint c = solve(b.lambda - g * (b.lambda - a.lambda), pts[k].raw_center);
    BranchPoint d = solve(a.lambda + g * (b.lambda - a.lambda), pts[k].raw_center);
    for (int it = 0; it < 200 && b.alpha - a.alpha > alpha_rel_tol * c.alpha; ++it) {
        if (c.mu > d.mu) {
            b = d;
            d = c;
            c = solve(b.lambda - g * (b.lambda - a.lambda), d.raw_center);
        } else {
            a = c;
            c = d;
            d = solve(a.lambda + g * (b.lambda - a.lambda), c.raw_center);
        }
    }
    const BranchPoint& best = c.mu > d.mu ? c : d;
    out.mu_star = best.mu;
    out.alpha_star = best.alpha;
    out.lambda_star = best.lambda;
    out.rho_star = std::pow(best.mu, 2.0 / (branch.params.p - 1.0));
    out.alpha_width = b.alpha - a.alpha;
    return out;
}

BranchPoint point_at_alpha(const Branch& branch, double alpha) {
    const auto& pts = branch.points;
    if (pts.empty() || !(alpha >= pts.front().alpha) || !(alpha <= pts.back().alpha)) {
        throw RangeError("alpha outside the traced window");
    }
    std::size_t i = 0;
    while (i + 1 < pts.size() && pts[i + 1].alpha < alpha) ++i;
    if (pts[i].alpha == alpha) return pts[i];
    return refine_on_lambda(branch, pts[i], pts[i + 1],
                            [alpha](const BranchPoint& p) { return (p.alpha - alpha) / alpha; }, 1e-12);
}

BranchPoint point_at_mu(const Branch& branch, double mu) {
    if (!(mu != 0.0) || !std::isfinite(mu)) throw ParameterError("target mu must be finite and nonzero");
    const auto& pts = branch.points;
    auto g = [mu](const BranchPoint& p) { return (p.mu - mu) / std::abs(mu); };
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (g(pts[i]) == 0.0) return pts[i];
        if (i + 1 < pts.size() && (g(pts[i]) > 0) != (g(pts[i + 1]) > 0)) {
            return refine_on_lambda(branch, pts[i], pts[i + 1], g, 1e-12);
        }
    }
    throw RangeError("mu = " + std::to_string(mu) + " is not reached on the traced window");
}

std::vector<BranchPoint> solutions_at_mass(const Branch& branch, double rho) {
    if (!(rho > 0.0)) throw ParameterError("prescribed mass must be positive");
    if (branch.sign != 1) throw ScopeError("prescribed-mass solutions live on the focusing branch");
    const double mu_bar = std::pow(rho, 0.5 * (branch.params.p - 1.0));
    auto g = [mu_bar](const BranchPoint& p) { return (p.mu - mu_bar) / mu_bar; };
    std::vector<BranchPoint> out;
    const auto& pts = branch.points;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double g0 = g(pts[i]), g1 = g(pts[i + 1]);
        if (g0 == 0.0) {
            out.push_back(pts[i]);
        } else if ((g0 > 0) != (g1 > 0) && g1 != 0.0) {
            out.push_back(refine_on_lambda(branch, pts[i], pts[i + 1], g, 1e-10));
        }
    }
    if (!pts.empty() && g(pts.back()) == 0.0) out.push_back(pts.back());
    return out;
}

BranchPoint least_energy_at_mass(const Branch& branch, double rho) {
    const auto candidates = solutions_at_mass(branch, rho);
    if (candidates.empty()) throw NoSolutionError("no branch point carries the prescribed mass");
    return *std::min_element(candidates.begin(), candidates.end(),
                             [](const BranchPoint& a, const BranchPoint& b) { return a.energy < b.energy; });
}

Branch classify_stability(Branch branch, double band) {
    if (branch.sign != 1 || branch.derivatives.size() != branch.points.size()) {
        for (auto& p : branch.points) p.stability = Stability::unknown;
        return branch;
    }
    for (std::size_t i = 0; i < branch.points.size(); ++i) {
        BranchPoint& p = branch.points[i];
        const double elasticity = branch.derivatives[i].mu_prime * p.alpha / p.mu;
        p.stability = elasticity > band ? Stability::stable
                                        : (elasticity < -band ? Stability::unstable : Stability::boundary);
    }
    return branch;
}

double action_value(const BranchPoint& point, double mu, double lambda) {
    return 0.5 * point.alpha + 0.5 * lambda - mu * point.M_alpha / (point.params.p + 1.0);
}

}  // namespace nlsball
