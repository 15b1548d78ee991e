#pragma once

#include <string>
#include <vector>

#include "nlsball/core.hpp"
#include "nlsball/shoot.hpp"

namespace nlsball {

enum class Stability { stable, unstable, boundary, unknown };

const char* to_string(Stability s);

/// One normalized solution (u, mu, lambda) with int u^2 = 1.
struct BranchPoint {
    ProblemParams params;
    int sign = 1;             ///< +1 on the focusing branch, -1 on the defocusing one
    double alpha = 0.0;       ///< int |grad u|^2
    double lambda = 0.0;
    double mu = 0.0;
    double M_alpha = 0.0;     ///< int u^{p+1}
    double ur1 = 0.0;         ///< u'(1)
    double rho = 0.0;         ///< mu^{2/(p-1)}; NaN off the focusing branch
    double energy = 0.0;      ///< rho (alpha/2 - mu M_alpha/(p+1)); NaN off the focusing branch
    double raw_center = 0.0;  ///< center value of the unnormalized profile, reused as a warm start
    RadialProfile profile;
    Stability stability = Stability::unknown;

    /// (alpha + lambda - mu M_alpha) / max(|alpha|, |lambda|, |mu M_alpha|).
    double multiplier_residual() const;
};

/// du/d(alpha) and the scalar derivatives at one branch point.
struct BranchDerivative {
    RadialProfile v;
    double mu_prime = 0.0;
    double lambda_prime = 0.0;
    double M_prime = 0.0;
    double vr1 = 0.0;
    double step = 0.0;  ///< largest alpha spacing in the stencil
};

struct Branch {
    ProblemParams params;
    int sign = 1;
    std::vector<BranchPoint> points;             ///< ascending alpha
    std::vector<BranchDerivative> derivatives;   ///< one per point, same order
    ShootConfig config;
    GridPtr grid;
    bool partial = false;
    std::string failure;                         ///< diagnostics of the solve that stopped the trace
    double failed_lambda = 0.0;
};

/// u = R / ||R||, mu = sign ||R||^{p-1}; throws DegenerateInputError for a zero profile.
BranchPoint normalize(const RadialProfile& R, double lambda, int mu_sign, const ProblemParams& params);

/// Shoot and normalize at one lambda.
BranchPoint point_at_lambda(const ProblemParams& params, double lambda, int sign,
                            const ShootConfig& config = {}, GridPtr grid = nullptr);

/// Lambda values for a trace: lambda = -lambda_1 + sign * d with d log-spaced on [d_min, d_max],
/// returned ascending.
std::vector<double> log_lambda_grid(const ProblemParams& params, int sign, double d_min, double d_max,
                                    int count);

/// Solves at every lambda with warm starts and sorts by alpha. A failing solve ends the trace
/// with `partial` set; derivatives are filled when at least three points exist.
Branch trace(const ProblemParams& params, const std::vector<double>& lambda_grid, int sign,
             const ShootConfig& config = {});

/// Derivatives in alpha: five-point Lagrange differences in lambda (three-point on short
/// branches), centered inside and one-sided at the ends, divided by d(alpha)/d(lambda).
void estimate_derivatives(Branch& branch);

struct MuStar {
    double mu_star = 0.0;
    double alpha_star = 0.0;
    double rho_star = 0.0;   ///< (mu*)^{2/(p-1)}
    double lambda_star = 0.0;
    double alpha_width = 0.0;  ///< final bracket width in alpha
    int solves = 0;
};

/// Golden-section search on lambda around the largest interior mu, with fresh solves.
/// Throws RangeError when mu has no interior maximum on the branch.
MuStar find_mu_star(const Branch& branch, double alpha_rel_tol = 1e-5);

/// Point where alpha equals the target, by root finding on lambda between bracketing points.
BranchPoint point_at_alpha(const Branch& branch, double alpha);

/// First point along the branch (ascending alpha) where mu equals the target, refined by root
/// finding on lambda. Throws RangeError when the traced window does not reach it.
BranchPoint point_at_mu(const Branch& branch, double mu);

/// All crossings of mu = rho^{(p-1)/2} along a focusing branch, refined by fresh solves.
std::vector<BranchPoint> solutions_at_mass(const Branch& branch, double rho);

/// Minimum-energy point among solutions_at_mass; NoSolutionError when there is none.
BranchPoint least_energy_at_mass(const Branch& branch, double rho);

/// Tags each point from the sign of mu': stable when alpha mu' / mu > band, unstable below -band,
/// boundary in between. Defocusing points stay unknown.
Branch classify_stability(Branch branch, double band = 1e-3);

/// J_{mu,lambda}(u) = alpha/2 + lambda/2 - mu M_alpha/(p+1).
double action_value(const BranchPoint& point, double mu, double lambda);

}  // namespace nlsball
