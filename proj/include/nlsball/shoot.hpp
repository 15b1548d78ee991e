#pragma once

#include "nlsball/core.hpp"
#include "nlsball/ode.hpp"

namespace nlsball {

struct ShootConfig {
    double ode_tolerance = 1e-10;        ///< relative local error of the Runge-Kutta steps
    double bisection_tolerance = 1e-15;  ///< relative width at which bisection on a = u(0) stops
    int max_bisections = 200;
    int n_nodes = 2049;                  ///< sampling grid for ball profiles
    double grading = 0.0;                ///< node grading; 0 picks 2 for focusing balls and 1 otherwise
    double initial_guess = 0.0;          ///< warm-start center value; 0 means none
};

/// Throws ParameterError unless tolerances are positive and max_bisections >= 40.
void validate(const ShootConfig& config);

/// Grading used for a ball grid with the given multiplier sign.
double ball_grading(const ShootConfig& config, int mu_sign);

/// Ball solve with the diagnostics of the shooting run.
struct BallSolution {
    RadialProfile profile;
    double lambda = 0.0;
    int mu_sign = 1;
    int bisections = 0;
    double bracket_width = 0.0;  ///< final width of the bracket on the shooting parameter
    bool grafted = false;        ///< true when the outer part was rebuilt past a divergence radius
    double cut_radius = 1.0;     ///< radius where the bisection trajectories stop being trusted
    double slope_jump = 0.0;     ///< relative derivative mismatch at the cut
};

/// Positive radial Dirichlet solution of -u'' - ((N-1)/r)u' + lambda u = mu_sign u^p on [0, 1].
///
/// Focusing (mu_sign = +1) needs lambda > -lambda_1, defocusing (mu_sign = -1) lambda < -lambda_1.
/// The center value is bisected between crossing and non-crossing trajectories. When the two
/// final trajectories separate before r = 1 (large |lambda|), the profile is kept up to the last
/// radius where they agree and completed by an inward shot from r = 1 (focusing) or by the
/// linearized plateau (defocusing).
BallSolution shoot_ball(const ProblemParams& params, double lambda, int mu_sign,
                        const ShootConfig& config = {}, GridPtr grid = nullptr);

RadialProfile solve_ball_profile(const ProblemParams& params, double lambda, int mu_sign,
                                 const ShootConfig& config = {});

/// Max over cells of the one-step defect: each node state (u_i, u'_i) is integrated to the next
/// node with a tight tolerance and compared with (u_{i+1}), relative to max|u|.
double ode_residual(const RadialProfile& u, const ProblemParams& params, double lambda, double mu);

/// Decaying ground state Z of -Z'' - ((N-1)/r)Z' + Z = Z^p on [0, R_max].
struct WholeSpaceGroundState {
    ProblemParams params;
    RadialProfile profile;
    double mass = 0.0;         ///< int Z^2
    double grad_energy = 0.0;  ///< int |grad Z|^2
    double lp1_norm = 0.0;     ///< int Z^{p+1}
    double center_value = 0.0;
    double cut_radius = 0.0;   ///< start of the analytic tail
    int bisections = 0;
    double bracket_width = 0.0;

    /// (grad_energy + mass - lp1_norm) / lp1_norm.
    double nehari_residual() const;
    /// grad_energy / mass relative to N(p-1)/(N+2-p(N-2)), minus one.
    double ratio_residual() const;
};

/// N(p-1) / (N + 2 - p(N-2)).
double pohozaev_ratio(const ProblemParams& params);

/// Needs exp(-R_max) < 1e-8. Beyond the last radius where the bisection trajectories agree the
/// profile is the decaying solution c r^{-nu} K_nu(r), nu = (N-2)/2, of the linearized equation.
WholeSpaceGroundState solve_whole_space(const ProblemParams& params, double R_max = 40.0,
                                        const ShootConfig& config = {});

/// v(y) = (mu/lambda)^{1/(p-1)} u(y / sqrt(lambda)) on the image grid of radius sqrt(lambda).
RadialProfile rescaled_profile(const RadialProfile& u, double lambda, double mu,
                               const ProblemParams& params);

/// max_i |v(y_i) - Z(y_i)| over the nodes of v (Z taken as 0 beyond its grid).
double sup_distance(const RadialProfile& v, const RadialProfile& Z);

}  // namespace nlsball
