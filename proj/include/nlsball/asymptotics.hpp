#pragma once

#include <vector>

#include "nlsball/branch.hpp"
#include "nlsball/core.hpp"
#include "nlsball/shoot.hpp"

namespace nlsball {

/// Second-order data of the bifurcation from (phi_1, 0, -lambda_1).
struct APExpansion {
    ProblemParams params;
    EigenPair eig;
    RadialProfile psi;          ///< -Delta psi - lambda_1 psi = phi_1^p - c_p1 phi_1, int psi phi_1 = 0
    double c_ps = 0.0;          ///< int phi_1^p psi
    double c_p1 = 0.0;          ///< int phi_1^{p+1}
    double multiplier = 0.0;    ///< border unknown of the augmented system (vanishes in exact arithmetic)
    double residual = 0.0;      ///< max-norm residual of the augmented system, relative to its right side
};

/// Bordered solve of the singular equation for psi on the grid of eig.phi1, with the
/// discrete operator of principal_eigenpair. Throws ResolutionError when the augmented
/// system is numerically singular.
APExpansion solve_psi(const ProblemParams& params, const EigenPair& eig);

struct APPrediction {
    double t = 0.0;       ///< sign sqrt(epsilon / c_ps)
    double mu = 0.0;      ///< t
    double lambda = 0.0;  ///< -lambda_1 + t c_p1
    RadialProfile u;      ///< phi_1 + t psi
};

/// Branch point predicted at alpha = lambda_1 + epsilon on S+ (sign = +1) or S- (sign = -1).
APPrediction ap_predict(const APExpansion& exp, double epsilon, int sign);

struct LargeAlphaDiagnostics {
    double ratio = 0.0;         ///< alpha / lambda
    double ratio_target = 0.0;  ///< N(p-1) / (N+2-p(N-2))
    double ratio_err = 0.0;     ///< relative
    double mass_scaled = 0.0;   ///< mu^{2/(p-1)} lambda^{N/2 - 2/(p-1)}
    double mu_limit_err = 0.0;  ///< relative to mass(Z)
    double profile_err = 0.0;   ///< sup distance between the rescaled profile and Z
};

/// Comparison of a focusing branch point with the whole-space ground state.
/// Throws NotAsymptoticError for lambda <= 0 and ScopeError off the focusing branch.
LargeAlphaDiagnostics large_alpha_diagnostics(const BranchPoint& point, const WholeSpaceGroundState& Z);

/// alpha / lambda in the large-alpha limit.
double alpha_over_lambda_limit(const ProblemParams& params);

struct GNResult {
    double C_Np = 0.0;
    double mass_exponent = 0.0;  ///< p + 1 - N(p-1)/2, the power of ||u||_2
    double grad_exponent = 0.0;  ///< N(p-1)/2, the power of ||grad u||_2
};

/// Sharp Gagliardo-Nirenberg constant as the quotient attained at Z.
GNResult gn_constant(const WholeSpaceGroundState& Z);

/// M_alpha / alpha^{N(p-1)/4} at every branch point (the Gagliardo-Nirenberg quotient of a
/// normalized profile).
std::vector<double> gn_ratios(const Branch& branch);

struct DefocusingDiagnostics {
    double lambda_over_mu = 0.0;
    double lambda_over_mu_target = 0.0;  ///< |B_1|^{-(p-1)/2}
    double lambda_over_mu_err = 0.0;     ///< |lambda/mu - lambda_over_mu_target|
    double lambda_over_mu_rel = 0.0;     ///< lambda_over_mu_err / lambda_over_mu_target
    double alpha_over_lambda = 0.0;      ///< |alpha / lambda|
    double plateau = 0.0;                ///< u(0)
    double plateau_target = 0.0;         ///< |B_1|^{-1/2}
    double plateau_err = 0.0;            ///< |u(0) - plateau_target|
};

/// Distance of a defocusing point from its large-|mu| limit; ScopeError for focusing input.
DefocusingDiagnostics defocusing_diagnostics(const BranchPoint& point);

}  // namespace nlsball
