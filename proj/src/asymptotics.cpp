#include "nlsball/asymptotics.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>

#include "nlsball/errors.hpp"

namespace nlsball {

APExpansion solve_psi(const ProblemParams& params, const EigenPair& eig) {
    const GridPtr& grid = eig.phi1.grid;
    if (!grid || grid->dimension() != params.N) throw ParameterError("eigenpair grid does not match params");
    const std::size_t n = grid->size() - 1;  // unknowns on nodes 0..n-1, psi(R) = 0
    const auto c = grid->stiffness();
    const auto m = grid->lumped();
    const auto w = grid->weights();
    const auto& phi = eig.phi1.values;
    const double p = params.p;
    const double lambda = eig.lambda1_discrete;

    APExpansion out;
    out.params = params;
    out.eig = eig;
    out.c_p1 = integrate(eig.phi1, [p](double v) { return std::pow(v, p + 1.0); });

    // [K - lambda M, M phi; (W phi)^T, 0] [psi; ell] = [M f; 0].
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(5 * n + 1);
    Eigen::VectorXd rhs(n + 1);
    for (std::size_t i = 0; i < n; ++i) {
        const auto k = static_cast<Eigen::Index>(i);
        entries.emplace_back(k, k, (i > 0 ? c[i - 1] : 0.0) + c[i] - lambda * m[i]);
        if (i + 1 < n) {
            entries.emplace_back(k, k + 1, -c[i]);
            entries.emplace_back(k + 1, k, -c[i]);
        }
        entries.emplace_back(k, static_cast<Eigen::Index>(n), m[i] * phi[i]);
        entries.emplace_back(static_cast<Eigen::Index>(n), k, w[i] * phi[i]);
        rhs[k] = m[i] * (std::pow(phi[i], p) - out.c_p1 * phi[i]);
    }
    rhs[static_cast<Eigen::Index>(n)] = 0.0;
    Eigen::SparseMatrix<double> A(n + 1, n + 1);
    A.setFromTriplets(entries.begin(), entries.end());
    A.makeCompressed();

    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(A);
    if (lu.info() != Eigen::Success) throw ResolutionError("bordered psi system is singular: " + lu.lastErrorMessage());
    const Eigen::VectorXd x = lu.solve(rhs);
    if (lu.info() != Eigen::Success || !x.allFinite()) throw ResolutionError("bordered psi solve failed");
    out.residual = (A * x - rhs).lpNorm<Eigen::Infinity>() / std::max(rhs.lpNorm<Eigen::Infinity>(), 1e-300);
    if (!(out.residual < 1e-8)) {
        throw ResolutionError("bordered psi system is ill-conditioned: relative residual " + std::to_string(out.residual));
    }

    out.psi = zero_profile(grid);
    for (std::size_t i = 0; i < n; ++i) out.psi.values[i] = x[static_cast<Eigen::Index>(i)];
    out.psi.boundary_derivative = nodal_slopes(out.psi).back();
    out.multiplier = x[static_cast<Eigen::Index>(n)];
    std::vector<double> f(grid->size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::pow(phi[i], p) * out.psi.values[i];
    out.c_ps = integrate_values(*grid, f);
    return out;
}

APPrediction ap_predict(const APExpansion& exp, double epsilon, int sign) {
    if (!(epsilon > 0.0)) throw ParameterError("epsilon must be positive");
    if (sign != 1 && sign != -1) throw ParameterError("sign must be +1 or -1");
    if (!(exp.c_ps > 0.0)) throw DomainError("c_ps must be positive");
    APPrediction out;
    out.t = sign * std::sqrt(epsilon / exp.c_ps);
    out.mu = out.t;
    out.lambda = -exp.eig.lambda1 + out.t * exp.c_p1;
    out.u = exp.eig.phi1;
    for (std::size_t i = 0; i < out.u.size(); ++i) out.u.values[i] += out.t * exp.psi.values[i];
    out.u.slopes.clear();
    out.u.boundary_derivative = exp.eig.phi1.boundary_derivative + out.t * exp.psi.boundary_derivative;
    return out;
}

double alpha_over_lambda_limit(const ProblemParams& params) {
    const double N = params.N, p = params.p;
    return N * (p - 1.0) / (N + 2.0 - p * (N - 2.0));
}

LargeAlphaDiagnostics large_alpha_diagnostics(const BranchPoint& point, const WholeSpaceGroundState& Z) {
    if (point.sign != 1) throw ScopeError("large-alpha laws concern the focusing branch");
    if (!(point.lambda > 0.0)) throw NotAsymptoticError("large-alpha diagnostics need lambda > 0");
    const ProblemParams& params = point.params;
    if (Z.params.N != params.N || Z.params.p != params.p) throw ParameterError("Z does not match the branch parameters");
    const double p = params.p;
    LargeAlphaDiagnostics d;
    d.ratio = point.alpha / point.lambda;
    d.ratio_target = alpha_over_lambda_limit(params);
    d.ratio_err = std::abs(d.ratio / d.ratio_target - 1.0);
    d.mass_scaled = std::pow(point.mu, 2.0 / (p - 1.0)) * std::pow(point.lambda, 0.5 * params.N - 2.0 / (p - 1.0));
    d.mu_limit_err = std::abs(d.mass_scaled / Z.mass - 1.0);
    d.profile_err = sup_distance(rescaled_profile(point.profile, point.lambda, point.mu, params), Z.profile);
    return d;
}

GNResult gn_constant(const WholeSpaceGroundState& Z) {
    const double N = Z.params.N, p = Z.params.p;
    GNResult g;
    g.grad_exponent = 0.5 * N * (p - 1.0);
    g.mass_exponent = p + 1.0 - g.grad_exponent;
    g.C_Np = Z.lp1_norm / (std::pow(Z.mass, 0.5 * g.mass_exponent) * std::pow(Z.grad_energy, 0.5 * g.grad_exponent));
    return g;
}

std::vector<double> gn_ratios(const Branch& branch) {
    const double e = 0.25 * branch.params.N * (branch.params.p - 1.0);
    std::vector<double> out;
    out.reserve(branch.points.size());
    for (const auto& pt : branch.points) out.push_back(pt.M_alpha / std::pow(pt.alpha, e));
    return out;
}

DefocusingDiagnostics defocusing_diagnostics(const BranchPoint& point) {
    if (point.sign != -1) throw ScopeError("defocusing diagnostics need a point on the defocusing branch");
    const double volume = ball_volume(point.params.N);
    DefocusingDiagnostics d;
    d.lambda_over_mu = point.lambda / point.mu;
    d.lambda_over_mu_target = std::pow(volume, -0.5 * (point.params.p - 1.0));
    d.lambda_over_mu_err = std::abs(d.lambda_over_mu - d.lambda_over_mu_target);
    d.lambda_over_mu_rel = d.lambda_over_mu_err / d.lambda_over_mu_target;
    d.alpha_over_lambda = std::abs(point.alpha / point.lambda);
    d.plateau = point.profile.center();
    d.plateau_target = 1.0 / std::sqrt(volume);
    d.plateau_err = std::abs(d.plateau - d.plateau_target);
    return d;
}

}  // namespace nlsball
