#pragma once

#include <vector>

#include "nlsball/branch.hpp"

namespace nlsball {

/// Residual of lambda = (2/N)((p+1)/(p-1)) alpha - alpha - (omega/N)((p+1)/(p-1)) u_r(1)^2,
/// divided by max(1, |lambda|).
double pohozaev_residual(const BranchPoint& point);

/// Identity residuals at one branch point.
struct IdentityRecord {
    double alpha = 0.0;
    bool centered = false;            ///< derivative stencil has two points on each side
    double step = 0.0;                ///< largest alpha spacing in the stencil
    double pohozaev_res = 0.0;
    double multiplier_res = 0.0;
    double uv_res = 0.0;              ///< int u v
    double grad_uv_res = 0.0;         ///< int grad u . grad v - 1/2
    double upv_res = 0.0;             ///< mu int u^p v - 1/2
    double mu_prime_identity_res = 0.0;  ///< (mu' M - lambda' + (p-1)/2) / max(|mu' M|, |lambda'|, (p-1)/2)
    double M_prime_res = 0.0;         ///< M' (2 mu / (p+1)) - 1
    double flux_res = 0.0;            ///< see boundary_flux_check
};

struct IdentityReport {
    std::vector<IdentityRecord> points;  ///< same order as the branch
    double max_step = 0.0;               ///< largest alpha spacing used by any stencil
};

/// Residuals of the branch identities with the derivative estimates stored on the branch
/// (recomputed when missing). Throws SizeError for fewer than three points.
IdentityReport derivative_identities(const Branch& branch);

struct FluxRecord {
    double alpha = 0.0;
    double mu_prime_M = 0.0;  ///< mu' M_alpha
    double bracket = 0.0;     ///< (4/N - p + 1) - (4 omega/N) u_r(1) v_r(1)
    double predicted = 0.0;   ///< (p+1)/(2(p-1)) bracket
    double residual = 0.0;    ///< (mu_prime_M - predicted) / max(|mu_prime_M|, |predicted|, (p-1)/2)
};

/// mu' M_alpha against the boundary-flux formula at every branch point.
std::vector<FluxRecord> boundary_flux_check(const Branch& branch);

struct SectorSpectrum {
    int ell = 0;
    int multiplicity = 1;              ///< number of independent harmonics of degree ell
    std::vector<double> eigenvalues;   ///< lowest ones, ascending
    int negative_count = 0;            ///< eigenvalues < 0 in this sector (without multiplicity)
};

struct SpectrumReport {
    std::vector<SectorSpectrum> sectors;
    int radial_negative = 0;           ///< negative_count of ell = 0
    int total_negative = 0;            ///< sum of negative_count * multiplicity
    double min_abs_eigenvalue = 0.0;   ///< nondegeneracy gap over all sectors
};

/// Lowest `count` eigenvalues per sector of L_ell = -d_rr - ((N-1)/r) d_r + ell(ell+N-2)/r^2
/// + lambda - p mu |u|^{p-1} with Dirichlet data at r = 1 and regular behaviour r^ell at 0.
/// Eigenvalues come from Sturm counting: the number of eigenvalues below E equals the number
/// of zeros in (0, 1) of the regular solution of (L_ell - E) w = 0, found by shooting.
/// For N = 1 the sectors are the even (ell = 0) and odd (ell = 1) functions only.
SpectrumReport linearized_spectrum(const BranchPoint& point, int l_max = 3, int count = 4);

}  // namespace nlsball
