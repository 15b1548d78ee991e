#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace nlsball {

/// Position of the exponent relative to the mass-critical value 1 + 4/N.
enum class Regime { subcritical, L2critical, supercritical };

const char* to_string(Regime regime);

/// Dimension and exponent of the power nonlinearity.
struct ProblemParams {
    int N = 1;
    double p = 3.0;
    Regime regime = Regime::subcritical;
    double sobolev_limit = 0.0;  ///< (N+2)/(N-2), or +inf when N <= 2

    double critical_exponent() const { return 1.0 + 4.0 / N; }
};

/// Validates 1 < p < sobolev_limit and classifies the regime.
ProblemParams make_params(int N, double p);

/// |dB_1| = 2 pi^{N/2} / Gamma(N/2).
double sphere_area(int N);
/// |B_1| = |dB_1| / N.
double ball_volume(int N);

/// Radial nodes on [0, R] with r^{N-1}-weighted quadrature.
///
/// Three families of weights are stored:
///  - `weights`: product-Simpson rule for the integral of f(r) r^{N-1} over [0, R], exact for
///    piecewise quadratic f (a trapezoid panel is used at the origin when the Simpson panel would
///    produce a negative weight, which happens for N >= 3);
///  - `lumped`: integral of each hat function against r^{N-1} (the lumped P1 mass matrix);
///  - `stiffness`: per-cell integral of r^{N-1} divided by the squared cell width.
/// None of them carries the surface factor omega; callers multiply by it.
class RadialGrid {
public:
    RadialGrid(int N, std::vector<double> nodes);

    int dimension() const { return N_; }
    double radius() const { return nodes_.back(); }
    double omega() const { return omega_; }
    std::size_t size() const { return nodes_.size(); }
    std::size_t cells() const { return nodes_.size() - 1; }

    std::span<const double> nodes() const { return nodes_; }
    std::span<const double> weights() const { return weights_; }
    std::span<const double> lumped() const { return lumped_; }
    std::span<const double> stiffness() const { return stiffness_; }

    double node(std::size_t i) const { return nodes_[i]; }
    bool uniform() const { return uniform_; }

private:
    int N_;
    double omega_;
    bool uniform_;
    std::vector<double> nodes_;
    std::vector<double> weights_;
    std::vector<double> lumped_;
    std::vector<double> stiffness_;
};

using GridPtr = std::shared_ptr<const RadialGrid>;

struct GridOptions {
    /// r_i = R (i/n)^grading; 1 gives a uniform grid, values > 1 cluster nodes near the origin.
    double grading = 1.0;
};

GridPtr make_grid(const ProblemParams& params, int n_nodes, double R, GridOptions options = {});

/// Radial function sampled on a grid. `slopes` is either empty or holds u'(r_i) exactly
/// (as produced by an ODE integrator); otherwise derivatives come from finite differences.
struct RadialProfile {
    GridPtr grid;
    std::vector<double> values;
    std::vector<double> slopes;
    double boundary_derivative = 0.0;

    std::size_t size() const { return values.size(); }
    bool has_slopes() const { return !slopes.empty(); }
    double center() const { return values.front(); }

    /// Cubic Hermite interpolation (linear when out of range returns 0).
    double evaluate(double r) const;
};

RadialProfile zero_profile(GridPtr grid);

/// u'(r_i): stored slopes when present, else second-order finite differences
/// (zero at the origin by symmetry, one-sided at the outer end).
std::vector<double> nodal_slopes(const RadialProfile& u);

/// omega * sum_i w_i f_i.
double integrate_values(const RadialGrid& grid, std::span<const double> f);

/// omega * int_0^R g(u(r)) r^{N-1} dr.
template <class Transform>
double integrate(const RadialProfile& u, Transform&& g) {
    const auto w = u.grid->weights();
    double sum = 0.0;
    for (std::size_t i = 0; i < u.values.size(); ++i) sum += w[i] * g(u.values[i]);
    return u.grid->omega() * sum;
}

/// int u v dx.
double inner(const RadialProfile& u, const RadialProfile& v);

/// int |grad u|^2 dx.
double grad_norm_sq(const RadialProfile& u);

/// int grad u . grad v dx.
double grad_inner(const RadialProfile& u, const RadialProfile& v);

/// Principal Dirichlet eigenpair of -Delta on radial functions.
struct EigenPair {
    double lambda1 = 0.0;           ///< refinement-extrapolated eigenvalue
    double lambda1_discrete = 0.0;  ///< eigenvalue of the discrete operator that produced phi1
    RadialProfile phi1;             ///< positive, L2-normalized in the N-dimensional measure
    int iterations = 0;
};

/// Lowest eigenpair of the lumped P1 radial Laplacian (symmetry at 0, Dirichlet at R) by
/// shifted inverse iteration. When the grid has an even number of cells the eigenvalue is
/// Richardson-extrapolated against the every-other-node subgrid.
EigenPair principal_eigenpair(const ProblemParams& params, const GridPtr& grid);

/// lambda_1(B_1) for dimension N, computed once per N on a fine grid and cached.
double ball_lambda1(int N);

}  // namespace nlsball
