#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "nlsball/branch.hpp"

namespace nlsball {

/// Radial complex field with value 0 at r = 1.
struct ComplexField {
    GridPtr grid;
    std::vector<std::complex<double>> values;
    double time = 0.0;
};

/// Real profile times a unimodular constant.
ComplexField to_field(const RadialProfile& u, std::complex<double> phase = 1.0);

struct EvolutionRecord;

struct EvolveConfig {
    int nonlinearity_sign = 1;       ///< +1: i Phi_t + Delta Phi + |Phi|^{p-1} Phi = 0; -1 flips the last term
    double sample_interval = 0.1;    ///< time between history samples (rounded to whole steps)
    double inner_tolerance = 1e-10;  ///< fixed-point stop: max change <= tol max(1, sup|Phi|)
    int max_inner = 60;
    double sup_cap = 1e4;            ///< sup|Phi| above this raises BlowUpError
    RadialProfile reference;         ///< standing-wave profile for the orbit distance; empty grid: none
    std::function<void(const EvolutionRecord&)> on_sample;  ///< called after each history sample
};

struct EvolutionRecord {
    std::vector<double> times;
    std::vector<double> mass;            ///< int |Phi|^2
    std::vector<double> energy;          ///< 1/2 int |grad Phi|^2 - sign/(p+1) int |Phi|^{p+1}
    std::vector<double> orbit_distance;  ///< empty without a reference profile
    ComplexField final;
    long steps = 0;
    int max_inner_iterations = 0;
    double max_orbit_distance = 0.0;
};

/// int |Phi|^2 with the lumped mass.
double discrete_mass(const ComplexField& field);

/// Discrete energy consistent with the scheme.
double discrete_energy(const ComplexField& field, const ProblemParams& params, int nonlinearity_sign = 1);

/// min over s of ||grad (Phi - e^{-is} U)||_2, with the minimizing phase taken from the
/// H^1_0 inner product of Phi against U. Throws ParameterError unless both live on one grid.
double orbit_distance(const ComplexField& field, const RadialProfile& U);

/// Crank-Nicolson steps on the lumped P1 radial operator with the nonlinearity at the
/// midpoint (Phi^n + Phi^{n+1})/2, found by fixed-point iteration; the discrete mass is
/// conserved up to the inner tolerance. dt may be negative (backward in time); the run
/// covers |T| in steps of |dt|.
/// Throws ParameterError on bad input, StepSizeError when the inner iteration stalls,
/// BlowUpError when sup|Phi| exceeds the cap.
EvolutionRecord evolve(const ComplexField& initial, const ProblemParams& params, double dt, double T,
                       const EvolveConfig& config = {});

/// Stationary point of the spatial discretization, K V + lambda M V = M |V|^{p-1} V, found by
/// Newton's method from U (same grid, Dirichlet at r = 1).
RadialProfile discrete_standing_wave(const RadialProfile& U, double lambda, const ProblemParams& params);

/// Standing wave U = mu^{1/(p-1)} u of a focusing branch point, polished to the discrete one.
RadialProfile standing_wave(const BranchPoint& point);

/// Evolves Phi_0 = U + delta U/||U|| + i delta phi_1/||phi_1|| (norms in H^1_0, so both
/// perturbations have size delta in the orbit-distance metric) and records the distance to U.
EvolutionRecord stability_probe(const BranchPoint& point, double delta, double T, double dt,
                                EvolveConfig config = {});

}  // namespace nlsball
