#include "nlsball/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nlsball/errors.hpp"
#include "nlsball/tridiag.hpp"

namespace nlsball {

using cplx = std::complex<double>;

ComplexField to_field(const RadialProfile& u, cplx phase) {
    ComplexField f;
    f.grid = u.grid;
    f.values.resize(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) f.values[i] = phase * u.values[i];
    return f;
}

double discrete_mass(const ComplexField& field) {
    const auto m = field.grid->lumped();
    double s = 0.0;
    for (std::size_t i = 0; i < field.values.size(); ++i) s += m[i] * std::norm(field.values[i]);
    return field.grid->omega() * s;
}

double discrete_energy(const ComplexField& field, const ProblemParams& params, int nonlinearity_sign) {
    const auto c = field.grid->stiffness();
    const auto m = field.grid->lumped();
    const auto& v = field.values;
    double grad = 0.0, pot = 0.0;
    for (std::size_t i = 0; i + 1 < v.size(); ++i) grad += c[i] * std::norm(v[i + 1] - v[i]);
    for (std::size_t i = 0; i < v.size(); ++i) pot += m[i] * std::pow(std::abs(v[i]), params.p + 1.0);
    return field.grid->omega() * (0.5 * grad - nonlinearity_sign * pot / (params.p + 1.0));
}

double orbit_distance(const ComplexField& field, const RadialProfile& U) {
    if (!field.grid || field.grid != U.grid || field.values.size() != U.size()) {
        throw ParameterError("orbit distance needs the field and the profile on one grid");
    }
    const auto c = field.grid->stiffness();
    const auto& v = field.values;
    cplx z = 0.0;
    for (std::size_t i = 0; i + 1 < v.size(); ++i) z += c[i] * (v[i + 1] - v[i]) * (U.values[i + 1] - U.values[i]);
    const cplx phase = std::abs(z) > 0.0 ? z / std::abs(z) : cplx(1.0);
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
        s += c[i] * std::norm(v[i + 1] - v[i] - phase * (U.values[i + 1] - U.values[i]));
    }
    return std::sqrt(field.grid->omega() * s);
}

namespace {

// LU of the complex symmetric tridiagonal K - 2i M/dt; its real part is positive definite,
// so elimination without pivoting is safe.
class MidpointSolver {
public:
    MidpointSolver(const RadialGrid& grid, double dt) {
        const auto c = grid.stiffness();
        const auto m = grid.lumped();
        n_ = grid.size() - 1;
        off_.assign(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(n_ - 1));
        for (auto& o : off_) o = -o;
        pivot_.resize(n_);
        factor_.resize(n_);
        for (std::size_t i = 0; i < n_; ++i) {
            const cplx d = (i > 0 ? c[i - 1] : 0.0) + c[i] - cplx(0.0, 2.0 * m[i] / dt);
            pivot_[i] = i == 0 ? d : d - factor_[i - 1] * off_[i - 1];
            if (i + 1 < n_) factor_[i] = off_[i] / pivot_[i];
        }
    }

    void solve(std::vector<cplx>& b) const {
        for (std::size_t i = 1; i < n_; ++i) b[i] -= factor_[i - 1] * b[i - 1];
        b[n_ - 1] /= pivot_[n_ - 1];
        for (std::size_t i = n_ - 1; i-- > 0;) b[i] = (b[i] - off_[i] * b[i + 1]) / pivot_[i];
    }

    std::size_t size() const { return n_; }

private:
    std::size_t n_ = 0;
    std::vector<double> off_;
    std::vector<cplx> pivot_, factor_;
};

// |z|^{p-1}
double modulus_power(cplx z, double p) {
    const double n2 = std::norm(z);
    return p == 3.0 ? n2 : std::pow(n2, 0.5 * (p - 1.0));
}

double sup_abs(const std::vector<cplx>& v) {
    double s = 0.0;
    for (const auto& x : v) s = std::max(s, std::abs(x));
    return s;
}

}  // namespace

EvolutionRecord evolve(const ComplexField& initial, const ProblemParams& params, double dt, double T,
                       const EvolveConfig& config) {
    if (!initial.grid || initial.values.size() != initial.grid->size() || initial.grid->size() < 3) {
        throw ParameterError("initial field does not match its grid");
    }
    if (initial.grid->dimension() != params.N) throw ParameterError("grid dimension differs from N");
    if (!std::isfinite(dt) || dt == 0.0) throw ParameterError("dt must be finite and nonzero");
    if (!std::isfinite(T) || T < std::abs(dt)) throw ParameterError("T must be at least |dt|");
    if (config.nonlinearity_sign != 1 && config.nonlinearity_sign != -1) throw ParameterError("nonlinearity sign must be +1 or -1");
    if (!(config.sample_interval > 0.0) || !(config.inner_tolerance > 0.0) || config.max_inner < 2 || !(config.sup_cap > 0.0)) {
        throw ParameterError("invalid evolution configuration");
    }
    const double sup0 = sup_abs(initial.values);
    if (std::abs(initial.values.back()) > 1e-12 * std::max(1.0, sup0)) {
        throw ParameterError("initial field violates the Dirichlet condition");
    }
    const bool tracking = static_cast<bool>(config.reference.grid);
    if (tracking && config.reference.grid != initial.grid) throw ParameterError("reference profile must share the field grid");

    const RadialGrid& grid = *initial.grid;
    const MidpointSolver solver(grid, dt);
    const std::size_t n = solver.size();
    const auto m = grid.lumped();
    const double p = params.p;
    const double sigma = config.nonlinearity_sign;
    const long steps = std::max(1L, std::lround(T / std::abs(dt)));
    const long cadence = std::max(1L, std::lround(config.sample_interval / std::abs(dt)));

    EvolutionRecord rec;
    ComplexField phi = initial;
    phi.values.back() = 0.0;
    auto sample = [&] {
        rec.times.push_back(phi.time);
        rec.mass.push_back(discrete_mass(phi));
        rec.energy.push_back(discrete_energy(phi, params, config.nonlinearity_sign));
        if (tracking) {
            const double d = orbit_distance(phi, config.reference);
            rec.orbit_distance.push_back(d);
            rec.max_orbit_distance = std::max(rec.max_orbit_distance, d);
        }
        if (config.on_sample) config.on_sample(rec);
    };
    sample();

    std::vector<cplx> base(n), mid(n), prev_mid(n), b(n);
    const double t0 = initial.time;
    bool have_prev = false;
    for (long k = 1; k <= steps; ++k) {
        for (std::size_t i = 0; i < n; ++i) base[i] = cplx(0.0, -2.0 * m[i] / dt) * phi.values[i];
        // Start from the extrapolated midpoint of the previous step.
        for (std::size_t i = 0; i < n; ++i) mid[i] = have_prev ? 2.0 * phi.values[i] - prev_mid[i] : phi.values[i];
        int it = 0;
        for (;;) {
            for (std::size_t i = 0; i < n; ++i) {
                b[i] = base[i] + sigma * m[i] * modulus_power(mid[i], p) * mid[i];
            }
            solver.solve(b);
            double change = 0.0, scale = 1.0;
            for (std::size_t i = 0; i < n; ++i) {
                change = std::max(change, std::abs(b[i] - mid[i]));
                scale = std::max(scale, std::abs(b[i]));
            }
            mid.swap(b);
            ++it;
            if (!std::isfinite(change)) throw StepSizeError("midpoint iteration diverged; reduce dt", dt);
            if (change <= config.inner_tolerance * scale) break;
            if (it >= config.max_inner) {
                throw StepSizeError("midpoint iteration did not converge in " + std::to_string(it) + " sweeps; reduce dt", dt);
            }
        }
        rec.max_inner_iterations = std::max(rec.max_inner_iterations, it);
        for (std::size_t i = 0; i < n; ++i) phi.values[i] = 2.0 * mid[i] - phi.values[i];
        prev_mid = mid;
        have_prev = true;
        phi.time = t0 + k * dt;
        const double sup = sup_abs(phi.values);
        if (!(sup <= config.sup_cap)) {
            throw BlowUpError("sup|Phi| = " + std::to_string(sup) + " exceeds the cap at t = " + std::to_string(phi.time), phi.time);
        }
        if (k % cadence == 0 || k == steps) sample();
    }
    rec.steps = steps;
    rec.final = std::move(phi);
    return rec;
}

RadialProfile discrete_standing_wave(const RadialProfile& U, double lambda, const ProblemParams& params) {
    const RadialGrid& grid = *U.grid;
    const auto c = grid.stiffness();
    const auto m = grid.lumped();
    const std::size_t n = grid.size() - 1;
    const double p = params.p;
    std::vector<double> v(U.values.begin(), U.values.begin() + static_cast<std::ptrdiff_t>(n));
    double sup = 0.0;
    for (double x : v) sup = std::max(sup, std::abs(x));
    double last_step = 0.0;
    for (int it = 0;; ++it) {
        std::vector<double> diag(n), lower(n - 1), upper(n - 1), res(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double k = (i > 0 ? c[i - 1] : 0.0) + c[i];
            const double a = std::abs(v[i]);
            res[i] = k * v[i] + lambda * m[i] * v[i] - m[i] * std::pow(a, p - 1.0) * v[i];
            if (i > 0) res[i] -= c[i - 1] * v[i - 1];
            if (i + 1 < n) res[i] -= c[i] * v[i + 1];
            diag[i] = k + lambda * m[i] - p * m[i] * std::pow(a, p - 1.0);
            if (i + 1 < n) lower[i] = upper[i] = -c[i];
        }
        const auto dv = solve_tridiagonal(lower, diag, upper, res);
        double step = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            v[i] -= dv[i];
            step = std::max(step, std::abs(dv[i]));
        }
        if (!std::isfinite(step)) throw SolverError("discrete standing-wave Newton iteration diverged");
        // Stop once the steps no longer contract: the rounding floor of the residual is reached.
        if (step <= 1e-13 * sup || (it > 0 && step > 0.5 * last_step)) {
            if (step > 1e-8 * sup) throw SolverError("discrete standing-wave Newton iteration did not converge");
            break;
        }
        last_step = step;
        if (it == 30) throw SolverError("discrete standing-wave Newton iteration did not converge");
    }
    RadialProfile out = zero_profile(U.grid);
    std::copy(v.begin(), v.end(), out.values.begin());
    out.boundary_derivative = nodal_slopes(out).back();
    return out;
}

RadialProfile standing_wave(const BranchPoint& point) {
    if (point.sign != 1 || !(point.mu > 0.0)) throw ScopeError("standing waves are built from focusing points");
    RadialProfile U = point.profile;
    const double scale = std::pow(point.mu, 1.0 / (point.params.p - 1.0));
    for (auto& v : U.values) v *= scale;
    return discrete_standing_wave(U, point.lambda, point.params);
}

EvolutionRecord stability_probe(const BranchPoint& point, double delta, double T, double dt, EvolveConfig config) {
    if (!std::isfinite(delta)) throw ParameterError("delta must be finite");
    const RadialProfile U = standing_wave(point);
    const EigenPair eig = principal_eigenpair(point.params, U.grid);
    const double u_norm = orbit_distance(to_field(zero_profile(U.grid)), U);
    const double phi_norm = orbit_distance(to_field(zero_profile(U.grid)), eig.phi1);
    ComplexField phi0 = to_field(U, 1.0 + delta / u_norm);
    for (std::size_t i = 0; i < U.size(); ++i) phi0.values[i] += cplx(0.0, delta * eig.phi1.values[i] / phi_norm);
    config.reference = U;
    config.nonlinearity_sign = 1;
    return evolve(phi0, point.params, dt, T, config);
}

}  // namespace nlsball
