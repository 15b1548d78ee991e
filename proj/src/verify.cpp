#include "nlsball/verify.hpp"

#include <algorithm>
#include <cmath>

#include <limits>

#include "nlsball/errors.hpp"

namespace nlsball {

double pohozaev_residual(const BranchPoint& point) {
    const double N = point.params.N, p = point.params.p;
    const double q = (p + 1.0) / (p - 1.0);
    const double omega = sphere_area(point.params.N);
    const double rhs = (2.0 / N) * q * point.alpha - point.alpha - (omega / N) * q * point.ur1 * point.ur1;
    return (point.lambda - rhs) / std::max(1.0, std::abs(point.lambda));
}

namespace {

double flux_bracket(const BranchPoint& pt, const BranchDerivative& d) {
    const double N = pt.params.N, p = pt.params.p;
    return (4.0 / N - p + 1.0) - (4.0 * sphere_area(pt.params.N) / N) * pt.ur1 * d.vr1;
}

const Branch& with_derivatives(const Branch& branch, Branch& scratch) {
    if (branch.points.size() < 3) throw SizeError("identity checks need at least three branch points");
    if (branch.derivatives.size() == branch.points.size()) return branch;
    scratch = branch;
    estimate_derivatives(scratch);
    return scratch;
}

}  // namespace

std::vector<FluxRecord> boundary_flux_check(const Branch& input) {
    Branch scratch;
    const Branch& branch = with_derivatives(input, scratch);
    const double p = branch.params.p;
    std::vector<FluxRecord> out;
    out.reserve(branch.points.size());
    for (std::size_t i = 0; i < branch.points.size(); ++i) {
        const BranchPoint& pt = branch.points[i];
        const BranchDerivative& d = branch.derivatives[i];
        FluxRecord r;
        r.alpha = pt.alpha;
        r.mu_prime_M = d.mu_prime * pt.M_alpha;
        r.bracket = flux_bracket(pt, d);
        r.predicted = (p + 1.0) / (2.0 * (p - 1.0)) * r.bracket;
        r.residual = (r.mu_prime_M - r.predicted) / std::max({std::abs(r.mu_prime_M), std::abs(r.predicted), 0.5 * (p - 1.0)});
        out.push_back(r);
    }
    return out;
}

IdentityReport derivative_identities(const Branch& input) {
    Branch scratch;
    const Branch& branch = with_derivatives(input, scratch);
    const double p = branch.params.p;
    const std::size_t n = branch.points.size();
    const std::size_t half = n >= 5 ? 2 : 1;
    const auto flux = boundary_flux_check(branch);
    IdentityReport report;
    report.points.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const BranchPoint& pt = branch.points[i];
        const BranchDerivative& d = branch.derivatives[i];
        const RadialProfile& u = pt.profile;
        IdentityRecord r;
        r.alpha = pt.alpha;
        r.centered = i >= half && i + half < n;
        r.step = d.step;
        r.pohozaev_res = pohozaev_residual(pt);
        r.multiplier_res = pt.multiplier_residual();
        r.uv_res = inner(u, d.v);
        r.grad_uv_res = grad_inner(u, d.v) - 0.5;
        std::vector<double> f(u.size());
        for (std::size_t k = 0; k < f.size(); ++k) f[k] = std::pow(std::abs(u.values[k]), p) * d.v.values[k];
        r.upv_res = pt.mu * integrate_values(*u.grid, f) - 0.5;
        const double muM = d.mu_prime * pt.M_alpha;
        r.mu_prime_identity_res = (muM - d.lambda_prime + 0.5 * (p - 1.0)) /
                                  std::max({std::abs(muM), std::abs(d.lambda_prime), 0.5 * (p - 1.0)});
        r.M_prime_res = d.M_prime * 2.0 * pt.mu / (p + 1.0) - 1.0;
        r.flux_res = flux[i].residual;
        report.max_step = std::max(report.max_step, d.step);
        report.points.push_back(r);
    }
    return report;
}

namespace {

int harmonic_multiplicity(int N, int ell) {
    if (N == 1) return 1;
    auto binom = [](int a, int b) -> double {
        if (a < b || b < 0) return 0.0;
        double r = 1.0;
        for (int k = 1; k <= b; ++k) r = r * (a - b + k) / k;
        return r;
    };
    return static_cast<int>(std::lround(binom(ell + N - 1, N - 1) - binom(ell + N - 3, N - 1)));
}

}  // namespace

namespace {

// Regular solution of w'' = -((N-1)/r) w' + (k/r^2 + V(r) - E) w from the origin, with
// k = ell (ell + N - 2), integrated by RK4; returns the number of sign changes on (0, 1).
class SectorShooter {
public:
    SectorShooter(const BranchPoint& point, int ell) : point_(point), ell_(ell) {
        const ProblemParams& pp = point.params;
        k_ = ell * (ell + pp.N - 2.0);
        const auto r = point.profile.grid->nodes();
        vmin_ = vmax_ = potential(0.0);
        for (std::size_t i = 0; i < r.size(); ++i) {
            const double v = point.lambda - pp.p * point.mu * std::pow(std::abs(point.profile.values[i]), pp.p - 1.0);
            vmin_ = std::min(vmin_, v);
            vmax_ = std::max(vmax_, v);
        }
    }

    double vmin() const { return vmin_; }
    double vmax() const { return vmax_; }

    int zeros(double E) const {
        const int N = point_.params.N;
        const double stiff = std::max({std::abs(vmin_ - E), std::abs(vmax_ - E), 1.0});
        const double h_max = 0.02 / std::sqrt(stiff);
        double r = std::min(1e-3, 0.1 * h_max);
        const double c = (potential(0.0) - E) / (2.0 * (2.0 * ell_ + N));
        // w = r^ell (1 + c r^2) scaled by r^{-ell}; only signs matter.
        double w = 1.0 + c * r * r;
        double dw = ell_ / r * w + 2.0 * c * r;
        auto f = [&](double x, double y, double dy, double& ddy) {
            const double friction = N == 1 ? 0.0 : (N - 1) * dy / x;
            ddy = -friction + (k_ / (x * x) + potential(x) - E) * y;
        };
        int count = 0;
        double prev = w;
        while (r < 1.0) {
            double h = std::min(h_max, 0.1 * r);
            const bool last = r + h >= 1.0;
            if (last) h = 1.0 - r;
            double a1, a2, a3, a4;
            f(r, w, dw, a1);
            const double w2 = w + 0.5 * h * dw, d2 = dw + 0.5 * h * a1;
            f(r + 0.5 * h, w2, d2, a2);
            const double w3 = w + 0.5 * h * d2, d3 = dw + 0.5 * h * a2;
            f(r + 0.5 * h, w3, d3, a3);
            const double w4 = w + h * d3, d4 = dw + h * a3;
            f(r + h, w4, d4, a4);
            w += h / 6.0 * (dw + 2.0 * d2 + 2.0 * d3 + d4);
            dw += h / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
            r = last ? 1.0 : r + h;
            if (!std::isfinite(w) || !std::isfinite(dw)) throw SolverError("linearized shooting overflow");
            const double scale = std::max(std::abs(w), std::abs(dw));
            if (scale > 1e100) {
                w /= scale;
                dw /= scale;
                prev /= scale;
            }
            // A zero exactly at r = 1 is the eigenfunction itself and belongs to the next level.
            if (w != 0.0) {
                if ((w < 0.0) != (prev < 0.0)) ++count;
                prev = w;
            }
        }
        return count;
    }

private:
    double potential(double r) const {
        const double u = r <= 0.0 ? point_.profile.values.front() : point_.profile.evaluate(r);
        return point_.lambda - point_.params.p * point_.mu * std::pow(std::abs(u), point_.params.p - 1.0);
    }

    const BranchPoint& point_;
    int ell_;
    double k_ = 0.0;
    double vmin_ = 0.0, vmax_ = 0.0;
};

}  // namespace

SpectrumReport linearized_spectrum(const BranchPoint& point, int l_max, int count) {
    if (l_max < 1) throw ParameterError("l_max must be >= 1");
    if (count < 1) throw ParameterError("eigenvalue count must be >= 1");
    if (!point.profile.has_slopes()) throw ParameterError("linearized spectrum needs a profile with stored slopes");
    const int N = point.params.N;
    const int top = N == 1 ? 1 : l_max;

    SpectrumReport report;
    report.min_abs_eigenvalue = std::numeric_limits<double>::infinity();
    for (int ell = 0; ell <= top; ++ell) {
        const SectorShooter shoot(point, ell);
        SectorSpectrum s;
        s.ell = ell;
        s.multiplicity = harmonic_multiplicity(N, ell);
        s.negative_count = shoot.zeros(0.0);
        const double lo0 = shoot.vmin() - 1.0;
        const double tol = 1e-11 * std::max({std::abs(shoot.vmin()), std::abs(shoot.vmax()), 1.0});
        double hi = std::max(1.0, 2.0 * std::abs(lo0));
        for (int k = 0; k < count; ++k) {
            int guard = 0;
            while (shoot.zeros(hi) <= k) {
                hi *= 2.0;
                if (++guard > 60) throw SolverError("linearized eigenvalue bracket not found");
            }
            double lo = k == 0 ? lo0 : s.eigenvalues.back();
            double upper = hi;
            while (upper - lo > tol) {
                const double mid = 0.5 * (lo + upper);
                if (shoot.zeros(mid) > k) {
                    upper = mid;
                } else {
                    lo = mid;
                }
            }
            s.eigenvalues.push_back(0.5 * (lo + upper));
        }
        for (double e : s.eigenvalues) report.min_abs_eigenvalue = std::min(report.min_abs_eigenvalue, std::abs(e));
        if (ell == 0) report.radial_negative = s.negative_count;
        report.total_negative += s.negative_count * s.multiplicity;
        report.sectors.push_back(std::move(s));
    }
    return report;
}

}  // namespace nlsball
