#include "nlsball/core.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <string>

#include "nlsball/errors.hpp"
#include "nlsball/tridiag.hpp"

namespace nlsball {

const char* to_string(Regime regime) {
    switch (regime) {
        case Regime::subcritical: return "subcritical";
        case Regime::L2critical: return "L2critical";
        case Regime::supercritical: return "supercritical";
    }
    return "unknown";
}

ProblemParams make_params(int N, double p) {
    if (N < 1) throw ParameterError("dimension N must be >= 1, got " + std::to_string(N));
    if (!std::isfinite(p) || p <= 1.0) {
        throw ParameterError("exponent p must satisfy p > 1, got " + std::to_string(p));
    }
    ProblemParams params;
    params.N = N;
    params.p = p;
    params.sobolev_limit = N <= 2 ? std::numeric_limits<double>::infinity()
                                  : static_cast<double>(N + 2) / static_cast<double>(N - 2);
    if (p >= params.sobolev_limit) {
        throw ParameterError("exponent p = " + std::to_string(p) +
                             " is not below the Sobolev limit " + std::to_string(params.sobolev_limit));
    }
    const double crit = params.critical_exponent();
    if (std::abs(p - crit) <= 1e-12 * crit) {
        params.regime = Regime::L2critical;
    } else {
        params.regime = p < crit ? Regime::subcritical : Regime::supercritical;
    }
    return params;
}

double sphere_area(int N) {
    return 2.0 * std::pow(std::numbers::pi, 0.5 * N) / std::tgamma(0.5 * N);
}

double ball_volume(int N) { return sphere_area(N) / N; }

namespace {

struct GaussRule {
    std::vector<double> x;  // on [-1, 1]
    std::vector<double> w;
};

GaussRule gauss_legendre(int m) {
    GaussRule rule;
    rule.x.resize(m);
    rule.w.resize(m);
    for (int i = 0; i < m; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int k = 1; k <= m; ++k) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
            }
            dp = m * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        rule.x[i] = z;
        rule.w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    return rule;
}

// Integral over [a, b] of f(r) r^{N-1}, exact for polynomial f of low degree.
template <class F>
double weighted_panel(const GaussRule& rule, int N, double a, double b, F&& f) {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double sum = 0.0;
    for (std::size_t k = 0; k < rule.x.size(); ++k) {
        const double r = mid + half * rule.x[k];
        sum += rule.w[k] * f(r) * std::pow(r, N - 1);
    }
    return half * sum;
}

double lagrange(double r, double x0, double x1, double x2) {
    return (r - x1) * (r - x2) / ((x0 - x1) * (x0 - x2));
}

}  // namespace

RadialGrid::RadialGrid(int N, std::vector<double> nodes)
    : N_(N), omega_(sphere_area(N)), uniform_(true), nodes_(std::move(nodes)) {
    const std::size_t n = nodes_.size();
    if (n < 3) throw ParameterError("radial grid needs at least 3 nodes");
    for (std::size_t i = 1; i < n; ++i) {
        if (!(nodes_[i] > nodes_[i - 1])) throw ParameterError("grid nodes must be strictly ascending");
    }
    const double h0 = nodes_[1] - nodes_[0];
    for (std::size_t i = 1; i < n; ++i) {
        if (std::abs((nodes_[i] - nodes_[i - 1]) - h0) > 1e-9 * h0) {
            uniform_ = false;
            break;
        }
    }

    const GaussRule rule = gauss_legendre(std::max(4, N / 2 + 4));
    const auto& r = nodes_;
    const std::size_t cells = n - 1;

    lumped_.assign(n, 0.0);
    stiffness_.assign(cells, 0.0);
    for (std::size_t k = 0; k < cells; ++k) {
        const double a = r[k], b = r[k + 1], h = b - a;
        lumped_[k] += weighted_panel(rule, N, a, b, [&](double x) { return (b - x) / h; });
        lumped_[k + 1] += weighted_panel(rule, N, a, b, [&](double x) { return (x - a) / h; });
        stiffness_[k] = weighted_panel(rule, N, a, b, [](double) { return 1.0; }) / (h * h);
    }

    weights_.assign(n, 0.0);
    auto simpson_panel = [&](std::size_t i) {
        const double x0 = r[i], x1 = r[i + 1], x2 = r[i + 2];
        return std::array<double, 3>{
            weighted_panel(rule, N, x0, x2, [&](double x) { return lagrange(x, x0, x1, x2); }),
            weighted_panel(rule, N, x0, x2, [&](double x) { return lagrange(x, x1, x0, x2); }),
            weighted_panel(rule, N, x0, x2, [&](double x) { return lagrange(x, x2, x0, x1); })};
    };
    auto trapezoid_cell = [&](std::size_t k) {
        const double a = r[k], b = r[k + 1], h = b - a;
        weights_[k] += weighted_panel(rule, N, a, b, [&](double x) { return (b - x) / h; });
        weights_[k + 1] += weighted_panel(rule, N, a, b, [&](double x) { return (x - a) / h; });
    };

    std::size_t i = 0;
    for (; i + 2 <= cells; i += 2) {
        const auto w = simpson_panel(i);
        const double floor = -1e-12 * (std::abs(w[0]) + std::abs(w[1]) + std::abs(w[2]));
        if (w[0] < floor || w[1] < floor || w[2] < floor) {
            trapezoid_cell(i);
            trapezoid_cell(i + 1);
        } else {
            for (int j = 0; j < 3; ++j) weights_[i + j] += std::max(w[j], 0.0);
        }
    }
    if (i < cells) {
        // One cell left: quadratic through the last three nodes, integrated over the last cell.
        const double x0 = r[cells - 2], x1 = r[cells - 1], x2 = r[cells];
        weights_[cells - 2] += weighted_panel(rule, N, x1, x2, [&](double x) { return lagrange(x, x0, x1, x2); });
        weights_[cells - 1] += weighted_panel(rule, N, x1, x2, [&](double x) { return lagrange(x, x1, x0, x2); });
        weights_[cells] += weighted_panel(rule, N, x1, x2, [&](double x) { return lagrange(x, x2, x0, x1); });
    }
}

GridPtr make_grid(const ProblemParams& params, int n_nodes, double R, GridOptions options) {
    if (n_nodes < 16) throw ParameterError("grid needs n_nodes >= 16, got " + std::to_string(n_nodes));
    if (!(R > 0.0) || !std::isfinite(R)) throw ParameterError("grid radius must be positive");
    if (!(options.grading >= 1.0)) throw ParameterError("grid grading must be >= 1");
    const int cells = n_nodes - 1;
    std::vector<double> nodes(n_nodes);
    for (int i = 0; i < n_nodes; ++i) {
        const double s = static_cast<double>(i) / cells;
        nodes[i] = options.grading == 1.0 ? R * s : R * std::pow(s, options.grading);
    }
    nodes.back() = R;
    return std::make_shared<const RadialGrid>(params.N, std::move(nodes));
}

double RadialProfile::evaluate(double r) const {
    const auto x = grid->nodes();
    if (r < x.front() || r > x.back()) return 0.0;
    auto it = std::upper_bound(x.begin(), x.end(), r);
    std::size_t k = it == x.end() ? x.size() - 2 : static_cast<std::size_t>(it - x.begin()) - 1;
    k = std::min(k, x.size() - 2);
    const double h = x[k + 1] - x[k];
    const double t = (r - x[k]) / h;
    if (!has_slopes()) return (1.0 - t) * values[k] + t * values[k + 1];
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * values[k] + (t3 - 2 * t2 + t) * h * slopes[k] +
           (-2 * t3 + 3 * t2) * values[k + 1] + (t3 - t2) * h * slopes[k + 1];
}

RadialProfile zero_profile(GridPtr grid) {
    RadialProfile u;
    u.values.assign(grid->size(), 0.0);
    u.grid = std::move(grid);
    return u;
}

std::vector<double> nodal_slopes(const RadialProfile& u) {
    if (u.has_slopes()) return u.slopes;
    const auto x = u.grid->nodes();
    const auto& f = u.values;
    const std::size_t n = f.size();
    std::vector<double> d(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double h1 = x[i] - x[i - 1], h2 = x[i + 1] - x[i];
        d[i] = -h2 / (h1 * (h1 + h2)) * f[i - 1] + (h2 - h1) / (h1 * h2) * f[i] +
               h1 / (h2 * (h1 + h2)) * f[i + 1];
    }
    {
        const double h1 = x[n - 1] - x[n - 2], h2 = x[n - 2] - x[n - 3];
        d[n - 1] = (2 * h1 + h2) / (h1 * (h1 + h2)) * f[n - 1] - (h1 + h2) / (h1 * h2) * f[n - 2] +
                   h1 / (h2 * (h1 + h2)) * f[n - 3];
    }
    if (x[0] != 0.0) {
        const double h1 = x[1] - x[0], h2 = x[2] - x[1];
        d[0] = -(2 * h1 + h2) / (h1 * (h1 + h2)) * f[0] + (h1 + h2) / (h1 * h2) * f[1] -
               h1 / (h2 * (h1 + h2)) * f[2];
    }
    return d;
}

double integrate_values(const RadialGrid& grid, std::span<const double> f) {
    const auto w = grid.weights();
    double sum = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) sum += w[i] * f[i];
    return grid.omega() * sum;
}

double inner(const RadialProfile& u, const RadialProfile& v) {
    const auto w = u.grid->weights();
    double sum = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) sum += w[i] * u.values[i] * v.values[i];
    return u.grid->omega() * sum;
}

double grad_inner(const RadialProfile& u, const RadialProfile& v) {
    const auto du = nodal_slopes(u);
    const auto dv = nodal_slopes(v);
    return integrate_values(*u.grid, [&] {
        std::vector<double> f(du.size());
        for (std::size_t i = 0; i < f.size(); ++i) f[i] = du[i] * dv[i];
        return f;
    }());
}

double grad_norm_sq(const RadialProfile& u) { return grad_inner(u, u); }

namespace {

// M^{-1/2} K M^{-1/2} on nodes 0..n-2 (Dirichlet at the outer node).
SymTridiag scaled_laplacian(const RadialGrid& grid) {
    const std::size_t n = grid.size() - 1;
    const auto c = grid.stiffness();
    const auto m = grid.lumped();
    SymTridiag t;
    t.diag.resize(n);
    t.off.resize(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        t.diag[i] = ((i > 0 ? c[i - 1] : 0.0) + c[i]) / m[i];
        if (i + 1 < n) t.off[i] = -c[i] / std::sqrt(m[i] * m[i + 1]);
    }
    return t;
}

double discrete_lambda1(const RadialGrid& grid, std::vector<double>* vec, int* iterations) {
    const SymTridiag t = scaled_laplacian(grid);
    const double estimate = lowest_eigenvalues(t, 1, 1e-9)[0];
    const auto y = inverse_iteration(t, estimate * (1.0 - 1e-10), 1e-12, 50, iterations);
    const auto ty = multiply(t, y);
    double rq = 0.0, yy = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        rq += y[i] * ty[i];
        yy += y[i] * y[i];
    }
    if (vec) *vec = y;
    return rq / yy;
}

}  // namespace

EigenPair principal_eigenpair(const ProblemParams& params, const GridPtr& grid) {
    if (grid->dimension() != params.N) throw ParameterError("grid dimension does not match params");
    if (grid->node(0) != 0.0) throw ParameterError("eigenpair grid must start at the origin");
    EigenPair eig;
    std::vector<double> y;
    eig.lambda1_discrete = discrete_lambda1(*grid, &y, &eig.iterations);
    if (!std::isfinite(eig.lambda1_discrete) || eig.lambda1_discrete <= 0.0) {
        throw SolverError("inverse iteration failed: Rayleigh quotient " +
                          std::to_string(eig.lambda1_discrete) + " after " +
                          std::to_string(eig.iterations) + " iterations");
    }
    eig.lambda1 = eig.lambda1_discrete;
    if (grid->cells() % 2 == 0 && grid->cells() >= 16) {
        std::vector<double> coarse;
        for (std::size_t i = 0; i < grid->size(); i += 2) coarse.push_back(grid->node(i));
        const RadialGrid coarse_grid(params.N, std::move(coarse));
        const double lc = discrete_lambda1(coarse_grid, nullptr, nullptr);
        eig.lambda1 = (4.0 * eig.lambda1_discrete - lc) / 3.0;
    }

    RadialProfile phi = zero_profile(grid);
    const auto m = grid->lumped();
    double sign = y[0] >= 0.0 ? 1.0 : -1.0;
    for (std::size_t i = 0; i < y.size(); ++i) phi.values[i] = sign * y[i] / std::sqrt(m[i]);
    phi.values.back() = 0.0;
    const double norm = std::sqrt(integrate(phi, [](double v) { return v * v; }));
    for (auto& v : phi.values) v /= norm;
    phi.boundary_derivative = nodal_slopes(phi).back();
    eig.phi1 = std::move(phi);
    return eig;
}

double ball_lambda1(int N) {
    static std::mutex mutex;
    static std::map<int, double> cache;
    {
        std::lock_guard lock(mutex);
        if (auto it = cache.find(N); it != cache.end()) return it->second;
    }
    const ProblemParams params = make_params(N, 1.0 + 1.0 / (N + 1.0));
    const double value = principal_eigenpair(params, make_grid(params, 4097, 1.0)).lambda1;
    std::lock_guard lock(mutex);
    cache.emplace(N, value);
    return value;
}

}  // namespace nlsball
