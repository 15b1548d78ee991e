#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <numbers>

#include "nlsball/asymptotics.hpp"
#include "nlsball/errors.hpp"
#include "oracles.hpp"

using namespace nlsball;
using std::numbers::pi;

namespace {

const APExpansion& expansion(int N, double p) {
    static std::map<std::pair<int, double>, APExpansion> cache;
    auto it = cache.find({N, p});
    if (it == cache.end()) {
        const auto params = make_params(N, p);
        it = cache.emplace(std::pair{N, p}, solve_psi(params, principal_eigenpair(params, make_grid(params, 2049, 1.0)))).first;
    }
    return it->second;
}

}  // namespace

TEST_CASE("psi for N=1, p=3 against cos(3 pi x / 2) / (8 pi^2)") {
    // cos^3 t = (3 cos t + cos 3t) / 4 leaves -psi'' - (pi^2/4) psi = cos(3 pi x / 2) / 4.
    const APExpansion& ap = expansion(1, 3.0);
    CHECK(ap.c_p1 == doctest::Approx(0.75).epsilon(1e-8));
    CHECK(ap.c_ps == doctest::Approx(1.0 / (32.0 * pi * pi)).epsilon(1e-5));
    const auto r = ap.psi.grid->nodes();
    double err = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        err = std::max(err, std::abs(ap.psi.values[i] - std::cos(1.5 * pi * r[i]) / (8.0 * pi * pi)));
    }
    CHECK(err < 1e-6 / (8.0 * pi * pi));
    CHECK(ap.residual < 1e-8);
}

TEST_CASE("psi: orthogonality, positivity and the quadratic-form identity") {
    for (auto [N, p] : {std::pair{1, 3.0}, {2, 2.5}, {3, 3.0}, {3, 1.5}, {2, 5.0}}) {
        const APExpansion& ap = expansion(N, p);
        INFO("N=" << N << " p=" << p);
        const RadialProfile& phi = ap.eig.phi1;
        CHECK(std::abs(inner(ap.psi, phi)) < 1e-8);
        CHECK(ap.c_ps > 0.0);
        CHECK(ap.c_p1 > 0.0);
        const double form = grad_norm_sq(ap.psi) - ap.eig.lambda1 * inner(ap.psi, ap.psi);
        CHECK(form > 0.0);
        CHECK(std::abs(form / ap.c_ps - 1.0) < 1e-5);
        std::vector<double> g(phi.size());
        for (std::size_t i = 0; i < g.size(); ++i) {
            g[i] = (std::pow(phi.values[i], p) - ap.c_p1 * phi.values[i]) * phi.values[i];
        }
        CHECK(std::abs(integrate_values(*phi.grid, g)) < 1e-12);
    }
}

TEST_CASE("c_p1 for N=3 from phi_1 = sin(pi r) / (r sqrt(2 pi))") {
    const double exact = oracle::simpson(
        [](double r) { return r == 0.0 ? 0.0 : std::pow(std::sin(pi * r), 4) / (r * r); }, 0.0, 1.0) / pi;
    CHECK(expansion(3, 3.0).c_p1 == doctest::Approx(exact).epsilon(1e-6));
}

TEST_CASE("AP prediction: base point and symmetry") {
    const APExpansion& ap = expansion(1, 3.0);
    const APPrediction tiny = ap_predict(ap, 1e-16, 1);
    CHECK(std::abs(tiny.mu) < 1e-5);
    CHECK(tiny.lambda == doctest::Approx(-ball_lambda1(1)).epsilon(1e-6));
    const APPrediction up = ap_predict(ap, 1e-3, 1);
    const APPrediction down = ap_predict(ap, 1e-3, -1);
    CHECK(up.mu == doctest::Approx(-down.mu));
    CHECK(up.lambda + down.lambda == doctest::Approx(-2.0 * ap.eig.lambda1));
    CHECK(up.u.values[0] == doctest::Approx(ap.eig.phi1.values[0] + up.t * ap.psi.values[0]));
    CHECK_THROWS_AS(ap_predict(ap, 0.0, 1), ParameterError);
    CHECK_THROWS_AS(ap_predict(ap, 1e-3, 0), ParameterError);
}

TEST_CASE("AP prediction against traced branches, both signs") {
    for (int N : {1, 3}) {
        const auto params = make_params(N, 3.0);
        const APExpansion& ap = expansion(N, 3.0);
        for (int sign : {1, -1}) {
            const Branch b = trace(params, log_lambda_grid(params, sign, 1e-2, 3.0, 24), sign);
            REQUIRE_FALSE(b.partial);
            double previous = 0.0;
            for (double eps : {4e-3, 1e-3, 2.5e-4}) {
                const BranchPoint pt = point_at_alpha(b, ball_lambda1(N) + eps);
                const APPrediction pr = ap_predict(ap, eps, sign);
                const double err = std::abs(pt.mu / pr.mu - 1.0);
                INFO("N=" << N << " sign=" << sign << " eps=" << eps);
                CHECK(err < 0.05);
                CHECK(std::abs(pt.lambda - pr.lambda) < 0.05 * std::abs(pr.lambda + ball_lambda1(N)));
                if (previous > 0.0) CHECK(previous / err >= 1.5);
                previous = err;
            }
        }
    }
}

TEST_CASE("Gagliardo-Nirenberg constants from the whole-space ground state") {
    const GNResult cubic = gn_constant(solve_whole_space(make_params(1, 3.0)));
    CHECK(cubic.C_Np == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-6));
    CHECK(cubic.mass_exponent == 3.0);
    CHECK(cubic.grad_exponent == 1.0);

    const auto critical = make_params(1, 5.0);
    const WholeSpaceGroundState Z = solve_whole_space(critical);
    CHECK(gn_constant(Z).C_Np == doctest::Approx(4.0 / (pi * pi)).epsilon(1e-6));
    CHECK(gn_constant(Z).C_Np == doctest::Approx(3.0 / Z.mass / Z.mass).epsilon(1e-6));

    const auto params3 = make_params(3, 3.0);
    const WholeSpaceGroundState Z3 = solve_whole_space(params3);
    const double C3 = gn_constant(Z3).C_Np;
    const Branch b = trace(params3, log_lambda_grid(params3, 1, 1e-2, 1000.0, 50), 1);
    const auto ratios = gn_ratios(b);
    for (std::size_t i = 0; i < ratios.size(); ++i) {
        CHECK(ratios[i] < C3 * (1 + 1e-8));
        if (i > 0) CHECK(ratios[i] >= ratios[i - 1] - 1e-8 * C3);
    }
    CHECK(ratios.back() > 0.9 * C3);
    // At the bifurcation u = phi_1, so the quotient starts at c_p1 / lambda_1^{3/2}.
    CHECK(ratios.front() == doctest::Approx(expansion(3, 3.0).c_p1 / std::pow(ball_lambda1(3), 1.5)).epsilon(1e-3));
}

TEST_CASE("large-alpha laws") {
    const auto params3 = make_params(3, 3.0);
    CHECK(alpha_over_lambda_limit(params3) == doctest::Approx(3.0));
    CHECK(alpha_over_lambda_limit(make_params(1, 5.0)) == doctest::Approx(0.5));
    CHECK(alpha_over_lambda_limit(make_params(1, 3.0)) == doctest::Approx(1.0 / 3.0));

    const WholeSpaceGroundState Z3 = solve_whole_space(params3);
    const LargeAlphaDiagnostics d3 = large_alpha_diagnostics(point_at_lambda(params3, 3000.0, 1), Z3);
    CHECK(d3.ratio_err < 0.03);
    CHECK(d3.mu_limit_err < 0.03);
    CHECK(d3.profile_err < 1e-3 * Z3.center_value);

    const auto params5 = make_params(1, 5.0);
    const BranchPoint q = point_at_lambda(params5, 1e4, 1);
    CHECK(std::abs(q.mu / (0.75 * pi * pi) - 1.0) < 0.02);
    const LargeAlphaDiagnostics d5 = large_alpha_diagnostics(q, solve_whole_space(params5));
    CHECK(d5.mu_limit_err < 1e-6);

    CHECK_THROWS_AS(large_alpha_diagnostics(point_at_lambda(params3, -1.0, 1), Z3), NotAsymptoticError);
    CHECK_THROWS_AS(large_alpha_diagnostics(point_at_lambda(params3, -20.0, -1), Z3), ScopeError);
}

TEST_CASE("defocusing limits: lambda / mu -> |B|^{-(p-1)/2}, alpha / lambda -> 0, u -> |B|^{-1/2}") {
    const auto params = make_params(1, 3.0);
    const Branch b = trace(params, log_lambda_grid(params, -1, 1.0, 2e4, 40), -1);
    REQUIRE_FALSE(b.partial);
    for (std::size_t i = 1; i < b.points.size(); ++i) {
        CHECK(defocusing_diagnostics(b.points[i]).alpha_over_lambda < defocusing_diagnostics(b.points[i - 1]).alpha_over_lambda);
    }
    const BranchPoint pt = point_at_mu(b, -1e4);
    CHECK(pt.mu == doctest::Approx(-1e4).epsilon(1e-10));
    const DefocusingDiagnostics d = defocusing_diagnostics(pt);
    CHECK(d.lambda_over_mu_target == doctest::Approx(0.5));
    CHECK(d.plateau_target == doctest::Approx(1.0 / std::sqrt(2.0)));
    // tanh boundary layers of width 1/kappa, kappa = sqrt(|lambda|/2), on both ends give
    // lambda/mu = 1 / (2 (1 - 1/kappa)) up to exponentially small terms.
    const double kappa = std::sqrt(-pt.lambda / 2.0);
    CHECK(d.lambda_over_mu == doctest::Approx(0.5 / (1.0 - 1.0 / kappa)).epsilon(1e-8));
    CHECK(d.lambda_over_mu_err < 0.02);
    CHECK(d.alpha_over_lambda < 0.05);
    CHECK(d.plateau_err < 0.02 * d.plateau_target);
    CHECK_THROWS_AS(defocusing_diagnostics(point_at_lambda(params, 1.0, 1)), ScopeError);
}
