#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "nlsball/errors.hpp"
#include "nlsball/shoot.hpp"
#include "oracles.hpp"

using namespace nlsball;
using std::numbers::pi;

namespace {

double l2_distance_sq(const RadialProfile& a, const RadialProfile& b) {
    double s = 0.0;
    const auto w = a.grid->weights();
    for (std::size_t i = 0; i < a.size(); ++i) s += w[i] * std::pow(a.values[i] - b.values[i], 2);
    return a.grid->omega() * s;
}

// Positive and decreasing; on flat plateaus neighbouring values may agree to the last bit,
// so strictness is checked on the slopes.
void check_positive_decreasing(const RadialProfile& u, bool dirichlet = true) {
    for (std::size_t i = 0; i + 1 < u.size(); ++i) {
        CHECK(u.values[i] > 0.0);
        CHECK(u.values[i + 1] <= u.values[i]);
        if (i > 0) CHECK(u.slopes[i] < 0.0);
    }
    if (dirichlet) {
        CHECK(u.values.back() == 0.0);
        CHECK(u.boundary_derivative < 0.0);
    }
}

}  // namespace

TEST_CASE("lemniscatic oracle: N=1, p=3, lambda=0") {
    // K = int_0^1 ds / sqrt(1 - s^4), with s = 1 - t^2 to remove the endpoint singularity.
    const double K = oracle::simpson(
        [](double t) {
            const double s = 1 - t * t;
            return 2.0 / std::sqrt((1 + s) * (1 + s * s));
        },
        0.0, 1.0);
    CHECK(K == doctest::Approx(1.31102877714606).epsilon(1e-12));
    const double a = std::sqrt(2.0) * K;

    const auto params = make_params(1, 3.0);
    const BallSolution sol = shoot_ball(params, 0.0, 1);
    CHECK(std::abs(sol.profile.center() - a) < 1e-6);
    CHECK(std::abs(sol.profile.boundary_derivative + a * a / std::sqrt(2.0)) < 1e-5);
    CHECK_FALSE(sol.grafted);
    check_positive_decreasing(sol.profile);
    CHECK(ode_residual(sol.profile, params, 0.0, 1.0) < 1e-6);
}

TEST_CASE("first-integral oracle across lambda, both signs") {
    const auto params = make_params(1, 3.0);
    SUBCASE("focusing lambda = 7") {
        const oracle::FirstIntegral fi{3.0, 7.0, 1.0};
        const double a = fi.center(std::sqrt(14.0) * 1.0001, 20.0);
        const auto u = solve_ball_profile(params, 7.0, 1);
        CHECK(u.center() == doctest::Approx(a).epsilon(1e-8));
        CHECK(u.boundary_derivative == doctest::Approx(fi.boundary_slope(a)).epsilon(1e-7));
    }
    SUBCASE("defocusing lambda = -10") {
        const oracle::FirstIntegral fi{3.0, -10.0, -1.0};
        const double a = fi.center(1e-3, std::sqrt(10.0) * 0.99999);
        const BallSolution sol = shoot_ball(params, -10.0, -1);
        CHECK(sol.profile.center() == doctest::Approx(a).epsilon(1e-8));
        CHECK(sol.profile.boundary_derivative == doctest::Approx(fi.boundary_slope(a)).epsilon(1e-7));
        check_positive_decreasing(sol.profile);
        CHECK(ode_residual(sol.profile, params, -10.0, -1.0) < 1e-6);
    }
    SUBCASE("defocusing lambda = -400, plateau regime") {
        const oracle::FirstIntegral fi{3.0, -400.0, -1.0};
        const double P = 20.0;
        // Near the plateau the oracle half-length blows up logarithmically; bracket from below.
        const double a = fi.center(10.0, P * (1 - 1e-15));
        const BallSolution sol = shoot_ball(params, -400.0, -1);
        CHECK(sol.profile.center() == doctest::Approx(a).epsilon(1e-8));
        CHECK(sol.profile.boundary_derivative == doctest::Approx(fi.boundary_slope(a)).epsilon(1e-7));
        check_positive_decreasing(sol.profile);
    }
}

TEST_CASE("defocusing deep plateau") {
    const auto params = make_params(1, 3.0);
    const double lambda = -5000.0;
    const BallSolution sol = shoot_ball(params, lambda, -1);
    const double P = std::sqrt(-lambda);
    CHECK(sol.grafted);
    check_positive_decreasing(sol.profile);
    CHECK(std::abs(sol.profile.center() / P - 1.0) < 1e-12);
    // First integral at the boundary: u'(1)^2 / 2 = -F(u(0)) with u(0) -> P.
    const oracle::FirstIntegral fi{3.0, lambda, -1.0};
    CHECK(sol.profile.boundary_derivative == doctest::Approx(fi.boundary_slope(P)).epsilon(1e-9));
    CHECK(ode_residual(sol.profile, params, lambda, -1.0) < 1e-6);
    CHECK(sol.slope_jump < 1e-6);
}

TEST_CASE("defocusing plateau in three dimensions") {
    const auto params = make_params(3, 3.0);
    const BallSolution sol = shoot_ball(params, -3000.0, -1);
    check_positive_decreasing(sol.profile);
    CHECK(ode_residual(sol.profile, params, -3000.0, -1.0) < 1e-6);
}

TEST_CASE("near the bifurcation point the profile is a multiple of phi1") {
    const auto params = make_params(1, 3.0);
    const double lambda = -pi * pi / 4 + 1e-3;
    RadialProfile u = solve_ball_profile(params, lambda, 1);
    const double norm = std::sqrt(integrate(u, [](double v) { return v * v; }));
    RadialProfile phi = u;
    for (std::size_t i = 0; i < u.size(); ++i) {
        u.values[i] /= norm;
        phi.values[i] = std::cos(pi * u.grid->node(i) / 2);
    }
    CHECK(std::sqrt(l2_distance_sq(u, phi)) < 0.05);
}

TEST_CASE("monotone profiles across dimensions and exponents") {
    for (auto [N, p, lambda] : {std::tuple{1, 5.0, 3.0}, {2, 3.0, 20.0}, {3, 3.0, 50.0}, {3, 1.5, -5.0}, {4, 2.0, 10.0}}) {
        const auto params = make_params(N, p);
        const BallSolution sol = shoot_ball(params, lambda, 1);
        check_positive_decreasing(sol.profile);
        CHECK(ode_residual(sol.profile, params, lambda, 1.0) < 1e-6);
    }
}

TEST_CASE("large lambda graft matches the scaled whole-space profile") {
    const auto params = make_params(3, 3.0);
    const double lambda = 2000.0;
    const BallSolution sol = shoot_ball(params, lambda, 1);
    check_positive_decreasing(sol.profile);
    CHECK(ode_residual(sol.profile, params, lambda, 1.0) < 1e-6);
    const WholeSpaceGroundState Z = solve_whole_space(params);
    // u(r) = lambda^{1/(p-1)} Z(sqrt(lambda) r) away from the boundary layer.
    const double amp = std::pow(lambda, 1.0 / (params.p - 1));
    double worst = 0.0;
    for (std::size_t i = 0; i < sol.profile.size(); ++i) {
        const double r = sol.profile.grid->node(i);
        if (r > 0.9) break;
        worst = std::max(worst, std::abs(sol.profile.values[i] - amp * Z.profile.evaluate(std::sqrt(lambda) * r)));
    }
    CHECK(worst < 0.01 * sol.profile.center());
}

TEST_CASE("uniqueness witness: independent brackets agree") {
    const auto params = make_params(2, 3.0);
    ShootConfig low, high;
    low.initial_guess = 0.5;
    high.initial_guess = 500.0;
    const double a1 = solve_ball_profile(params, 15.0, 1, low).center();
    const double a2 = solve_ball_profile(params, 15.0, 1, high).center();
    CHECK(std::abs(a1 - a2) <= 10 * low.bisection_tolerance * a1 + 4e-16 * a1);
}

TEST_CASE("whole-space solitons") {
    SUBCASE("N=1, p=3: sqrt(2) sech r") {
        const auto Z = solve_whole_space(make_params(1, 3.0));
        CHECK(Z.center_value == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
        CHECK(std::abs(Z.mass - 4.0) < 1e-5);
        CHECK(std::abs(Z.grad_energy - 4.0 / 3.0) < 1e-5);
        CHECK(std::abs(Z.lp1_norm - 16.0 / 3.0) < 1e-5);
        double worst = 0.0;
        for (std::size_t i = 0; i < Z.profile.size(); ++i) {
            const double r = Z.profile.grid->node(i);
            worst = std::max(worst, std::abs(Z.profile.values[i] - std::sqrt(2.0) / std::cosh(r)));
        }
        CHECK(worst < 1e-8);
    }
    SUBCASE("N=1, p=5: 3^{1/4} sech^{1/2}(2r)") {
        const auto Z = solve_whole_space(make_params(1, 5.0));
        CHECK(Z.center_value == doctest::Approx(std::pow(3.0, 0.25)).epsilon(1e-9));
        CHECK(std::abs(Z.mass - std::sqrt(3.0) * pi / 2) < 1e-5);
    }
    SUBCASE("N=3, p=3 and N=2, p=3: Pohozaev ratios") {
        for (int N : {2, 3}) {
            const auto params = make_params(N, 3.0);
            const auto Z = solve_whole_space(params);
            CHECK(std::abs(Z.ratio_residual()) < 1e-4);
            CHECK(std::abs(Z.nehari_residual()) < 1e-4);
            CHECK(std::abs(Z.profile.values.back()) < 1e-8 * Z.center_value);
            check_positive_decreasing(Z.profile, false);
        }
        CHECK(pohozaev_ratio(make_params(3, 3.0)) == doctest::Approx(3.0));
    }
    SUBCASE("R_max too small") {
        CHECK_THROWS_AS(solve_whole_space(make_params(1, 3.0), 10.0), ParameterError);
    }
}

TEST_CASE("rescaled profiles") {
    const auto params = make_params(1, 3.0);
    SUBCASE("identity scaling") {
        const auto u = solve_ball_profile(params, 2.0, 1);
        const auto v = rescaled_profile(u, 1.0, 1.0, params);
        for (std::size_t i = 0; i < u.size(); ++i) {
            CHECK(v.values[i] == u.values[i]);
            CHECK(v.grid->node(i) == u.grid->node(i));
        }
    }
    SUBCASE("large lambda approaches sqrt(2) sech") {
        const auto Z = solve_whole_space(params);
        const auto u = solve_ball_profile(params, 1e4, 1);
        const auto v = rescaled_profile(u, 1e4, 1.0, params);
        CHECK(sup_distance(v, Z.profile) < 0.02);
    }
    SUBCASE("center converges monotonically along a doubling sequence") {
        double prev = std::numeric_limits<double>::infinity();
        for (double lambda : {10.0, 20.0, 40.0, 80.0}) {
            const auto v = rescaled_profile(solve_ball_profile(params, lambda, 1), lambda, 1.0, params);
            const double err = std::abs(v.center() - std::sqrt(2.0));
            CHECK(err < prev);
            prev = err;
        }
    }
    SUBCASE("errors") {
        const auto u = solve_ball_profile(params, 2.0, 1);
        CHECK_THROWS_AS(rescaled_profile(u, 0.0, 1.0, params), DomainError);
        CHECK_THROWS_AS(rescaled_profile(u, -1.0, 1.0, params), DomainError);
    }
}

TEST_CASE("domain and configuration errors") {
    const auto params = make_params(1, 3.0);
    CHECK_THROWS_AS(solve_ball_profile(params, -3.0, 1), DomainError);
    CHECK_THROWS_AS(solve_ball_profile(params, -2.0, -1), DomainError);
    CHECK_THROWS_AS(solve_ball_profile(params, 1.0, 0), ParameterError);
    ShootConfig bad;
    bad.max_bisections = 20;
    CHECK_THROWS_AS(solve_ball_profile(params, 1.0, 1, bad), ParameterError);
    bad = {};
    bad.ode_tolerance = 0.0;
    CHECK_THROWS_AS(solve_ball_profile(params, 1.0, 1, bad), ParameterError);
    // Loose bisection tolerance stops early; exhausted iterations report the bracket.
    ShootConfig coarse;
    coarse.bisection_tolerance = 1e-300;
    coarse.max_bisections = 40;
    try {
        solve_whole_space(make_params(1, 3.0), 40.0, coarse);
        FAIL("expected a precision error");
    } catch (const PrecisionError& e) {
        CHECK(e.bracket_width > 0.0);
    }
}
