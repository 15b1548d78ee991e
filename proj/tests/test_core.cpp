#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "nlsball/core.hpp"
#include "nlsball/errors.hpp"
#include "oracles.hpp"

using namespace nlsball;
using std::numbers::pi;

TEST_CASE("params validation and regime") {
    CHECK_THROWS_AS(make_params(0, 3.0), ParameterError);
    CHECK_THROWS_AS(make_params(1, 1.0), ParameterError);
    CHECK_THROWS_AS(make_params(3, 5.0), ParameterError);  // Sobolev limit for N = 3
    CHECK_THROWS_AS(make_params(4, 3.0), ParameterError);
    CHECK(make_params(1, 3.0).regime == Regime::subcritical);
    CHECK(make_params(1, 5.0).regime == Regime::L2critical);
    CHECK(make_params(3, 1.0 + 4.0 / 3.0).regime == Regime::L2critical);
    CHECK(make_params(3, 3.0).regime == Regime::supercritical);
    CHECK(std::isinf(make_params(2, 7.0).sobolev_limit));
    CHECK(make_params(3, 3.0).sobolev_limit == doctest::Approx(5.0));
}

TEST_CASE("grid quadrature") {
    SUBCASE("ball volume N=3") {
        auto g = make_grid(make_params(3, 3.0), 1024, 1.0);
        const double vol = integrate_values(*g, std::vector<double>(g->size(), 1.0));
        CHECK(std::abs(vol / (4.0 * pi / 3.0) - 1.0) < 1e-10);
    }
    SUBCASE("interval N=1") {
        auto g = make_grid(make_params(1, 3.0), 512, 1.0);
        CHECK(g->omega() == doctest::Approx(2.0).epsilon(1e-15));
        const double vol = integrate_values(*g, std::vector<double>(g->size(), 1.0));
        CHECK(std::abs(vol - 2.0) < 1e-12);
    }
    SUBCASE("r^2 over the disk") {
        auto g = make_grid(make_params(2, 3.0), 512, 1.0);
        std::vector<double> f(g->size());
        for (std::size_t i = 0; i < f.size(); ++i) f[i] = g->node(i) * g->node(i);
        CHECK(std::abs(integrate_values(*g, f) / (pi / 2.0) - 1.0) < 1e-10);
    }
    SUBCASE("quadratic exactness, nonnegative weights, several N and parities") {
        for (int N = 1; N <= 6; ++N) {
            for (int n : {64, 65, 257}) {
                for (double grading : {1.0, 1.7}) {
                    auto g = make_grid(make_params(N, 1.0 + 1.0 / N), n, 1.3, {grading});
                    for (double w : g->weights()) CHECK(w >= 0.0);
                    for (double w : g->lumped()) CHECK(w >= 0.0);
                    for (int k = 0; k <= 2; ++k) {
                        std::vector<double> f(g->size());
                        for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::pow(g->node(i), k);
                        const double exact = sphere_area(N) * std::pow(1.3, N + k) / (N + k);
                        // Linear functions are integrated exactly; quadratics up to the
                        // trapezoid panels that replace Simpson where its weights go negative.
                        INFO("N=" << N << " n=" << n << " grading=" << grading << " k=" << k);
                        CHECK(std::abs(integrate_values(*g, f) / exact - 1.0) < (k < 2 ? 1e-12 : (grading == 1.0 ? 1e-8 : 1e-6)));
                    }
                }
            }
        }
    }
    SUBCASE("errors") {
        auto params = make_params(1, 3.0);
        CHECK_THROWS_AS(make_grid(params, 15, 1.0), ParameterError);
        CHECK_THROWS_AS(make_grid(params, 64, 0.0), ParameterError);
        CHECK_THROWS_AS(make_grid(params, 64, -1.0), ParameterError);
    }
}

TEST_CASE("sphere area") {
    CHECK(sphere_area(1) == doctest::Approx(2.0));
    CHECK(sphere_area(2) == doctest::Approx(2 * pi));
    CHECK(sphere_area(3) == doctest::Approx(4 * pi));
    CHECK(sphere_area(4) == doctest::Approx(2 * pi * pi));
}

TEST_CASE("integrate and grad_norm_sq on the 1D eigenfunction") {
    auto params = make_params(1, 3.0);
    auto g = make_grid(params, 2049, 1.0);
    // cos(pi x / 2) sampled exactly, so the checks isolate the quadrature.
    RadialProfile phi = zero_profile(g);
    for (std::size_t i = 0; i < g->size(); ++i) phi.values[i] = std::cos(pi * g->node(i) / 2.0);
    CHECK(std::abs(integrate(phi, [](double v) { return v * v; }) - 1.0) < 1e-12);
    CHECK(std::abs(integrate(phi, [](double v) { return std::pow(v, 4); }) - 0.75) < 1e-12);
    CHECK(std::abs(grad_norm_sq(phi) - pi * pi / 4.0) < 1e-6);
    CHECK(integrate(zero_profile(g), [](double v) { return std::sin(v); }) == 0.0);
    CHECK(grad_norm_sq(zero_profile(g)) == 0.0);
}

TEST_CASE("constant profile has zero gradient") {
    auto g = make_grid(make_params(3, 3.0), 100, 1.0);
    RadialProfile u = zero_profile(g);
    for (auto& v : u.values) v = 2.5;
    CHECK(grad_norm_sq(u) < 1e-20);
}

TEST_CASE("hermite evaluation reproduces cubics") {
    auto g = make_grid(make_params(1, 3.0), 33, 1.0);
    RadialProfile u = zero_profile(g);
    u.slopes.resize(g->size());
    for (std::size_t i = 0; i < g->size(); ++i) {
        const double r = g->node(i);
        u.values[i] = 1 - 2 * r * r + r * r * r;
        u.slopes[i] = -4 * r + 3 * r * r;
    }
    for (double r : {0.0, 0.013, 0.4, 0.77, 1.0}) {
        CHECK(u.evaluate(r) == doctest::Approx(1 - 2 * r * r + r * r * r).epsilon(1e-13));
    }
    CHECK(u.evaluate(1.5) == 0.0);
}

TEST_CASE("principal eigenpair against closed forms") {
    SUBCASE("N=1") {
        auto params = make_params(1, 3.0);
        auto eig = principal_eigenpair(params, make_grid(params, 2049, 1.0));
        CHECK(std::abs(eig.lambda1 / (pi * pi / 4) - 1.0) < 1e-8);
        CHECK(std::abs(integrate(eig.phi1, [](double v) { return v * v; }) - 1.0) < 1e-10);
        // phi1 matches cos(pi x / 2) pointwise to discretization accuracy.
        double err = 0.0;
        for (std::size_t i = 0; i < eig.phi1.size(); ++i) {
            err = std::max(err, std::abs(eig.phi1.values[i] - std::cos(pi * eig.phi1.grid->node(i) / 2)));
        }
        CHECK(err < 1e-6);
        CHECK(std::abs(integrate(eig.phi1, [](double v) { return std::pow(v, 4); }) - 0.75) < 1e-6);
    }
    SUBCASE("N=2 against the Bessel zero oracle") {
        auto params = make_params(2, 3.0);
        auto eig = principal_eigenpair(params, make_grid(params, 2049, 1.0));
        const double j01 = oracle::bessel_j_zero(0.0);
        CHECK(j01 == doctest::Approx(2.404825557695773).epsilon(1e-14));
        CHECK(std::abs(eig.lambda1 / (j01 * j01) - 1.0) < 1e-8);
    }
    SUBCASE("N=3") {
        auto params = make_params(3, 3.0);
        auto g = make_grid(params, 2049, 1.0);
        auto eig = principal_eigenpair(params, g);
        CHECK(std::abs(eig.lambda1 / (pi * pi) - 1.0) < 1e-8);
        for (std::size_t i = 0; i + 1 < eig.phi1.size(); ++i) CHECK(eig.phi1.values[i] > 0.0);
        // Eigen-identity and the closed-form gradient norm.
        const double mass = integrate(eig.phi1, [](double v) { return v * v; });
        CHECK(std::abs(grad_norm_sq(eig.phi1) / (eig.lambda1 * mass) - 1.0) < 1e-6);
        CHECK(std::abs(grad_norm_sq(eig.phi1) / (pi * pi) - 1.0) < 1e-6);
    }
    SUBCASE("higher dimension against the Bessel zero oracle") {
        for (int N : {4, 5}) {
            auto params = make_params(N, 1.5);
            auto eig = principal_eigenpair(params, make_grid(params, 2049, 1.0));
            const double j = oracle::bessel_j_zero(0.5 * N - 1.0);
            CHECK(std::abs(eig.lambda1 / (j * j) - 1.0) < 1e-8);
        }
    }
}

TEST_CASE("second-order convergence of the discrete eigenvalue") {
    for (int N : {1, 2, 3}) {
        auto params = make_params(N, 1.5);
        double prev = 0.0, prev_change = 0.0;
        for (int k = 0; k < 4; ++k) {
            const int n = 64 * (1 << k) + 1;
            const double l = principal_eigenpair(params, make_grid(params, n, 1.0)).lambda1_discrete;
            if (k >= 1) {
                const double change = std::abs(l - prev);
                if (k >= 2) CHECK(change < prev_change / 3.5);
                prev_change = change;
            }
            prev = l;
        }
    }
}

TEST_CASE("cached ball eigenvalue") {
    CHECK(ball_lambda1(3) == doctest::Approx(pi * pi).epsilon(1e-9));
    CHECK(ball_lambda1(1) == doctest::Approx(pi * pi / 4).epsilon(1e-9));
    CHECK(ball_lambda1(3) == ball_lambda1(3));
}
