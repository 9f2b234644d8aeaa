#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ffmono/errors.hpp"
#include "ffmono/geom.hpp"
#include "ffmono/quadrature.hpp"
#include "oracles.hpp"

using namespace ffmono;

TEST_CASE("arcsine integral: dz / sqrt((1-z)(1+z)) over (-1,1) equals pi") {
    auto f = [](double z) { return 1.0 / std::sqrt((1.0 - z) * (1.0 + z)); };
    const QuadratureResult r = singular_quadrature(f, -1.0, 1.0, 1e-13);
    CHECK(std::fabs(r.value - pi) < 1e-12);
    CHECK(r.error_estimate >= 0.0);
    CHECK(std::isfinite(r.value));
}

TEST_CASE("scaled square-root factor: dz / sqrt(c (b-z)(z-a)) equals pi / sqrt(c)") {
    const double a = -0.3, b = 0.8, c = 2.5;
    auto f = [&](double z) { return 1.0 / std::sqrt(c * (b - z) * (z - a)); };
    const QuadratureResult r = singular_quadrature(f, a, b, 1e-13);
    CHECK(std::fabs(r.value - pi / std::sqrt(c)) < 1e-12);
}

TEST_CASE("rotation integrand matches a 1e6-point midpoint oracle") {
    // Standard pendulum at (h, j) = (0, 0.5): P(z) = 2(-z)(1-z^2) - 0.25.
    const double j = 0.5;
    auto P = [](double z) { return 2.0 * (-z) * (1.0 - z * z) - 0.25; };
    const auto roots = oracles::scan_roots(P, -1.0, 1.0, 1000000);
    REQUIRE(roots.size() >= 2);
    const double zlo = roots[0], zhi = roots[1];
    auto f = [&](double z) { return j / ((1.0 - z * z) * std::sqrt(std::fmax(P(z), 0.0))); };

    // Oracle: midpoint rule on the sin-substituted integrand.
    const double m = 0.5 * (zlo + zhi), r = 0.5 * (zhi - zlo);
    auto sub = [&](double u) { return f(m + r * std::sin(u)) * r * std::cos(u); };
    const double oracle = oracles::midpoint_rule(sub, -0.5 * pi, 0.5 * pi, 1000000);

    const QuadratureResult q = singular_quadrature(f, zlo, zhi, 1e-11);
    CHECK(std::fabs(q.value - oracle) < 1e-8);
}

TEST_CASE("weighted form agrees with the plain singular quadrature") {
    const double a = -0.9, b = 0.4;
    auto smooth = [](double z) { return 1.0 / (2.0 + std::sin(3.0 * z)); };
    auto f = [&](double z) { return smooth(z) / std::sqrt((z - a) * (b - z)); };
    const QuadratureResult plain = singular_quadrature(f, a, b, 1e-12);
    const QuadratureResult weighted = weighted_endpoint_quadrature(
        [&](double z, double) { return smooth(z); }, a, b, 1e-12);
    CHECK(std::fabs(plain.value - weighted.value) < 1e-10);
}

TEST_CASE("halving the tolerance never moves the result by more than the old estimate") {
    auto f1 = [](double z) { return 1.0 / std::sqrt((1.0 - z) * (z + 0.2)); };
    auto f2 = [](double z) {
        return (1.0 + 5.0 * z * z) / std::sqrt((0.7 - z) * (z + 0.7)) / (1.01 - z);
    };
    struct Case {
        std::function<double(double)> f;
        double a, b;
    };
    for (const Case& c : {Case{f1, -0.2, 1.0}, Case{f2, -0.7, 0.7}}) {
        double tol = 1e-6;
        QuadratureResult prev = singular_quadrature(c.f, c.a, c.b, tol);
        for (int it = 0; it < 6; ++it) {
            tol *= 0.5;
            const QuadratureResult next = singular_quadrature(c.f, c.a, c.b, tol);
            CHECK(std::fabs(next.value - prev.value) <= prev.error_estimate + 1e-14);
            prev = next;
        }
    }
}

TEST_CASE("non-integrable interior pole raises NonConvergence") {
    auto f = [](double z) { return 1.0 / ((z - 0.1) * (z - 0.1)); };
    CHECK_THROWS_AS(adaptive_integrate(f, -1.0, 1.0, 1e-10), non_convergence);
}

TEST_CASE("adaptive panels resolve an interior spike") {
    // Narrow Lorentzian away from the endpoints.
    auto f = [](double z) { return 1e-4 / ((z - 0.3) * (z - 0.3) + 1e-8); };
    const QuadratureResult r = adaptive_integrate(f, -1.0, 1.0, 1e-10);
    // \int 1e-4 / ((z-c)^2 + w^2) dz = (1e-4 / w) (atan((1-c)/w) + atan((1+c)/w))
    const double w = 1e-4;
    const double exact = (1e-4 / w) * (std::atan(0.7 / w) + std::atan(1.3 / w));
    CHECK(std::fabs(r.value - exact) < 1e-8 * exact);
    CHECK(r.refinement_depth > 5);
}
