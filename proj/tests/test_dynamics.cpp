#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "ffmono/errors.hpp"
#include "ffmono/flow.hpp"
#include "ffmono/models.hpp"
#include "ffmono/turning.hpp"
#include "oracles.hpp"

using namespace ffmono;

TEST_CASE("turning points of the standard pendulum at (h, j) = (0, 0.5)") {
    // P(z) = 2(-z)(1-z^2) - 0.25; the bisection-scan oracle locates the
    // bracketing roots at resolution 1e-6 and refines them.
    auto pend = pendulum_system(PendulumPotential({0.0, 1.0}));
    const auto* pm = dynamic_cast<const PendulumModel*>(pend.get());
    const Polynomial P = pm->radial_poly(0.0, 0.5);

    const auto oracle =
        oracles::scan_roots([&](double z) { return P(z); }, -1.0, 1.0, 2000000);
    REQUIRE(oracle.size() == 2);

    const TurningInterval iv = turning_points(P, 0.5, 0.0);
    CHECK(iv.lo == doctest::Approx(oracle[0]).epsilon(1e-9));
    CHECK(iv.hi == doctest::Approx(oracle[1]).epsilon(1e-9));
    // frozen oracle values
    CHECK(iv.lo == doctest::Approx(-0.930402926556).epsilon(1e-9));
    CHECK(iv.hi == doctest::Approx(-0.127050844183).epsilon(1e-9));
    // roots located to 1e-12 and P > 0 between them
    CHECK(std::fabs(P(iv.lo)) < 1e-11);
    CHECK(std::fabs(P(iv.hi)) < 1e-11);
    CHECK(P(0.5 * (iv.lo + iv.hi)) > 0.0);
}

TEST_CASE("separatrix level (h = 1, j = 0) raises DegenerateRoot") {
    auto pend = pendulum_system(PendulumPotential({0.0, 1.0}));
    const auto* pm = dynamic_cast<const PendulumModel*>(pend.get());
    // P(1) = 0 identically since (1 - z^2) vanishes; at h = 1 that root is
    // double.
    const Polynomial P = pm->radial_poly(1.0, 0.0);
    CHECK_THROWS_AS(turning_points(P, 0.0, 1.0), degenerate_root);
}

TEST_CASE("symmetric potential gives a symmetric interval") {
    auto pend = pendulum_system(PendulumPotential({0.0, 0.0, 1.0}));
    const auto* pm = dynamic_cast<const PendulumModel*>(pend.get());
    const Polynomial P = pm->radial_poly(0.5, 0.0);
    const TurningInterval iv = turning_points(P, 0.0, 0.5);
    CHECK(iv.lo == doctest::Approx(-iv.hi).epsilon(1e-12));
}

TEST_CASE("NoOscillation below the potential minimum") {
    auto pend = pendulum_system(PendulumPotential({0.0, 1.0}));
    const auto* pm = dynamic_cast<const PendulumModel*>(pend.get());
    const Polynomial P = pm->radial_poly(-2.0, 0.1);
    CHECK_THROWS_AS(turning_points(P, 0.1, -2.0), no_oscillation);
}

TEST_CASE("linear model: X1 flow stretches the first coordinate by e^t") {
    auto lin = linear_focus_focus_model();
    PhasePoint p;
    p.coords = {1.0, 0.0, 0.0, 0.0};
    const double t = 0.7;
    const PhasePoint q = flow(*lin, p, {1.0, 0.0, t, 1e-11});
    CHECK(q.coords[0] == doctest::Approx(std::exp(t)).epsilon(1e-10));
    CHECK(std::fabs(q.coords[1]) < 1e-12);
    CHECK(std::fabs(q.coords[2]) < 1e-12);
    CHECK(std::fabs(q.coords[3]) < 1e-12);
}

TEST_CASE("moment map is conserved along flows") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-0.6, 0.6);
    auto pend = pendulum_system(PendulumPotential({0.0, 1.0}));
    auto lin = linear_focus_focus_model();
    for (int trial = 0; trial < 6; ++trial) {
        PhasePoint p;
        p.chart = PendulumModel::reduced;
        p.coords = {0.6 * u(rng), u(rng), u(rng), 0.4 + 0.2 * u(rng)};
        const double tol = 1e-9;
        const Vec2 f0 = pend->moment_map(p);
        const PhasePoint q = flow(*pend, p, {1.0, 0.3, 1.5, tol});
        const Vec2 f1 = pend->moment_map(q);
        CHECK(std::fabs(f1.x - f0.x) < tol);
        CHECK(std::fabs(f1.y - f0.y) < tol);

        PhasePoint lp;
        lp.coords = {u(rng) + 1.0, u(rng), u(rng), u(rng)};
        const Vec2 g0 = lin->moment_map(lp);
        const PhasePoint lq = flow(*lin, lp, {0.4, 1.0, 1.0, tol});
        const Vec2 g1 = lin->moment_map(lq);
        CHECK(std::fabs(g1.x - g0.x) < tol);
        CHECK(std::fabs(g1.y - g0.y) < tol);
    }
}

TEST_CASE("reversibility: forward then backward returns within 10x tolerance") {
    auto pend = pendulum_system(PendulumPotential({0.0, 1.0}));
    PhasePoint p;
    p.chart = PendulumModel::reduced;
    p.coords = {0.2, 0.4, 0.3, 0.5};
    const double tol = 1e-9;
    const PhasePoint q = flow(*pend, p, {1.0, 0.0, 2.0, tol});
    const PhasePoint back = flow(*pend, q, {1.0, 0.0, -2.0, tol});
    CHECK(pend->phase_distance(p, back) < 10.0 * tol);
}

TEST_CASE("commuting flows: X1 then X2 equals X2 then X1") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    auto pend = pendulum_system(PendulumPotential({0.0, 1.0}));
    auto lin = linear_focus_focus_model();
    const double tol = 1e-10, t1 = 0.8, t2 = 1.1;
    for (int trial = 0; trial < 50; ++trial) {
        PhasePoint p;
        p.chart = PendulumModel::reduced;
        p.coords = {0.5 * u(rng), u(rng), u(rng), 0.5 + 0.3 * u(rng)};
        const PhasePoint a =
            flow(*pend, flow(*pend, p, {1, 0, t1, tol}), {0, 1, t2, tol});
        const PhasePoint b =
            flow(*pend, flow(*pend, p, {0, 1, t2, tol}), {1, 0, t1, tol});
        CHECK(pend->phase_distance(a, b) < 100.0 * tol);

        PhasePoint lp;
        lp.coords = {1.0 + u(rng), u(rng), u(rng), u(rng)};
        const PhasePoint la =
            flow(*lin, flow(*lin, lp, {1, 0, 0.5, tol}), {0, 1, 0.9, tol});
        const PhasePoint lb =
            flow(*lin, flow(*lin, lp, {0, 1, 0.9, tol}), {1, 0, 0.5, tol});
        CHECK(lin->phase_distance(la, lb) < 100.0 * tol);
    }
}

TEST_CASE("ChartExit when a planar trajectory reaches the pole") {
    auto pend = pendulum_system(PendulumPotential({0.0, 1.0}));
    PhasePoint p;
    p.chart = PendulumModel::reduced;
    p.coords = {0.0, 1.8, 0.0, 0.0};  // j = 0, enough energy to pass the pole
    CHECK_THROWS_AS(flow(*pend, p, {1.0, 0.0, 5.0, 1e-8}), chart_exit);
}

TEST_CASE("flow input validation") {
    auto lin = linear_focus_focus_model();
    PhasePoint p;
    CHECK_THROWS_AS(flow(*lin, p, {1.0, 0.0, 1.0, -1.0}), invalid_config);
    PhasePoint bad;
    bad.coords = {std::nan(""), 0, 0, 0};
    CHECK_THROWS_AS(flow(*lin, bad, {1.0, 0.0, 1.0, 1e-9}), chart_exit);
}
