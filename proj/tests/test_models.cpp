#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "ffmono/errors.hpp"
#include "ffmono/flow.hpp"
#include "ffmono/models.hpp"
#include "oracles.hpp"

using namespace ffmono;

namespace {

PhasePoint random_point(const ModelSystem& sys, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (;;) {
        PhasePoint p;
        if (dynamic_cast<const PendulumModel*>(&sys)) {
            p.chart = PendulumModel::reduced;
            p.coords = {0.8 * u(rng), u(rng), pi * u(rng), u(rng)};
        } else {
            p.coords = {u(rng), u(rng), u(rng), u(rng)};
        }
        if (sys.chart_valid(p)) return p;
    }
}

double poisson_bracket(const ModelSystem& sys, const PhasePoint& p) {
    const auto g1 = sys.gradient(0, p);
    const auto g2 = sys.gradient(1, p);
    // {F1, F2} over interleaved (q, p) pairs
    return g1[0] * g2[1] - g1[1] * g2[0] + g1[2] * g2[3] - g1[3] * g2[2];
}

}  // namespace

TEST_CASE("linear model moment map values") {
    auto lin = linear_focus_focus_model();
    PhasePoint origin;
    CHECK(lin->moment_map(origin).x == 0.0);
    CHECK(lin->moment_map(origin).y == 0.0);
    PhasePoint p;
    p.coords = {1.0, 1.0, 0.0, 0.0};  // (x1, y1, x2, y2)
    CHECK(lin->moment_map(p).x == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(lin->moment_map(p).y == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("linear model: exact vector fields") {
    // X1 = (x1, -y1, x2, -y2) and X2 = (-x2, -y2, x1, y1) on (x1, y1, x2, y2).
    auto lin = linear_focus_focus_model();
    PhasePoint p;
    p.coords = {0.3, -0.7, 1.2, 0.5};
    const auto x1 = lin->combined_field(1.0, 0.0, p);
    CHECK(x1[0] == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(x1[1] == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(x1[2] == doctest::Approx(1.2).epsilon(1e-15));
    CHECK(x1[3] == doctest::Approx(-0.5).epsilon(1e-15));
    const auto x2 = lin->combined_field(0.0, 1.0, p);
    CHECK(x2[0] == doctest::Approx(-1.2).epsilon(1e-15));
    CHECK(x2[1] == doctest::Approx(-0.5).epsilon(1e-15));
    CHECK(x2[2] == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(x2[3] == doctest::Approx(-0.7).epsilon(1e-15));
}

TEST_CASE("linear model: X2 flow for 2pi is the identity (rotation oracle)") {
    auto lin = linear_focus_focus_model();
    PhasePoint p;
    p.coords = {1.0, 0.0, 0.0, 1.0};
    const PhasePoint q = flow(*lin, p, {0.0, 1.0, two_pi, 1e-11});
    // closed-form: the X2 flow is exp(t R) with R a rotation generator, so
    // exp(2 pi R) = I exactly.
    CHECK(lin->phase_distance(p, q) < 1e-10);
}

TEST_CASE("pendulum factories and singular-point lists") {
    auto std_p = pendulum_system(PendulumPotential({0.0, 1.0}));
    REQUIRE(std_p->singular_points().size() == 1);
    CHECK(std_p->singular_points()[0].label == "north pole");
    CHECK(std_p->singular_points()[0].moment_value.x == doctest::Approx(1.0));
    CHECK(std_p->singular_points()[0].moment_value.y == 0.0);

    // V(z) = z^2: both poles are unstable and share the level (1, 0). The
    // instability oracle is the potential shape itself.
    auto z2 = pendulum_system(PendulumPotential({0.0, 0.0, 1.0}));
    REQUIRE(z2->singular_points().size() == 2);
    for (const auto& sp : z2->singular_points()) {
        CHECK(sp.moment_value.x == doctest::Approx(1.0));
        CHECK(sp.moment_value.y == 0.0);
    }
    for (int sigma : {1, -1}) {
        const auto& pot = dynamic_cast<const PendulumModel&>(*z2).potential();
        CHECK(pot(sigma * 1.0) > pot(sigma * 0.9));  // local max at the pole
    }

    CHECK_THROWS_AS(PendulumPotential({1, 2, 3, 4, 5, 6, 7, 8}), invalid_potential);
    CHECK_THROWS_AS(PendulumPotential({0.0, std::nan("")}), invalid_potential);
}

TEST_CASE("classification: linear model origin is exactly (1,0,0,1)") {
    auto lin = linear_focus_focus_model();
    PhasePoint origin;
    const SingularPointReport r = classify_singular_point(*lin, origin);
    CHECK(r.classification == PointType::focus_focus);
    CHECK(std::fabs(r.a - 1.0) < 1e-10);
    CHECK(std::fabs(r.b) < 1e-10);
    CHECK(std::fabs(r.c) < 1e-10);
    CHECK(std::fabs(r.d - 1.0) < 1e-10);
    CHECK(std::fabs(r.det_ab_cd - 1.0) < 1e-10);
    REQUIRE(r.weights.has_value());
    CHECK(r.weights->first == 1);
    CHECK(r.weights->second == -1);

    // finite-difference path agrees
    ClassifyOptions fd;
    fd.use_exact_hessians = false;
    const SingularPointReport rf = classify_singular_point(*lin, origin, fd);
    CHECK(rf.classification == PointType::focus_focus);
    CHECK(std::fabs(rf.det_ab_cd - 1.0) < 1e-8);
}

TEST_CASE("classification: standard pendulum north pole is focus-focus") {
    auto sys = pendulum_system(PendulumPotential({0.0, 1.0}));
    PhasePoint pole;
    pole.chart = PendulumModel::north;
    const SingularPointReport r = classify_singular_point(*sys, pole);
    CHECK(r.classification == PointType::focus_focus);
    // Hessian oracle: independent finite differences give the same invariant.
    const Mat4 h1 = oracles::fd_hessian(*sys, 0, pole);
    const Mat4 h2 = oracles::fd_hessian(*sys, 1, pole);
    const Mat4 a1 = symplectic_j() * h1, a2 = symplectic_j() * h2;
    const double s1 = std::sqrt(std::fmax(det4(a1), 0.0));
    const double s2 = std::sqrt(std::fmax(det4(a2), 0.0));
    const double sig = 0.5 * (std::sqrt(std::fmax(det4(a1 + a2), 0.0)) - s1 - s2);
    CHECK(std::sqrt(std::fmax(s1 * s2 - sig * sig, 0.0)) ==
          doctest::Approx(r.det_ab_cd).epsilon(1e-6));
}

TEST_CASE("classification: modified pendulum R=1 pole is degenerate") {
    auto sys = pendulum_system(modified_pendulum_potential(1.0));
    PhasePoint pole;
    pole.chart = PendulumModel::north;
    const SingularPointReport r = classify_singular_point(*sys, pole);
    CHECK(r.classification == PointType::degenerate);
    CHECK(r.det_ab_cd < 1e-8);
    CHECK_FALSE(r.weights.has_value());

    // The finite-difference Hessian oracle confirms the vanishing invariant:
    // the FD error (~1e-9 per entry) enters (ad - bc)^2 linearly, so the
    // squared invariant vanishes within 1e-8 while |ad - bc| itself resolves
    // only to its square root.
    ClassifyOptions fd;
    fd.use_exact_hessians = false;
    const SingularPointReport rf = classify_singular_point(*sys, pole, fd);
    CHECK(rf.classification == PointType::degenerate);
    CHECK(rf.det_ab_cd * rf.det_ab_cd < 1e-8);
}

TEST_CASE("classification: R=0.9 stable pole is other-nondegenerate") {
    auto sys = pendulum_system(modified_pendulum_potential(0.9));
    PhasePoint pole;
    pole.chart = PendulumModel::north;
    // not on the census list (stable), but dF = 0 there
    const SingularPointReport r = classify_singular_point(*sys, pole);
    CHECK(r.classification == PointType::other_nondegenerate);
}

TEST_CASE("classification rejects regular points") {
    auto sys = pendulum_system(PendulumPotential({0.0, 1.0}));
    PhasePoint p;
    p.chart = PendulumModel::reduced;
    p.coords = {0.2, 0.3, 0.0, 0.4};
    CHECK_THROWS_AS(classify_singular_point(*sys, p), not_singular);
}

TEST_CASE("fiber census") {
    auto std_p = pendulum_system(PendulumPotential({0.0, 1.0}));
    const FiberCensus c1 = singular_fiber_census(*std_p, {1.0, 0.0});
    CHECK(c1.k == 1);
    REQUIRE(c1.signs.size() == 1);
    CHECK(c1.signs[0] == 1);

    auto z2 = pendulum_system(PendulumPotential({0.0, 0.0, 1.0}));
    const FiberCensus c2 = singular_fiber_census(*z2, {1.0, 0.0});
    CHECK(c2.k == 2);
    CHECK(c2.signs == std::vector<int>{1, 1});

    auto lin = linear_focus_focus_model();
    const FiberCensus c3 = singular_fiber_census(*lin, {0.0, 0.0});
    CHECK(c3.k == 1);

    CHECK_THROWS_AS(singular_fiber_census(*std_p, {0.5, 0.2}), not_critical);

    // stability under coefficient perturbations below 1e-10
    auto z2_eps = pendulum_system(PendulumPotential({1e-11, -1e-11, 1.0 + 1e-11}));
    const FiberCensus c4 =
        singular_fiber_census(*z2_eps, {z2_eps->singular_points()[0].moment_value.x, 0.0});
    CHECK(c4.k == 2);
}

TEST_CASE("exact gradients agree with finite differences to 1e-6 relative") {
    std::mt19937_64 rng(7);
    std::vector<std::unique_ptr<ModelSystem>> systems;
    systems.push_back(linear_focus_focus_model());
    systems.push_back(pendulum_system(PendulumPotential({0.0, 1.0})));
    systems.push_back(pendulum_system(modified_pendulum_potential(0.9)));
    for (const auto& sys : systems) {
        for (int trial = 0; trial < 25; ++trial) {
            const PhasePoint p = random_point(*sys, rng);
            for (int comp = 0; comp < 2; ++comp) {
                const auto ge = sys->gradient(comp, p);
                const auto gf = oracles::fd_gradient(*sys, comp, p);
                double scale = 1.0;
                for (int i = 0; i < 4; ++i) scale = std::fmax(scale, std::fabs(ge[i]));
                for (int i = 0; i < 4; ++i)
                    CHECK(std::fabs(ge[i] - gf[i]) < 1e-6 * scale);
            }
        }
    }
}

TEST_CASE("Poisson commutation {F1, F2} = 0 at 100 random points per model") {
    std::mt19937_64 rng(11);
    std::vector<std::unique_ptr<ModelSystem>> systems;
    systems.push_back(linear_focus_focus_model());
    systems.push_back(pendulum_system(PendulumPotential({0.0, 1.0})));
    systems.push_back(pendulum_system(PendulumPotential({0.0, 0.0, 1.0})));
    for (const auto& sys : systems)
        for (int trial = 0; trial < 100; ++trial)
            CHECK(std::fabs(poisson_bracket(*sys, random_point(*sys, rng))) < 1e-8);
}

TEST_CASE("listed singular points satisfy dF1 = dF2 = 0 by finite differences") {
    std::vector<std::unique_ptr<ModelSystem>> systems;
    systems.push_back(linear_focus_focus_model());
    systems.push_back(pendulum_system(PendulumPotential({0.0, 1.0})));
    systems.push_back(pendulum_system(PendulumPotential({0.0, 0.0, 1.0})));
    systems.push_back(pendulum_system(modified_pendulum_potential(1.0)));
    for (const auto& sys : systems)
        for (const auto& sp : sys->singular_points())
            for (int comp = 0; comp < 2; ++comp) {
                const auto g = oracles::fd_gradient(*sys, comp, sp.location);
                for (int i = 0; i < 4; ++i) CHECK(std::fabs(g[i]) < 1e-8);
            }
}

TEST_CASE("the F2 flow has period 2pi from chart-valid regular points") {
    std::mt19937_64 rng(23);
    std::vector<std::unique_ptr<ModelSystem>> systems;
    systems.push_back(linear_focus_focus_model());
    systems.push_back(pendulum_system(PendulumPotential({0.0, 1.0})));
    for (const auto& sys : systems) {
        REQUIRE(sys->s1_component() == 1);
        for (int trial = 0; trial < 4; ++trial) {
            const PhasePoint p = random_point(*sys, rng);
            const PhasePoint q = flow(*sys, p, {0.0, 1.0, two_pi, 1e-10});
            CHECK(sys->phase_distance(p, q) < 1e-8);
        }
    }
    // and in the exact pole chart of the pendulum, where the flow is a
    // genuine simultaneous rotation
    auto pend = pendulum_system(PendulumPotential({0.0, 1.0}));
    PhasePoint p;
    p.chart = PendulumModel::north;
    p.coords = {0.11, 0.05, -0.07, 0.12};
    const PhasePoint q = flow(*pend, p, {0.0, 1.0, two_pi, 1e-10});
    CHECK(pend->phase_distance(p, q) < 1e-8);
}

TEST_CASE("critical distance and island bounds") {
    auto r09 = pendulum_system(modified_pendulum_potential(0.9));
    const auto* pm = dynamic_cast<const PendulumModel*>(r09.get());
    const auto island = pm->island_bounds();
    REQUIRE(island.has_value());
    // island floor at the pole level V(1); the roof exceeds the bump top
    // V(R) = R/2 because the relative-equilibrium curve rises with |j|
    CHECK((*island)[0] == doctest::Approx(1.0 - 1.0 / 1.8).epsilon(1e-6));
    CHECK((*island)[1] >= 0.45 - 1e-9);
    CHECK((*island)[1] < 0.46);
    CHECK((*island)[2] > 0.0);
    CHECK((*island)[2] < 0.1);

    // points inside the island are close to the critical set; far points are far
    CHECK(pm->critical_distance({(*island)[0] - 0.02, 0.0}) > 5e-3);
    CHECK(pm->critical_distance({1.0 - 1.0 / 1.8, 0.0}) < 1e-4);

    auto std_p = pendulum_system(PendulumPotential({0.0, 1.0}));
    const auto* sm = dynamic_cast<const PendulumModel*>(std_p.get());
    CHECK_FALSE(sm->island_bounds().has_value());
    CHECK(sm->critical_distance({1.0, 0.0}) < 1e-12);
    CHECK(sm->critical_distance({1.0, 0.3}) == doctest::Approx(0.3).epsilon(1e-3));
}
