#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ffmono/dh.hpp"
#include "ffmono/errors.hpp"
#include "ffmono/models.hpp"

using namespace ffmono;

namespace {

int beyond_3_sigma(const DHProfile& prof) {
    int bad = 0;
    for (const auto& s : prof.samples) {
        const double se = std::sqrt(s.v_mc_err * s.v_mc_err + s.v_err * s.v_err);
        if (std::fabs(s.v - s.v_mc) > 3.0 * se) ++bad;
    }
    return bad;
}

}  // namespace

TEST_CASE("default window floors sit between the fixed components") {
    CHECK(default_energy_floor(*pendulum_system(PendulumPotential({0.0, 1.0}))) ==
          doctest::Approx(0.0));
    CHECK(default_energy_floor(*pendulum_system(PendulumPotential({0.0, 0.0, 1.0}))) ==
          doctest::Approx(0.5));
    CHECK(default_energy_floor(*pendulum_system(modified_pendulum_potential(1.0))) ==
          doctest::Approx(-0.5));
}

TEST_CASE("standard pendulum: normalized slope jump is -1 (Monte Carlo oracle)") {
    auto pend = pendulum_system(PendulumPotential({0.0, 1.0}));
    DHParams p;
    p.energy_cap = 1.5;
    p.c_max = 0.2;  // the wide range; the symmetrized fit stays unbiased
    p.samples = 41;
    p.mc_samples = 2000000;
    const DHProfile prof = dh_profile(*pend, p);
    CHECK(std::fabs(prof.k_fitted - 1.0) < 0.05);
    CHECK(prof.normalization == doctest::Approx(two_pi));
    CHECK(beyond_3_sigma(prof) == 0);
    // V is continuous across c = 0 and positive
    for (const auto& s : prof.samples) CHECK(s.v > 0.0);
}

TEST_CASE("V = z^2 pendulum: normalized slope jump is -2") {
    auto z2 = pendulum_system(PendulumPotential({0.0, 0.0, 1.0}));
    DHParams p;
    p.energy_cap = 1.5;
    p.c_max = 0.1;
    p.samples = 41;
    const DHProfile prof = dh_profile(*z2, p);
    CHECK(std::fabs(prof.k_fitted - 2.0) < 0.05);
}

TEST_CASE("window below the critical energy has no jump") {
    auto pend = pendulum_system(PendulumPotential({0.0, 1.0}));
    DHParams p;
    p.energy_cap = 0.8;
    p.energy_floor = 0.3;
    p.c_max = 0.05;
    p.samples = 41;
    const DHProfile prof = dh_profile(*pend, p);
    CHECK(std::fabs(prof.k_fitted) < 0.01);
    const DHCheckReport chk = dh_check(prof, 0);
    // residual = symmetry defect plus window curvature only
    CHECK(chk.residual_max < 0.05 * prof.normalization * p.c_max);
}

TEST_CASE("dh_check residual bounds") {
    DHParams p;
    p.c_max = 0.1;
    p.samples = 41;

    auto pend = pendulum_system(PendulumPotential({0.0, 1.0}));
    p.energy_cap = 1.5;
    const DHCheckReport std_chk = dh_check(dh_profile(*pend, p), 1);
    CHECK(std_chk.residual_max < 0.05 * two_pi * p.c_max);
    CHECK(std_chk.jump_vs_k < 0.05);

    // degenerate geometry converges slower: the looser bound applies
    auto r1 = pendulum_system(modified_pendulum_potential(1.0));
    p.energy_cap = 1.0;
    const DHCheckReport r1_chk = dh_check(dh_profile(*r1, p), 1);
    CHECK(r1_chk.residual_max < 0.1 * two_pi * p.c_max);
    CHECK(r1_chk.jump_vs_k < 0.05);
}

TEST_CASE("linear model: exactly piecewise linear") {
    auto lin = linear_focus_focus_model();
    DHParams p;
    p.energy_cap = 1.0;  // ball |point|^2 <= 1
    p.c_max = 0.1;
    p.samples = 41;
    p.mc_samples = 1000000;
    const DHProfile prof = dh_profile(*lin, p);
    CHECK(std::fabs(prof.k_fitted - 1.0) < 1e-9);
    const DHCheckReport chk = dh_check(prof, 1);
    CHECK(chk.residual_max < 1e-9);
    CHECK(beyond_3_sigma(prof) == 0);
    // V(c) = pi (E/2 - |c|)
    for (const auto& s : prof.samples)
        CHECK(s.v == doctest::Approx(pi * (0.5 - std::fabs(s.c))).epsilon(1e-12));
}

TEST_CASE("slope-jump estimate is stable under halving the momentum range") {
    auto pend = pendulum_system(PendulumPotential({0.0, 1.0}));
    DHParams p;
    p.energy_cap = 1.5;
    p.samples = 41;
    p.c_max = 0.1;
    const double k1 = dh_profile(*pend, p).k_fitted;
    p.c_max = 0.05;
    const double k2 = dh_profile(*pend, p).k_fitted;
    CHECK(std::fabs(k1 - k2) < 0.1 * std::fabs(k1));
}

TEST_CASE("jump insensitivity to the cutoff (localization is boundary-independent)") {
    auto pend = pendulum_system(PendulumPotential({0.0, 1.0}));
    DHParams p;
    p.c_max = 0.1;
    p.samples = 41;
    p.energy_cap = 1.5;
    const double k_a = dh_profile(*pend, p).k_fitted;
    p.energy_cap = 1.8;
    const double k_b = dh_profile(*pend, p).k_fitted;
    CHECK(std::fabs(k_a - k_b) < 0.02);
}

TEST_CASE("cross-module consistency: DH k equals the fiber census k") {
    struct Case {
        std::unique_ptr<ModelSystem> sys;
        Vec2 critical;
        double cap;
    };
    std::vector<Case> cases;
    cases.push_back({pendulum_system(PendulumPotential({0.0, 1.0})), {1.0, 0.0}, 1.5});
    cases.push_back({pendulum_system(PendulumPotential({0.0, 0.0, 1.0})), {1.0, 0.0}, 1.5});
    cases.push_back({pendulum_system(modified_pendulum_potential(1.0)), {0.5, 0.0}, 1.0});
    cases.push_back({linear_focus_focus_model(), {0.0, 0.0}, 1.0});
    for (const auto& c : cases) {
        DHParams p;
        p.energy_cap = c.cap;
        p.c_max = 0.1;
        p.samples = 41;
        const DHProfile prof = dh_profile(*c.sys, p);
        const long long k = std::llround(prof.k_fitted);
        CHECK(std::fabs(prof.k_fitted - k) < 0.05);
        CHECK(k == singular_fiber_census(*c.sys, c.critical).k);
    }
}

TEST_CASE("Monte Carlo determinism: identical seeds and serial/parallel agree bitwise") {
    auto pend = pendulum_system(PendulumPotential({0.0, 1.0}));
    DHParams p;
    p.energy_cap = 1.5;
    p.c_max = 0.1;
    p.samples = 21;
    p.mc_samples = 300000;
    p.seed = 777;
    const DHProfile a = dh_profile(*pend, p);
    const DHProfile b = dh_profile(*pend, p);
    p.exec = Exec::serial;
    const DHProfile c = dh_profile(*pend, p);
    for (int i = 0; i < p.samples; ++i) {
        CHECK(a.samples[i].v_mc == b.samples[i].v_mc);
        CHECK(a.samples[i].v_mc == c.samples[i].v_mc);
        CHECK(a.samples[i].v == c.samples[i].v);
    }
    p.seed = 778;
    p.exec = Exec::parallel;
    const DHProfile d = dh_profile(*pend, p);
    bool any_diff = false;
    for (int i = 0; i < p.samples; ++i)
        any_diff = any_diff || d.samples[i].v_mc != a.samples[i].v_mc;
    CHECK(any_diff);
}

TEST_CASE("parameter validation") {
    auto pend = pendulum_system(PendulumPotential({0.0, 1.0}));
    DHParams p;
    p.energy_cap = -2.0;  // below the window floor
    CHECK_THROWS_AS(dh_profile(*pend, p), cutoff_too_low);
    DHParams even;
    even.samples = 40;
    CHECK_THROWS_AS(dh_profile(*pend, even), invalid_config);
    auto lin = linear_focus_focus_model();
    DHParams small;
    small.energy_cap = 0.1;  // momentum range reaches the ball boundary
    small.c_max = 0.2;
    CHECK_THROWS_AS(dh_profile(*lin, small), cutoff_too_low);
}
