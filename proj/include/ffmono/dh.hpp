#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ffmono/lattice.hpp"
#include "ffmono/models.hpp"

namespace ffmono {

// One sample of the reduced-volume profile V(c): quadrature estimate plus an
// optional Monte Carlo cross-estimate with its standard error.
struct DHSample {
    double c = 0.0;
    double v = 0.0;
    double v_err = 0.0;
    double v_mc = 0.0;
    double v_mc_err = 0.0;
};

struct DHParams {
    double energy_cap = 1.5;                 // E of the localization window
    std::optional<double> energy_floor;      // defaults per model, see below
    double c_max = 0.2;                      // symmetric momentum range
    int samples = 41;                        // odd, so c = 0 is sampled
    double quad_tol = 1e-9;
    long long mc_samples = 0;                // 0 disables the MC estimator
    std::uint64_t seed = 20020301;
    Exec exec = Exec::parallel;
};

struct DHProfile {
    double energy_cap = 0.0;
    double energy_floor = 0.0;
    double normalization = two_pi;  // raw area units per affine-length unit
    std::vector<DHSample> samples;
    double slope_pos = 0.0;   // fit over the outer 40% of c > 0
    double slope_neg = 0.0;   // fit over the outer 40% of c < 0
    double jump = 0.0;        // slope_pos - slope_neg, raw units
    double k_fitted = 0.0;    // -jump / normalization
    std::uint64_t seed = 0;
    long long mc_samples = 0;
};

// Reduced-volume profile of the S^1-momentum on the localized region
// {floor <= H <= E}. The window (rather than a bare sublevel set) keeps
// exactly the fixed points on the singular fiber inside the region. For the
// pendulum family V(c) = area{(z,p_z) : floor <= H_c <= E} with H_c the
// reduced Hamiltonian with centrifugal term c^2/(2(1-z^2)); for the linear
// model the reduced area of {f2 = c} within the ball of radius sqrt(2E).
DHProfile dh_profile(const ModelSystem& system, const DHParams& params);

struct DHCheckReport {
    double residual_max = 0.0;   // max_c |V(c)+V(-c)-2V(0) + k*norm*c|
    double jump_vs_k = 0.0;      // |k_fitted - k|
};

DHCheckReport dh_check(const DHProfile& profile, long long k);

// Default localization floor: halfway between the energy of the second
// S^1-fixed component (the stable pole) and the singular-fiber energy, so the
// window contains only the fixed points of the fiber under study.
double default_energy_floor(const ModelSystem& system);

}  // namespace ffmono
