#pragma once

#include <optional>
#include <vector>

#include "ffmono/models.hpp"

namespace ffmono {

enum class Exec { serial, parallel };

// Basis of the lattice of flow-time pairs (t1, t2) whose combined flow
// (t1 along X1, then t2 along X2) is the identity on the Liouville torus over
// base_value. generator_s1 is the circle-action vector, (0, 2*pi) for all
// built-ins; generator_long = (T, Theta) with Theta normalized to [0, 2*pi)
// at a continuation basepoint and left un-normalized afterwards.
struct PeriodLatticeBasis {
    Vec2 generator_s1{0.0, two_pi};
    Vec2 generator_long{0.0, 0.0};
    Vec2 base_value{0.0, 0.0};
    double quad_error = 0.0;
};

struct LatticeOptions {
    double margin = 1e-3;       // minimum distance to the critical set
    double quad_tol = 1e-10;    // tolerance of the period/rotation quadratures
    double flow_tol = 1e-9;     // tolerance of shooting flows (linear model)
    bool verify = false;        // close up the generators by explicit flows
    double verify_tol = 1e-7;
};

PeriodLatticeBasis period_lattice(const ModelSystem& system, const Vec2& value,
                                  const LatticeOptions& opts = {});

// Batch evaluation at many regular values; the OpenMP kernel with a serial
// reference path (Exec::serial) kept for testing and benchmarking.
std::vector<PeriodLatticeBasis> period_lattice_batch(const ModelSystem& system,
                                                     const std::vector<Vec2>& values,
                                                     const LatticeOptions& opts = {},
                                                     Exec exec = Exec::parallel);

// Detects the S^1-action: for each near-fiber point, reduces the period
// lattice and keeps the generator closest to a pure circle action (minimal
// first component), returning the common (kappa, eta) with its spread.
struct S1Coefficients {
    double kappa = 0.0;
    double eta = 0.0;
    double spread = 0.0;
};

S1Coefficients s1_coefficients(const ModelSystem& system,
                               const std::vector<PhasePoint>& near_fiber_points,
                               const LatticeOptions& opts = {});

// A phase point on the torus over `value` (used by tests and the S^1 probe).
PhasePoint torus_point(const ModelSystem& system, const Vec2& value);

// Pendulum action I2(h, j) = (1/2pi) \oint p_z dz over the oscillation
// interval (principal branch; even in j).
double pendulum_second_action(const PendulumModel& pendulum, double h, double j,
                              double quad_tol = 1e-10);

}  // namespace ffmono
