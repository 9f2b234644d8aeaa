#pragma once

#include <vector>

#include "ffmono/poly.hpp"

namespace ffmono {

struct TurningInterval {
    double lo = 0.0;
    double hi = 0.0;
};

// All maximal intervals of {P > 0} inside (-1, 1), endpoints located to
// ~1e-12. Throws no_oscillation when P <= 0 on the whole interval and
// degenerate_root when an interval endpoint is a (near-)double root, which
// signals a value too close to the critical set.
std::vector<TurningInterval> oscillation_intervals(const Polynomial& P,
                                                   double double_root_tol = 1e-10);

// The oscillation interval (z-, z+) bracketing the motion: the widest
// component of {P > 0}. `j` and `h` are carried for error messages only; P
// already encodes them.
TurningInterval turning_points(const Polynomial& P, double j = 0.0, double h = 0.0);

}  // namespace ffmono
