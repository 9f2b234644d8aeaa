#pragma once

#include <vector>

#include "ffmono/lattice.hpp"
#include "ffmono/models.hpp"
#include "ffmono/monodromy.hpp"

namespace ffmono {

// Bohr-Sommerfeld point set: base values at which both actions are integer
// multiples of hbar, with the action pairs alongside.
struct BSLattice {
    double hbar = 0.05;
    std::vector<Vec2> actions;      // (I1, I2)
    std::vector<Vec2> base_values;  // matching (F1, F2)
};

struct BSGrid {
    double f1_min = 0.0, f1_max = 0.0;
    double f2_min = 0.0, f2_max = 0.0;
    double exclusion = 0.05;  // radius kept clear around isolated critical values
    int f1_nodes = 96;        // scan resolution along quantized F2-lines
};

BSLattice bs_lattice(const ModelSystem& system, double hbar, const BSGrid& grid,
                     double quad_tol = 1e-9, Exec exec = Exec::parallel);

// Tracks a fundamental cell of lattice vectors along the loop by greedy
// nearest-point continuation and returns the integer shear of the final cell
// relative to the initial one (positive for a counterclockwise loop around a
// focus-focus value). Throws cell_tracking_lost when the lattice is too
// coarse for unambiguous tracking.
long long lattice_defect(const BSLattice& lattice, const ValueLoop& loop);

}  // namespace ffmono
