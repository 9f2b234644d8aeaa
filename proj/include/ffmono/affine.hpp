#pragma once

#include <string>
#include <vector>

#include "ffmono/geom.hpp"
#include "ffmono/monodromy.hpp"

namespace ffmono {

// Integral-affine model of the base near a focus-focus value: the plane with
// the angular sector between directions (0,1) and (-k,1) removed and the two
// edges glued by (x, y) -> (x + k y, y). Charts and transitions are exact
// (integer matrices, rational ray directions).
struct AffineChart {
    std::string label;
    // Angular region from direction `from` to direction `to`, counterclockwise.
    Vec2 from, to;
};

struct AffineTransition {
    int from_chart = 0;
    int to_chart = 0;
    Mat2i map;
};

struct AffineComplex {
    long long k = 0;
    std::vector<AffineChart> charts;
    std::vector<AffineTransition> transitions;
    // Edge rays of the removed sector.
    Vec2 cut_from{0.0, 1.0};
    Vec2 cut_to{0.0, 1.0};

    // Unimodularity of every transition plus the (trivially satisfied for two
    // charts) cocycle condition. Throws not_unimodular on failure.
    void validate() const;
};

AffineComplex cut_plane_model(long long k);

// Parallel transport of the affine frame along a closed loop avoiding the
// puncture: composes the transition differentials at every seam crossing.
// Throws path_invalid when a sample lies inside the removed sector or at the
// origin.
MonodromyMatrix affine_transport(const AffineComplex& complex,
                                 const std::vector<Vec2>& loop);

// A closed loop of the given winding number around the puncture that stays
// outside the removed sector (the cross-sector hop represents the gluing).
std::vector<Vec2> standard_affine_loop(const AffineComplex& complex, int winding,
                                       double radius = 2.0, int points_per_turn = 24);

}  // namespace ffmono
