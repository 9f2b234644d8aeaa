#include "ffmono/turning.hpp"

#include <cmath>
#include <string>

#include "ffmono/errors.hpp"

namespace ffmono {

std::vector<TurningInterval> oscillation_intervals(const Polynomial& P,
                                                   double double_root_tol) {
    const std::vector<double> roots = roots_in_interval(P, -1.0, 1.0, 1e-4);

    // Derivative scale for the double-root test, |P'(root)| relative to the
    // polynomial's size on the interval.
    const Polynomial dP = P.derivative();
    double scale = 0.0;
    for (int i = 0; i <= 64; ++i) scale = std::fmax(scale, std::fabs(P(-1.0 + i / 32.0)));
    if (scale == 0.0) throw no_oscillation("P vanishes identically on [-1, 1]");

    std::vector<double> bounds;
    bounds.push_back(-1.0);
    for (double r : roots) bounds.push_back(r);
    bounds.push_back(1.0);

    std::vector<TurningInterval> intervals;
    for (std::size_t i = 0; i + 1 < bounds.size(); ++i) {
        const double lo = bounds[i], hi = bounds[i + 1];
        if (hi - lo < 1e-12) continue;
        const double mid = 0.5 * (lo + hi);
        if (P(mid) <= 0.0) continue;
        // A positive component must be delimited by roots (or the domain
        // boundary with P > 0 there, which cannot happen for the pendulum
        // family where (1 - z^2) divides the leading part; reject it anyway).
        for (double e : {lo, hi}) {
            const bool is_root = std::fabs(P(e)) <= 1e-10 * scale;
            if (!is_root)
                throw no_oscillation("oscillation component not delimited by roots of P");
            if (std::fabs(dP(e)) <= double_root_tol * scale)
                throw degenerate_root("double root of P at z = " + std::to_string(e) +
                                      " (value too close to the critical set)");
        }
        // Near-double root adjacent to the component: a second root closer
        // than the tolerance to an endpoint also signals a near-critical value.
        for (double r : roots) {
            if (r > lo + 1e-12 && r < hi - 1e-12) continue;
            if ((std::fabs(r - lo) < double_root_tol && r != lo) ||
                (std::fabs(r - hi) < double_root_tol && r != hi))
                throw degenerate_root("nearly coincident roots of P near the oscillation interval");
        }
        intervals.push_back({lo, hi});
    }
    if (intervals.empty()) throw no_oscillation("P <= 0 on (-1, 1): no oscillation region");
    return intervals;
}

TurningInterval turning_points(const Polynomial& P, double j, double h) {
    std::vector<TurningInterval> intervals;
    try {
        intervals = oscillation_intervals(P);
    } catch (const no_oscillation&) {
        throw no_oscillation("no oscillation interval at (h, j) = (" + std::to_string(h) +
                             ", " + std::to_string(j) + ")");
    }
    // The widest component brackets the motion of interest; multi-component
    // values only occur inside critical-value islands, which continuation
    // loops avoid.
    TurningInterval best = intervals.front();
    for (const auto& iv : intervals)
        if (iv.hi - iv.lo > best.hi - best.lo) best = iv;
    return best;
}

}  // namespace ffmono
