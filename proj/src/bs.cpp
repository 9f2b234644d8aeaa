#include "ffmono/bs.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ffmono/errors.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ffmono {

namespace {

// Second action along a quantized F2-line. Pendulum: direct quadrature of
// (1/2pi) oint p_z dz (single-valued; even in j). Linear model: the glued
// return construction integrates in closed form,
//   I2 = (c1 (log(R^2/|c|) + 1) + c2 arg(c)) / 2pi,
// whose arg-branch is continuous along every line c2 = const crossing c1 = 0.
double second_action(const ModelSystem& system, double f1, double f2, double quad_tol) {
    if (const auto* pend = dynamic_cast<const PendulumModel*>(&system))
        return pendulum_second_action(*pend, f1, f2, quad_tol);
    if (const auto* lin = dynamic_cast<const LinearFocusModel*>(&system)) {
        const double r = lin->glue_radius();
        const double mod = std::hypot(f1, f2);
        if (mod < 1e-12) throw loop_too_close("second action at the critical value");
        return (f1 * (std::log(r * r / mod) + 1.0) + f2 * std::atan2(f2, f1)) / two_pi;
    }
    throw invalid_config("bs_lattice: unsupported model " + system.name());
}

bool excluded(const ModelSystem& system, const Vec2& v, double exclusion) {
    for (const auto& cv : system.isolated_critical_values())
        if (dist(v, cv) < exclusion) return true;
    return false;
}

}  // namespace

BSLattice bs_lattice(const ModelSystem& system, double hbar, const BSGrid& grid,
                     double quad_tol, Exec exec) {
    if (!(hbar > 0.0)) throw invalid_config("bs_lattice: hbar must be positive");
    if (!(grid.f1_max > grid.f1_min) || !(grid.f2_max > grid.f2_min))
        throw invalid_config("bs_lattice: empty grid");

    BSLattice lattice;
    lattice.hbar = hbar;

    // Quantized F2-lines inside the grid.
    std::vector<long long> mline;
    for (long long m = std::llround(std::ceil(grid.f2_min / hbar));
         m * hbar <= grid.f2_max + 1e-15; ++m)
        mline.push_back(m);

    std::vector<std::vector<Vec2>> line_actions(mline.size());
    std::vector<std::vector<Vec2>> line_bases(mline.size());

    const auto run_line = [&](std::size_t li) {
        const double j = mline[li] * hbar;
        const int n = std::max(grid.f1_nodes, 8);
        std::vector<double> f1(n + 1), i2(n + 1);
        std::vector<bool> valid(n + 1, false);
        for (int i = 0; i <= n; ++i) {
            f1[i] = grid.f1_min + (grid.f1_max - grid.f1_min) * i / n;
            if (excluded(system, {f1[i], j}, grid.exclusion)) continue;
            try {
                i2[i] = second_action(system, f1[i], j, quad_tol);
                valid[i] = true;
            } catch (const numerical_error&) {
                // outside the oscillation region or too close to critical
            }
        }
        // I2 grows monotonically with F1 (dI2/dF1 = T / 2pi > 0): bisect each
        // bracketing cell for every quantized level inside it.
        for (int i = 0; i + 1 <= n; ++i) {
            if (!valid[i] || !valid[i + 1]) continue;
            const double lo = i2[i], hi = i2[i + 1];
            if (!(hi > lo)) continue;
            for (long long q = std::llround(std::ceil(lo / hbar)); q * hbar <= hi; ++q) {
                const double target = q * hbar;
                if (target <= lo) continue;
                double a = f1[i], b = f1[i + 1];
                double fa = lo - target;
                for (int it = 0; it < 80; ++it) {
                    const double m = 0.5 * (a + b);
                    double fm;
                    try {
                        fm = second_action(system, m, j, quad_tol) - target;
                    } catch (const numerical_error&) {
                        fm = fa;  // push the bracket away from the bad side
                    }
                    if ((fm < 0.0) == (fa < 0.0)) {
                        a = m;
                        fa = fm;
                    } else {
                        b = m;
                    }
                    if (b - a < 1e-12 * std::fmax(1.0, std::fabs(a))) break;
                }
                const double f1_star = 0.5 * (a + b);
                if (excluded(system, {f1_star, j}, grid.exclusion)) continue;
                line_actions[li].push_back({j, target});
                line_bases[li].push_back({f1_star, j});
            }
        }
    };

    if (exec == Exec::parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
        for (std::ptrdiff_t li = 0; li < static_cast<std::ptrdiff_t>(mline.size()); ++li)
            run_line(li);
    } else {
        for (std::ptrdiff_t li = 0; li < static_cast<std::ptrdiff_t>(mline.size()); ++li)
            run_line(li);
    }

    for (std::size_t li = 0; li < mline.size(); ++li) {
        lattice.actions.insert(lattice.actions.end(), line_actions[li].begin(),
                               line_actions[li].end());
        lattice.base_values.insert(lattice.base_values.end(), line_bases[li].begin(),
                                   line_bases[li].end());
    }
    if (lattice.base_values.size() < 8)
        throw invalid_config("bs_lattice: grid produced fewer than 8 points");
    return lattice;
}

namespace {

std::size_t nearest_index(const std::vector<Vec2>& pts, const Vec2& x) {
    std::size_t best = 0;
    double bd = 1e300;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double d = dist(pts[i], x);
        if (d < bd) {
            bd = d;
            best = i;
        }
    }
    return best;
}

}  // namespace

long long lattice_defect(const BSLattice& lattice, const ValueLoop& loop) {
    const auto& pts = lattice.base_values;
    if (loop.samples.size() < 8) throw invalid_loop("defect loop needs more samples");

    const std::size_t i0 = nearest_index(pts, loop.samples.front());
    const Vec2 p0 = pts[i0];
    const double hbar = lattice.hbar;

    // Local cell at the basepoint: e1 along the quantized F2-line (same j),
    // e2 to the adjacent line (j + hbar).
    Vec2 e1{0, 0}, e2{0, 0};
    double d1 = 1e300, d2 = 1e300;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (i == i0) continue;
        const Vec2 dvec = pts[i] - p0;
        const double d = norm(dvec);
        if (std::fabs(dvec.y) < 0.25 * hbar && d < d1) {
            d1 = d;
            e1 = dvec;
        }
        if (std::fabs(dvec.y - hbar) < 0.25 * hbar && d < d2) {
            d2 = d;
            e2 = dvec;
        }
    }
    if (d1 > 1e200 || d2 > 1e200)
        throw cell_tracking_lost("no basis cell at the loop basepoint (lattice too coarse)");
    const double spacing = std::fmin(d1, d2);

    const Vec2 e1_0 = e1, e2_0 = e2;
    // A continuous carrier accumulates the loop displacement; the tracked
    // lattice point snaps to it, so slow drifts still move the cell.
    Vec2 carrier = p0;
    Vec2 p = p0;
    for (std::size_t s = 1; s < loop.samples.size(); ++s) {
        carrier = carrier + (loop.samples[s] - loop.samples[s - 1]);
        const Vec2 pn = pts[nearest_index(pts, carrier)];
        if (dist(pn, carrier) > 1.5 * std::fmax(norm(e1), norm(e2)))
            throw cell_tracking_lost("lost the tracked lattice point (decrease hbar)");
        const Vec2 t1 = pts[nearest_index(pts, pn + e1)] - pn;
        const Vec2 t2 = pts[nearest_index(pts, pn + e2)] - pn;
        if (dist(t1, e1) > 0.6 * std::fmax(spacing, norm(e1)) ||
            dist(t2, e2) > 0.6 * std::fmax(spacing, norm(e2)))
            throw cell_tracking_lost("cell vectors ambiguous (decrease hbar)");
        p = pn;
        e1 = t1;
        e2 = t2;
    }
    (void)p;

    // Express the final cell in the initial one; the shear off-diagonal is
    // the defect.
    const double det0 = cross(e1_0, e2_0);
    if (std::fabs(det0) < 1e-16) throw cell_tracking_lost("degenerate basis cell");
    auto coords = [&](const Vec2& w) {
        return Vec2{cross(w, e2_0) / det0, cross(e1_0, w) / det0};
    };
    const Vec2 c1 = coords(e1), c2 = coords(e2);
    Mat2i s;
    double worst = 0.0;
    const double entries[2][2] = {{c1.x, c2.x}, {c1.y, c2.y}};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            const double r = std::round(entries[i][j]);
            worst = std::fmax(worst, std::fabs(entries[i][j] - r));
            s.m[i][j] = static_cast<long long>(r);
        }
    if (worst > 0.25 || s.det() != 1 || s.trace() != 2)
        throw cell_tracking_lost("final cell is not an integer shear of the initial cell");
    // One off-diagonal entry carries the shear; e1 runs along the F2-line
    // (the I2 direction), so a counterclockwise focus-focus loop shears e2 by
    // +k steps of e1.
    return s.m[0][1] != 0 ? s.m[0][1] : -s.m[1][0];
}

}  // namespace ffmono
