#include "ffmono/monodromy.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ffmono/errors.hpp"

namespace ffmono {

// ---------------------------------------------------------------------------
// ValueLoop

ValueLoop ValueLoop::circle(const Vec2& center, double radius, int points,
                            int orientation) {
    if (points < 4) throw invalid_loop("circle loop needs at least 4 samples");
    if (!(radius > 0.0)) throw invalid_loop("circle loop needs positive radius");
    if (orientation != 1 && orientation != -1)
        throw invalid_loop("orientation must be +1 or -1");
    ValueLoop loop;
    loop.target = center;
    loop.orientation = orientation;
    loop.samples.reserve(points + 1);
    for (int i = 0; i <= points; ++i) {
        const double a = orientation * two_pi * (i % points) / points;
        loop.samples.push_back({center.x + radius * std::cos(a),
                                center.y + radius * std::sin(a)});
    }
    return loop;
}

ValueLoop ValueLoop::polygon(const std::vector<Vec2>& vertices, int points_per_edge,
                             int orientation) {
    if (vertices.size() < 3) throw invalid_loop("polygon loop needs at least 3 vertices");
    if (points_per_edge < 1) throw invalid_loop("points_per_edge must be positive");
    ValueLoop loop;
    loop.orientation = orientation;
    for (std::size_t e = 0; e < vertices.size(); ++e) {
        const Vec2 a = vertices[e];
        const Vec2 b = vertices[(e + 1) % vertices.size()];
        for (int i = 0; i < points_per_edge; ++i)
            loop.samples.push_back(a + (b - a) * (static_cast<double>(i) / points_per_edge));
    }
    loop.samples.push_back(vertices[0]);
    return loop;
}

ValueLoop ValueLoop::concatenate(const ValueLoop& a, const ValueLoop& b) {
    if (a.samples.empty() || b.samples.empty())
        throw invalid_loop("cannot concatenate empty loops");
    if (dist(a.samples.front(), b.samples.front()) > 1e-12)
        throw invalid_loop("loop composition requires a common basepoint");
    ValueLoop out;
    out.orientation = a.orientation;
    out.samples = a.samples;
    out.samples.insert(out.samples.end(), b.samples.begin() + 1, b.samples.end());
    return out;
}

ValueLoop ValueLoop::reversed() const {
    ValueLoop out = *this;
    std::reverse(out.samples.begin(), out.samples.end());
    out.orientation = -orientation;
    return out;
}

int ValueLoop::winding_number(const Vec2& p) const {
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
        const Vec2 a = samples[i] - p;
        const Vec2 b = samples[i + 1] - p;
        total += std::atan2(cross(a, b), dot(a, b));
    }
    return static_cast<int>(std::lround(total / two_pi));
}

void ValueLoop::validate(const ModelSystem& system, double margin) const {
    if (samples.size() < 4) throw invalid_loop("loop has fewer than 4 samples");
    if (dist(samples.front(), samples.back()) > 1e-12)
        throw invalid_loop("loop is not closed (first sample != last)");
    for (std::size_t i = 0; i < samples.size(); ++i)
        if (system.critical_distance(samples[i]) < margin)
            throw loop_too_close("loop sample " + std::to_string(i) +
                                 " within margin of the critical set");
    if (target) {
        if (winding_number(*target) != orientation)
            throw invalid_loop("polygonal winding number does not match orientation");
    } else if (orientation != 1 && orientation != -1) {
        throw invalid_loop("orientation must be +1 or -1");
    }
}

// ---------------------------------------------------------------------------
// Continuation engine. At every base value the period lattice is
// { n (T, theta) + m (0, 2pi) }; tracked vectors move to the nearest lattice
// vector of the next sample, and segments subdivide whenever the move is
// ambiguous or the closing-time branch would step by more than pi/2.

namespace {

struct SampleData {
    double period = 0.0;
    double theta = 0.0;  // raw closing time in [0, 2pi)
    double err = 0.0;
};

struct Tracker {
    const ModelSystem* system = nullptr;
    ContinuationOptions opts;
    std::vector<ContinuationRow> trace;
    long long calls = 0;
    int depth_reached = 0;
    int row_index = 0;

    SampleData eval(const Vec2& value) {
        ++calls;
        const PeriodLatticeBasis b = period_lattice(*system, value, opts.lattice);
        return {b.generator_long.x, b.generator_long.y, b.quad_error};
    }

    // Nearest lattice vector to w at a sample; `second` receives the runner-up
    // distance for the ambiguity guard.
    static Vec2 nearest(const SampleData& s, const Vec2& w, double* second) {
        const long long n0 = std::llround(w.x / s.period);
        double best = 1e300, next = 1e300;
        Vec2 arg{};
        for (long long n = n0 - 1; n <= n0 + 1; ++n) {
            const double ty = w.y - n * s.theta;
            const long long m0 = std::llround(ty / two_pi);
            for (long long m = m0 - 1; m <= m0 + 1; ++m) {
                const Vec2 cand{n * s.period, n * s.theta + m * two_pi};
                const double d = dist(cand, w);
                if (d < best) {
                    next = best;
                    best = d;
                    arg = cand;
                } else if (d < next) {
                    next = d;
                }
            }
        }
        if (second) *second = next;
        return arg;
    }

    // Advance tracked vectors and the branch angle across one segment,
    // splitting it recursively when tracking is not clearly unambiguous.
    void advance(const Vec2& va, const SampleData& da, const Vec2& vb, const SampleData& db,
                 std::vector<Vec2>& vecs, double& theta_branch, int depth) {
        depth_reached = std::max(depth_reached, depth);
        const double lat_min = std::fmin(two_pi, db.period);
        const double dtheta = angle_gap(reduce_angle(theta_branch), db.theta);
        bool ok = std::fabs(dtheta) <= opts.theta_step_limit &&
                  std::fabs(db.period - da.period) <= 0.25 * std::fmax(da.period, db.period);
        std::vector<Vec2> moved(vecs.size());
        for (std::size_t i = 0; i < vecs.size() && ok; ++i) {
            double second = 0.0;
            moved[i] = nearest(db, vecs[i], &second);
            const double d = dist(moved[i], vecs[i]);
            if (d > 0.45 * lat_min || second - d < 0.25 * lat_min) ok = false;
        }
        if (ok) {
            for (std::size_t i = 0; i < vecs.size(); ++i) vecs[i] = moved[i];
            theta_branch += dtheta;
            trace.push_back({row_index++, vb, db.period, theta_branch, db.err});
            return;
        }
        if (depth >= opts.max_subdivision_depth)
            throw branch_ambiguity("branch tracking ambiguous at (" + std::to_string(vb.x) +
                                   ", " + std::to_string(vb.y) + ") after depth " +
                                   std::to_string(depth));
        const Vec2 mid = (va + vb) * 0.5;
        const SampleData dm = eval(mid);
        advance(va, da, mid, dm, vecs, theta_branch, depth + 1);
        advance(mid, dm, vb, db, vecs, theta_branch, depth + 1);
    }
};

}  // namespace

ContinuationResult continue_lattice(const ModelSystem& system, const ValueLoop& loop,
                                    const ContinuationOptions& opts) {
    loop.validate(system, opts.lattice.margin);

    Tracker tr;
    tr.system = &system;
    tr.opts = opts;

    std::vector<SampleData> data(loop.samples.size());
    {
        const std::vector<PeriodLatticeBasis> bases =
            period_lattice_batch(system, loop.samples, opts.lattice, opts.exec);
        for (std::size_t i = 0; i < bases.size(); ++i)
            data[i] = {bases[i].generator_long.x, bases[i].generator_long.y,
                       bases[i].quad_error};
        tr.calls += static_cast<long long>(bases.size());
    }

    // Basepoint basis: the circle generator and the long generator with the
    // closing time normalized to [0, 2pi). An optional unimodular change of
    // basis applies on top (its rows are coordinates in the default basis).
    const Vec2 g1{0.0, two_pi};
    const Vec2 g2{data[0].period, data[0].theta};
    Mat2i u = Mat2i::identity();
    if (opts.initial_basis) {
        u = *opts.initial_basis;
        if (std::llabs(u.det()) != 1)
            throw not_unimodular("initial basis change must be unimodular");
    }
    std::vector<Vec2> vecs = {g1 * static_cast<double>(u.m[0][0]) + g2 * static_cast<double>(u.m[0][1]),
                              g1 * static_cast<double>(u.m[1][0]) + g2 * static_cast<double>(u.m[1][1])};
    const std::vector<Vec2> vecs0 = vecs;

    double theta_branch = data[0].theta;
    tr.trace.push_back({tr.row_index++, loop.samples[0], data[0].period, theta_branch,
                        data[0].err});

    for (std::size_t i = 0; i + 1 < loop.samples.size(); ++i)
        tr.advance(loop.samples[i], data[i], loop.samples[i + 1], data[i + 1], vecs,
                   theta_branch, 0);

    // Express the final vectors in the initial basis and snap to integers.
    const double det0 = cross(vecs0[0], vecs0[1]);
    if (std::fabs(det0) < 1e-10)
        throw non_integer_holonomy("initial basis is numerically degenerate");
    Mat2i m;
    double worst = 0.0;
    for (int jcol = 0; jcol < 2; ++jcol) {
        const Vec2 w = vecs[jcol];
        const double c1 = cross(w, vecs0[1]) / det0;       // coordinate along vecs0[0]
        const double c2 = cross(vecs0[0], w) / det0;       // coordinate along vecs0[1]
        const double r1 = std::round(c1), r2 = std::round(c2);
        worst = std::fmax(worst, std::fmax(std::fabs(c1 - r1), std::fabs(c2 - r2)));
        m.m[0][jcol] = static_cast<long long>(r1);
        m.m[1][jcol] = static_cast<long long>(r2);
    }
    if (worst > opts.integer_snap)
        throw non_integer_holonomy("holonomy entries miss integers by " +
                                   std::to_string(worst) + " (snap " +
                                   std::to_string(opts.integer_snap) + ")");
    if (m.det() != 1)
        throw non_integer_holonomy("holonomy determinant " + std::to_string(m.det()) +
                                   " != 1: continuation failed");

    ContinuationResult out;
    out.matrix.entries = m;
    {
        // Rounded basepoint coordinates so that loops sharing a basepoint up
        // to roundoff carry the same basis id.
        char buf[160];
        std::snprintf(buf, sizeof buf, "%s@(%.9f,%.9f)/basis(s1,long)*%s",
                      system.name().c_str(), loop.samples[0].x + 0.0,
                      loop.samples[0].y + 0.0, u.str().c_str());
        out.matrix.basis_note = buf;
    }
    long long k = 0;
    if (unipotent_class(m, &k)) out.k = k;  // class invariant under basis change
    out.trace = std::move(tr.trace);
    out.subdivision_depth = tr.depth_reached;
    out.quadrature_calls = tr.calls;
    return out;
}

// ---------------------------------------------------------------------------
// Closed-form calculators.

MonodromyMatrix monodromy_from_count(long long k) {
    if (k < 0) throw invalid_config("monodromy_from_count requires k >= 0");
    return {Mat2i::shear(k), "normal-form"};
}

MonodromyMatrix monodromy_signed(const std::vector<int>& signs) {
    long long k = 0;
    for (int s : signs) {
        if (s != 1 && s != -1) throw invalid_config("signs must be +1 or -1");
        k += s;
    }
    return {Mat2i::shear(k), "normal-form"};
}

Mat3i embed_3dof(const Mat2i& m) {
    const long long d = m.det();
    if (d != 1 && d != -1)
        throw not_unimodular("embed_3dof requires a unimodular matrix, det = " +
                             std::to_string(d));
    Mat3i out;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) out.m[i][j] = m.m[i][j];
    return out;
}

MonodromyMatrix compose_loops(const MonodromyMatrix& m_a, const MonodromyMatrix& m_b) {
    if (m_a.basis_note.empty() || m_b.basis_note.empty() ||
        m_a.basis_note != m_b.basis_note)
        throw basis_mismatch("loop composition requires matrices in the same basepoint basis");
    return {m_b.entries * m_a.entries, m_a.basis_note};
}

void write_trace_csv(const std::string& path, const std::vector<ContinuationRow>& rows) {
    std::ofstream out(path);
    if (!out) throw invalid_config("cannot open trace file " + path);
    out << "index,F1,F2,T,Theta,error_estimate\n";
    out.precision(17);
    for (const auto& r : rows)
        out << r.index << ',' << r.value.x << ',' << r.value.y << ',' << r.period << ','
            << r.theta << ',' << r.quad_error << '\n';
}

}  // namespace ffmono
