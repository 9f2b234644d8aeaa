#include "ffmono/affine.hpp"

#include <cmath>
#include <string>

#include "ffmono/errors.hpp"

namespace ffmono {

void AffineComplex::validate() const {
    for (const auto& t : transitions) {
        const long long d = t.map.det();
        if (d != 1 && d != -1)
            throw not_unimodular("affine transition with determinant " + std::to_string(d));
    }
    // Two charts and a single seam: no triple overlaps, the cocycle condition
    // reduces to each transition being paired with its inverse.
}

AffineComplex cut_plane_model(long long k) {
    if (k < 0) throw invalid_config("cut_plane_model requires k >= 0");
    AffineComplex c;
    c.k = k;
    c.cut_from = {0.0, 1.0};
    c.cut_to = {static_cast<double>(-k), 1.0};
    if (k == 0) {
        c.charts.push_back({"plane", {0.0, 1.0}, {0.0, 1.0}});
        c.transitions.push_back({0, 0, Mat2i::identity()});
    } else {
        // Bulk chart runs counterclockwise from the (-k,1) edge around to the
        // (0,1) edge; the collar chart straddles the glued seam.
        c.charts.push_back({"bulk", {static_cast<double>(-k), 1.0}, {0.0, 1.0}});
        c.charts.push_back({"seam-collar", {1.0, 1.0}, {static_cast<double>(-k - 1), 1.0}});
        c.transitions.push_back({0, 1, Mat2i::shear(k)});
        c.transitions.push_back({1, 0, Mat2i::shear(k).inverse()});
    }
    c.validate();
    return c;
}

namespace {

// Angle of v in [0, 2pi).
double polar(const Vec2& v) { return reduce_angle(std::atan2(v.y, v.x)); }

bool in_open_sector(const AffineComplex& c, const Vec2& p) {
    if (c.k == 0) return false;
    const double a = polar(c.cut_from), b = polar(c.cut_to), t = polar(p);
    return t > a + 1e-12 && t < b - 1e-12;
}

}  // namespace

MonodromyMatrix affine_transport(const AffineComplex& complex,
                                 const std::vector<Vec2>& loop) {
    if (loop.size() < 2) throw path_invalid("transport path needs at least 2 points");
    if (dist(loop.front(), loop.back()) > 1e-12)
        throw path_invalid("transport path is not closed");
    // Seam = mid-direction of the removed sector (the cut ray itself when
    // k = 0). Signed ray crossings accumulate the gluing map; counterclockwise
    // crossings count +1.
    const double mid = 0.5 * (polar(complex.cut_from) + polar(complex.cut_to));
    const Vec2 seam{std::cos(mid), std::sin(mid)};

    for (std::size_t i = 0; i < loop.size(); ++i) {
        if (norm(loop[i]) < 1e-12)
            throw path_invalid("path point " + std::to_string(i) + " at the puncture");
        if (in_open_sector(complex, loop[i]))
            throw path_invalid("path point " + std::to_string(i) +
                               " inside the removed sector");
        if (std::fabs(cross(seam, loop[i])) < 1e-13 * norm(loop[i]) &&
            dot(seam, loop[i]) > 0.0)
            throw path_invalid("path point " + std::to_string(i) + " lies on the cut");
    }

    long long net = 0;
    for (std::size_t i = 0; i + 1 < loop.size(); ++i) {
        const Vec2 p = loop[i], q = loop[i + 1];
        const double denom = cross(q - p, seam);
        if (std::fabs(cross(seam, p)) < 1e-14 && std::fabs(cross(seam, q)) < 1e-14)
            throw path_invalid("path segment runs along the cut");
        if (denom == 0.0) continue;  // parallel to the seam
        const double s = cross(seam, p) / denom;
        const double t = cross(p, q) / cross(seam, q - p);
        if (s <= 0.0 || s >= 1.0 || t <= 0.0) continue;
        net += (cross(seam, q - p) > 0.0) ? 1 : -1;
    }

    Mat2i m = Mat2i::identity();
    const Mat2i a = Mat2i::shear(complex.k);
    const Mat2i ainv = a.inverse();
    for (long long i = 0; i < std::llabs(net); ++i) m = (net > 0 ? a : ainv) * m;
    return {m, "affine-cut-plane"};
}

std::vector<Vec2> standard_affine_loop(const AffineComplex& complex, int winding,
                                       double radius, int points_per_turn) {
    const double a = polar(complex.cut_from), b = polar(complex.cut_to);
    const double margin = 0.15;
    const double start = b + margin;               // just past the sector, ccw
    const double sweep = (a - margin) + two_pi - start;
    std::vector<Vec2> loop;
    const int w = std::max(1, std::abs(winding));
    for (int turn = 0; turn < w; ++turn)
        for (int i = 0; i < points_per_turn; ++i) {
            const double th = start + sweep * i / (points_per_turn - 1);
            loop.push_back({radius * std::cos(th), radius * std::sin(th)});
        }
    loop.push_back(loop.front());
    if (winding < 0) std::reverse(loop.begin(), loop.end());
    if (winding == 0)
        loop = {{radius, 0.0}, {radius + 1.0, 0.5}, {radius, 1.0}, {radius, 0.0}};
    return loop;
}

}  // namespace ffmono
