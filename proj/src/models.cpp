#include "ffmono/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ffmono/errors.hpp"

namespace ffmono {

double det4(const Mat4& a) {
    // Cofactor expansion along the first row.
    auto det3 = [](double a11, double a12, double a13, double a21, double a22,
                   double a23, double a31, double a32, double a33) {
        return a11 * (a22 * a33 - a23 * a32) - a12 * (a21 * a33 - a23 * a31) +
               a13 * (a21 * a32 - a22 * a31);
    };
    double d = 0.0;
    for (int j = 0; j < 4; ++j) {
        double minor[3][3];
        for (int r = 1; r < 4; ++r) {
            int cc = 0;
            for (int c = 0; c < 4; ++c) {
                if (c == j) continue;
                minor[r - 1][cc++] = a[r][c];
            }
        }
        const double m = det3(minor[0][0], minor[0][1], minor[0][2], minor[1][0],
                              minor[1][1], minor[1][2], minor[2][0], minor[2][1],
                              minor[2][2]);
        d += ((j % 2 == 0) ? 1.0 : -1.0) * a[0][j] * m;
    }
    return d;
}

std::array<double, 4> ModelSystem::combined_field(double kappa, double eta,
                                                  const PhasePoint& p) const {
    const auto g1 = gradient(0, p);
    const auto g2 = gradient(1, p);
    std::array<double, 4> g{};
    for (int i = 0; i < 4; ++i) g[i] = kappa * g1[i] + eta * g2[i];
    // qdot = dF/dp, pdot = -dF/dq on interleaved (q, p) pairs.
    return {g[1], -g[0], g[3], -g[2]};
}

double ModelSystem::phase_distance(const PhasePoint& a, const PhasePoint& b) const {
    if (a.chart != b.chart)
        throw invalid_config("phase_distance: points live in different charts");
    double d = 0.0;
    for (int i = 0; i < 4; ++i) {
        double di = b.coords[i] - a.coords[i];
        if (angle_coordinate(a.chart, i)) di = angle_gap(a.coords[i], b.coords[i]);
        d = std::fmax(d, std::fabs(di));
    }
    return d;
}

// ---------------------------------------------------------------------------
// PendulumPotential

PendulumPotential::PendulumPotential(std::vector<double> coeffs) {
    if (coeffs.empty() || coeffs.size() > 7)
        throw invalid_potential("potential degree must be between 0 and 6");
    for (double c : coeffs)
        if (!std::isfinite(c)) throw invalid_potential("potential coefficients must be finite");
    poly_ = Polynomial(std::move(coeffs));
    dpoly_ = poly_.derivative();
}

PendulumPotential modified_pendulum_potential(double R) {
    if (!(R > 0.0)) throw invalid_potential("modified pendulum requires R > 0");
    return PendulumPotential({0.0, 1.0, -1.0 / (2.0 * R)});
}

// ---------------------------------------------------------------------------
// PendulumModel
//
// Reduced chart (z, p_z, phi, p_phi):
//   H = (1/2) ((1 - z^2) p_z^2 + p_phi^2 / (1 - z^2)) + V(z),   J = p_phi.
// Pole charts (q1, p1, q2, p2), exact cotangent charts at z = sigma:
//   H = (1/2) (|p|^2 - (q.p)^2) + V(sigma sqrt(1 - |q|^2)),     J = q1 p2 - q2 p1.

PendulumModel::PendulumModel(PendulumPotential potential)
    : name_("pendulum"), potential_(std::move(potential)) {
    build_singular_points();
    build_critical_curves();
}

Vec2 PendulumModel::moment_map(const PhasePoint& p) const {
    if (p.chart == reduced) {
        const double z = p.coords[0], pz = p.coords[1], pphi = p.coords[3];
        const double w = 1.0 - z * z;
        return {0.5 * (w * pz * pz + pphi * pphi / w) + potential_(z), pphi};
    }
    const int sigma = (p.chart == north) ? 1 : -1;
    const double q1 = p.coords[0], p1 = p.coords[1], q2 = p.coords[2], p2 = p.coords[3];
    const double qp = q1 * p1 + q2 * p2;
    const double s = q1 * q1 + q2 * q2;
    const double z = sigma * std::sqrt(1.0 - s);
    const double h = 0.5 * (p1 * p1 + p2 * p2 - qp * qp) + potential_(z);
    return {h, q1 * p2 - q2 * p1};
}

std::array<double, 4> PendulumModel::gradient(int component, const PhasePoint& p) const {
    if (p.chart == reduced) {
        const double z = p.coords[0], pz = p.coords[1], pphi = p.coords[3];
        if (component == 1) return {0.0, 0.0, 0.0, 1.0};
        const double w = 1.0 - z * z;
        return {-z * pz * pz + pphi * pphi * z / (w * w) + potential_.derivative(z),
                w * pz, 0.0, pphi / w};
    }
    const int sigma = (p.chart == north) ? 1 : -1;
    const double q1 = p.coords[0], p1 = p.coords[1], q2 = p.coords[2], p2 = p.coords[3];
    if (component == 1) return {p2, -q2, -p1, q1};
    const double qp = q1 * p1 + q2 * p2;
    const double s = q1 * q1 + q2 * q2;
    const double root = std::sqrt(1.0 - s);
    const double dVdz = potential_.derivative(sigma * root);
    // dz/dq_i = -sigma q_i / sqrt(1 - s)
    const double fac = -dVdz * sigma / root;
    return {-qp * p1 + fac * q1, p1 - qp * q1, -qp * p2 + fac * q2, p2 - qp * q2};
}

bool PendulumModel::chart_valid(const PhasePoint& p) const {
    for (double c : p.coords)
        if (!std::isfinite(c)) return false;
    if (p.chart == reduced) return std::fabs(p.coords[0]) < 1.0 - 1e-9;
    if (p.chart == north || p.chart == south) {
        const double s = p.coords[0] * p.coords[0] + p.coords[2] * p.coords[2];
        return s < 0.49;
    }
    return false;
}

Polynomial PendulumModel::radial_poly(double h, double j) const {
    // P(z) = 2 (h - V(z)) (1 - z^2) - j^2
    const auto& v = potential_.poly().coeffs();
    std::vector<double> hm(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) hm[i] = -v[i];
    hm[0] += h;
    std::vector<double> out(hm.size() + 2, 0.0);
    for (std::size_t i = 0; i < hm.size(); ++i) {
        out[i] += 2.0 * hm[i];
        out[i + 2] -= 2.0 * hm[i];
    }
    out[0] -= j * j;
    return Polynomial(std::move(out));
}

bool PendulumModel::pole_unstable(int sigma) const {
    // Local maximum of V along the sphere at the pole (flat tops count: a
    // degenerate pinch is still a pinch).
    const double vp = potential_(static_cast<double>(sigma));
    for (double t : {1e-3, 3e-3, 1e-2, 3e-2, 1e-1})
        if (potential_(sigma * (1.0 - t)) > vp + 1e-12) return false;
    return true;
}

void PendulumModel::build_singular_points() {
    for (int sigma : {1, -1}) {
        if (!pole_unstable(sigma)) continue;
        SingularPoint sp;
        sp.location.chart = (sigma == 1) ? north : south;
        sp.location.coords = {0.0, 0.0, 0.0, 0.0};
        sp.moment_value = {pole_energy(sigma), 0.0};
        sp.sign = +1;
        sp.label = (sigma == 1) ? "north pole" : "south pole";
        // Exact Hessians at the rest point: H has q-block -sigma V'(sigma) I
        // and p-block I; J = q1 p2 - q2 p1.
        Mat4 h1 = mat4_zero();
        const double kq = -sigma * potential_.derivative(static_cast<double>(sigma));
        h1[0][0] = kq;
        h1[2][2] = kq;
        h1[1][1] = 1.0;
        h1[3][3] = 1.0;
        Mat4 h2 = mat4_zero();
        h2[0][3] = h2[3][0] = 1.0;
        h2[1][2] = h2[2][1] = -1.0;
        sp.hessians = {h1, h2};
        singular_.push_back(std::move(sp));
    }
}

void PendulumModel::build_critical_curves() {
    // Relative equilibria: p_z = 0 and W_j'(z) = 0 with the effective
    // potential W_j = V + j^2 / (2 (1 - z^2)), i.e. j^2 = -V'(z)(1-z^2)^2 / z.
    const double j_cap = 12.0;
    auto add_branch = [this, j_cap](double z_lo, double z_hi) {
        std::vector<Vec2> plus, minus;
        const int n = 4000;
        for (int i = 0; i <= n; ++i) {
            const double z = z_lo + (z_hi - z_lo) * i / n;
            if (std::fabs(z) < 1e-9) continue;
            const double w = 1.0 - z * z;
            if (w <= 0.0) continue;
            const double j2 = -potential_.derivative(z) * w * w / z;
            if (j2 < 0.0) continue;
            const double j = std::sqrt(j2);
            if (j > j_cap) continue;
            const double h = potential_(z) + j2 / (2.0 * w);
            plus.push_back({h, j});
            minus.push_back({h, -j});
        }
        if (plus.size() > 1) crit_curves_.push_back(std::move(plus));
        if (minus.size() > 1) crit_curves_.push_back(std::move(minus));
    };
    add_branch(-1.0 + 1e-6, -1e-6);
    add_branch(1e-6, 1.0 - 1e-6);
    if (std::fabs(potential_.derivative(0.0)) < 1e-12) {
        // Equatorial circular orbits exist at every j when V'(0) = 0.
        std::vector<Vec2> eq;
        const int n = 2000;
        for (int i = 0; i <= n; ++i) {
            const double j = -j_cap + 2.0 * j_cap * i / n;
            eq.push_back({potential_(0.0) + 0.5 * j * j, j});
        }
        crit_curves_.push_back(std::move(eq));
    }
}

std::vector<Vec2> PendulumModel::isolated_critical_values() const {
    std::vector<Vec2> vals;
    for (const auto& sp : singular_) {
        bool seen = false;
        for (const auto& v : vals)
            if (dist(v, sp.moment_value) < 1e-12) seen = true;
        if (!seen) vals.push_back(sp.moment_value);
    }
    return vals;
}

double PendulumModel::critical_distance(const Vec2& value) const {
    double d = std::numeric_limits<double>::infinity();
    for (int sigma : {1, -1}) d = std::fmin(d, dist(value, {pole_energy(sigma), 0.0}));
    for (const auto& curve : crit_curves_)
        for (std::size_t i = 0; i + 1 < curve.size(); ++i)
            d = std::fmin(d, segment_distance(value, curve[i], curve[i + 1]));
    return d;
}

std::optional<std::array<double, 3>> PendulumModel::island_bounds() const {
    // The island of critical values between an interior maximum of V and a
    // stable north pole: swept out by the relative-equilibrium branch with
    // z in (0, 1), which only exists where V' < 0 there.
    if (pole_unstable(1)) return std::nullopt;
    double h_min = pole_energy(1), h_max = pole_energy(1), j_max = 0.0;
    bool found = false;
    const int n = 20000;
    for (int i = 1; i < n; ++i) {
        const double z = static_cast<double>(i) / n;
        const double w = 1.0 - z * z;
        const double j2 = -potential_.derivative(z) * w * w / z;
        if (j2 < 0.0) continue;
        const double h = potential_(z) + j2 / (2.0 * w);
        h_min = std::fmin(h_min, h);
        h_max = std::fmax(h_max, h);
        j_max = std::fmax(j_max, std::sqrt(j2));
        found = true;
    }
    if (!found) return std::nullopt;
    return std::array<double, 3>{h_min, h_max, j_max};
}

// ---------------------------------------------------------------------------
// LinearFocusModel: coords (x1, y1, x2, y2), f1 = x1 y1 + x2 y2,
// f2 = x1 y2 - x2 y1.

LinearFocusModel::LinearFocusModel() : name_("linear-focus-focus") {
    SingularPoint sp;
    sp.location.chart = 0;
    sp.location.coords = {0.0, 0.0, 0.0, 0.0};
    sp.moment_value = {0.0, 0.0};
    sp.sign = +1;
    sp.label = "origin";
    Mat4 h1 = mat4_zero();
    h1[0][1] = h1[1][0] = 1.0;
    h1[2][3] = h1[3][2] = 1.0;
    Mat4 h2 = mat4_zero();
    h2[0][3] = h2[3][0] = 1.0;
    h2[1][2] = h2[2][1] = -1.0;
    sp.hessians = {h1, h2};
    singular_.push_back(std::move(sp));
}

Vec2 LinearFocusModel::moment_map(const PhasePoint& p) const {
    const double x1 = p.coords[0], y1 = p.coords[1], x2 = p.coords[2], y2 = p.coords[3];
    return {x1 * y1 + x2 * y2, x1 * y2 - x2 * y1};
}

std::array<double, 4> LinearFocusModel::gradient(int component, const PhasePoint& p) const {
    const double x1 = p.coords[0], y1 = p.coords[1], x2 = p.coords[2], y2 = p.coords[3];
    if (component == 0) return {y1, x1, y2, x2};
    return {y2, -x2, -y1, x1};
}

bool LinearFocusModel::chart_valid(const PhasePoint& p) const {
    for (double c : p.coords)
        if (!std::isfinite(c)) return false;
    return p.chart == 0;
}

std::unique_ptr<ModelSystem> linear_focus_focus_model() {
    return std::make_unique<LinearFocusModel>();
}

std::unique_ptr<ModelSystem> pendulum_system(PendulumPotential potential) {
    return std::make_unique<PendulumModel>(std::move(potential));
}

// ---------------------------------------------------------------------------
// Local classification.
//
// The linearized fields A_i = J Hess(F_i) of a commuting pair with a
// focus-focus quadratic model a f1 + b f2, c f1 + d f2 have eigenvalue
// quadruples {+-(a +- i b)} and {+-(c +- i d)} paired on common eigenvectors.
// All reported quantities follow from similarity invariants:
//   s_i   = sqrt(det A_i)        = a^2 + b^2  (resp. c^2 + d^2)
//   t_i   = tr(A_i^2) / 4        = a^2 - b^2
//   sigma = ac + bd              from det(A1 + A2) = ((a+c)^2 + (b+d)^2)^2
//   tau   = ac - bd              = tr(A1 A2) / 4
//   (ad - bc)^2 = s_1 s_2 - sigma^2
// The pair is focus-focus iff some combination cos(t) A1 + sin(t) A2 has a
// genuinely complex quadruple (char poly x^4 + p x^2 + q with p^2 - 4q < 0);
// elliptic or hyperbolic pairs show real separated squares or a definite
// Hessian combination instead.

namespace {

Mat4 fd_hessian(const ModelSystem& system, int component, const PhasePoint& p,
                double h) {
    Mat4 hess = mat4_zero();
    auto feval = [&](const std::array<double, 4>& d) {
        PhasePoint q = p;
        for (int i = 0; i < 4; ++i) q.coords[i] += d[i];
        const Vec2 f = system.moment_map(q);
        return component == 0 ? f.x : f.y;
    };
    const double f0 = feval({0, 0, 0, 0});
    for (int i = 0; i < 4; ++i) {
        std::array<double, 4> dp{}, dm{};
        dp[i] = h;
        dm[i] = -h;
        hess[i][i] = (feval(dp) - 2.0 * f0 + feval(dm)) / (h * h);
        for (int j = i + 1; j < 4; ++j) {
            std::array<double, 4> dpp{}, dpm{}, dmp{}, dmm{};
            dpp[i] = h; dpp[j] = h;
            dpm[i] = h; dpm[j] = -h;
            dmp[i] = -h; dmp[j] = h;
            dmm[i] = -h; dmm[j] = -h;
            hess[i][j] = hess[j][i] =
                (feval(dpp) - feval(dpm) - feval(dmp) + feval(dmm)) / (4.0 * h * h);
        }
    }
    return hess;
}

// Sylvester test: all LDL pivots strictly one sign.
bool definite(const Mat4& m, double tol) {
    Mat4 a = m;
    int sign = 0;
    for (int k = 0; k < 4; ++k) {
        const double piv = a[k][k];
        if (std::fabs(piv) <= tol) return false;
        const int s = piv > 0.0 ? 1 : -1;
        if (sign == 0) sign = s;
        else if (s != sign) return false;
        for (int i = k + 1; i < 4; ++i) {
            const double f = a[i][k] / piv;
            for (int j = k; j < 4; ++j) a[i][j] -= f * a[k][j];
        }
    }
    return true;
}

struct PairSpectrum {
    double min_disc = 0.0;  // most negative char-poly discriminant over the scan
    bool real_separated = false;
    bool odd_part = false;  // char poly failed the evenness check
};

PairSpectrum scan_combinations(const Mat4& a1, const Mat4& a2) {
    PairSpectrum out;
    out.min_disc = 1e300;
    for (int i = 0; i < 16; ++i) {
        const double th = pi * i / 16.0;
        const Mat4 a = std::cos(th) * a1 + std::sin(th) * a2;
        const double nrm = frobenius(a);
        if (nrm < 1e-12) continue;
        const Mat4 an = (1.0 / nrm) * a;
        const Mat4 an2 = an * an;
        const Mat4 an3 = an2 * an;
        if (std::fabs(trace(an)) > 1e-7 || std::fabs(trace(an3)) > 1e-7) out.odd_part = true;
        const double p = -0.5 * trace(an2);
        const double q = det4(an);
        const double disc = p * p - 4.0 * q;
        out.min_disc = std::fmin(out.min_disc, disc);
        if (disc > 1e-6) {
            const double sq = std::sqrt(disc);
            const double y1 = 0.5 * (-p + sq), y2 = 0.5 * (-p - sq);
            if (std::fabs(y1) > 1e-6 && std::fabs(y2) > 1e-6) out.real_separated = true;
        }
    }
    if (out.min_disc == 1e300) out.min_disc = 0.0;
    return out;
}

}  // namespace

SingularPointReport classify_singular_point(const ModelSystem& system, const PhasePoint& p,
                                            const ClassifyOptions& opts) {
    // Match p against the model's singular-point list.
    const SingularPoint* match = nullptr;
    for (const auto& sp : system.singular_points()) {
        if (sp.location.chart != p.chart) continue;
        double d = 0.0;
        for (int i = 0; i < 4; ++i)
            d = std::fmax(d, std::fabs(sp.location.coords[i] - p.coords[i]));
        if (d <= opts.match_tol) {
            match = &sp;
            break;
        }
    }
    if (!match) {
        const auto g1 = system.gradient(0, p);
        const auto g2 = system.gradient(1, p);
        double gn = 0.0;
        for (int i = 0; i < 4; ++i) gn = std::fmax(gn, std::fmax(std::fabs(g1[i]), std::fabs(g2[i])));
        if (gn > 1e-6)
            throw not_singular("dF does not vanish at the given point (|dF| = " +
                               std::to_string(gn) + ")");
    }

    Mat4 h1, h2;
    if (match && opts.use_exact_hessians) {
        h1 = match->hessians[0];
        h2 = match->hessians[1];
    } else {
        h1 = fd_hessian(system, 0, p, opts.fd_step);
        h2 = fd_hessian(system, 1, p, opts.fd_step);
    }

    const Mat4 omega = symplectic_j();
    const Mat4 a1 = omega * h1;
    const Mat4 a2 = omega * h2;

    const double n1 = frobenius(a1), n2 = frobenius(a2);
    {
        // Commuting linearizations are part of the integrable-pair model;
        // anything else means the quadratic parts fit no supported pattern.
        const Mat4 comm = a1 * a2 + (-1.0) * (a2 * a1);
        if (frobenius(comm) > 1e-5 * (n1 * n2 + 1e-30))
            throw indeterminate_classification("linearized fields do not commute");
    }

    SingularPointReport report;
    report.location = p;

    const double s1 = std::sqrt(std::fmax(0.0, det4(a1)));
    const double s2 = std::sqrt(std::fmax(0.0, det4(a2)));
    const double t1 = 0.25 * trace(a1 * a1);
    const double t2 = 0.25 * trace(a2 * a2);
    const double s12 = std::sqrt(std::fmax(0.0, det4(a1 + a2)));
    const double sigma = 0.5 * (s12 - s1 - s2);        // ac + bd
    const double tau = 0.25 * trace(a1 * a2);          // ac - bd
    const double det2 = s1 * s2 - sigma * sigma;       // (ad - bc)^2
    report.det_ab_cd = std::sqrt(std::fmax(0.0, det2));

    double a = std::sqrt(std::fmax(0.0, 0.5 * (s1 + t1)));
    double b = std::sqrt(std::fmax(0.0, 0.5 * (s1 - t1)));
    double c = std::sqrt(std::fmax(0.0, 0.5 * (s2 + t2)));
    double d = std::sqrt(std::fmax(0.0, 0.5 * (s2 - t2)));
    const double ac = 0.5 * (sigma + tau), bd = 0.5 * (sigma - tau);
    if (a > 1e-9 && c > 1e-9 && ac < 0.0) c = -c;
    if (b > 1e-9 && d > 1e-9 && bd < 0.0) b = -b;

    const PairSpectrum spec = scan_combinations(a1, a2);
    if (spec.odd_part)
        throw indeterminate_classification("char polynomial of a combination is not even");

    if (spec.min_disc < -1e-6) {
        if (report.det_ab_cd <= opts.degeneracy_tol)
            throw indeterminate_classification(
                "complex spectrum but |ad - bc| below tolerance");
        report.classification = PointType::focus_focus;
        report.weights = std::make_pair(1, -1);
        report.a = a;
        report.b = b;
        report.c = c;
        report.d = d;
        return report;
    }

    const double scale = std::fmax(n1, n2);
    const bool any_definite =
        scale > 1e-12 &&
        (definite((1.0 / scale) * h1, 1e-8) || definite((1.0 / scale) * h2, 1e-8) ||
         definite((1.0 / scale) * (h1 + h2), 1e-8) ||
         definite((1.0 / scale) * (h1 + (-1.0) * h2), 1e-8));
    if (spec.real_separated || any_definite) {
        // Elliptic or hyperbolic blocks: not expressible in the focus-focus
        // basis; coefficients are reported as zero.
        report.classification = PointType::other_nondegenerate;
        report.det_ab_cd = 0.0;
        return report;
    }

    report.classification = PointType::degenerate;
    report.a = a;
    report.b = b;
    report.c = c;
    report.d = d;
    return report;
}

FiberCensus singular_fiber_census(const ModelSystem& system, const Vec2& value,
                                  double value_tol) {
    FiberCensus census;
    for (const auto& sp : system.singular_points()) {
        if (std::fabs(sp.moment_value.x - value.x) <= value_tol &&
            std::fabs(sp.moment_value.y - value.y) <= value_tol) {
            census.k += sp.sign;
            census.signs.push_back(sp.sign);
        }
    }
    if (census.signs.empty())
        throw not_critical("no singular point lies over (" + std::to_string(value.x) +
                           ", " + std::to_string(value.y) + ")");
    return census;
}

}  // namespace ffmono
