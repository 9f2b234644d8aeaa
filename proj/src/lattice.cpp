#include "ffmono/lattice.hpp"

#include <cmath>
#include <complex>
#include <string>

#include "ffmono/errors.hpp"
#include "ffmono/flow.hpp"
#include "ffmono/quadrature.hpp"
#include "ffmono/turning.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ffmono {

namespace {

// ---------------------------------------------------------------------------
// Pendulum branch: period and rotation integrals over the oscillation
// interval, with P factored through its bracketing roots so the integrands
// never see the endpoint cancellation.
//
//   T(h, j)      = 2 \int dz / sqrt(P)
//   dphi(h, j)   = 2 j \int dz / ((1 - z^2) sqrt(P))   (+ pi per pole passage)
//
// At j = 0 exactly the orbit passes through a pole whenever the oscillation
// interval reaches z = +-1; each passage flips the azimuth by pi, which the
// quadrature (odd in j) cannot see. The correction keeps the period lattice
// continuous across j = 0.

struct PendulumIntegrals {
    double period = 0.0;
    double dphi = 0.0;  // azimuth advance over one radial period
    double err = 0.0;
};

// Below this momentum the orbit is numerically planar: the turning points sit
// within ~1e-11 of the poles and the rotation integrand cannot be evaluated
// there, while its limit is known exactly (a pi flip per pole passage plus
// O(j)). Above it the quadrature resolves the near-pole spike itself.
constexpr double j_planar_cut = 2e-4;
constexpr double pole_eps = 1e-6;

PendulumIntegrals pendulum_integrals(const PendulumModel& model, double h, double j,
                                     double quad_tol) {
    const Polynomial P = model.radial_poly(h, j);
    TurningInterval iv;
    try {
        iv = turning_points(P, j, h);
    } catch (const numerical_error& e) {
        throw loop_too_close(std::string("period_lattice: ") + e.what());
    }
    const double zlo = iv.lo, zhi = iv.hi;
    const Polynomial q = P.deflate(zlo).deflate(zhi);
    // P = (z - zlo)(zhi - z) Qp with Qp > 0 on the interval; the endpoint
    // factors come stably from the weighted quadrature's substitution.
    auto qp = [&q](double z) { return std::fmax(-q(z), 1e-300); };

    PendulumIntegrals out;
    const QuadratureResult t_res = weighted_endpoint_quadrature(
        [&qp](double z, double) { return 1.0 / std::sqrt(qp(z)); }, zlo, zhi, quad_tol);
    out.period = 2.0 * t_res.value;
    out.err = 2.0 * t_res.error_estimate;

    if (std::fabs(j) > j_planar_cut) {
        const QuadratureResult r_res = weighted_endpoint_quadrature(
            [&qp](double z, double) { return 1.0 / ((1.0 - z * z) * std::sqrt(qp(z))); },
            zlo, zhi, quad_tol);
        out.dphi = 2.0 * j * r_res.value;
        out.err += 2.0 * std::fabs(j) * r_res.error_estimate;
    } else {
        if (zlo <= -1.0 + pole_eps) out.dphi += pi;
        if (zhi >= 1.0 - pole_eps) out.dphi += pi;
        out.err += 8.0 * std::fabs(j);  // dropped regular part is O(j)
    }
    return out;
}

PhasePoint pendulum_torus_point(const PendulumModel& model, const Vec2& value) {
    const Polynomial P = model.radial_poly(value.x, value.y);
    TurningInterval iv;
    try {
        iv = turning_points(P, value.y, value.x);
    } catch (const numerical_error& e) {
        throw loop_too_close(std::string("torus_point: ") + e.what());
    }
    const double z = 0.5 * (iv.lo + iv.hi);
    PhasePoint p;
    p.chart = PendulumModel::reduced;
    p.coords = {z, std::sqrt(std::fmax(P(z), 0.0)) / (1.0 - z * z), 0.0, value.y};
    return p;
}

// ---------------------------------------------------------------------------
// Linear-model branch. The local fibers u v = c (u = x1 - i x2,
// v = y1 + i y2) are cylinders, compactified by gluing the exit circle
// |u| = R to the entry circle |v| = R with u -> (c/R^2) u, the integral-affine
// cut-and-glue picture in phase space. The long generator is found by
// shooting: flow X1 until |u| = R, glue, and close up with the X2 rotation.

std::complex<double> u_of(const PhasePoint& p) { return {p.coords[0], -p.coords[2]}; }
std::complex<double> v_of(const PhasePoint& p) { return {p.coords[1], p.coords[3]}; }

PhasePoint linear_point(const std::complex<double>& u, const std::complex<double>& v) {
    PhasePoint p;
    p.coords = {u.real(), v.real(), -u.imag(), v.imag()};
    return p;
}

PhasePoint linear_torus_point(const LinearFocusModel& model, const Vec2& value) {
    const std::complex<double> c{value.x, value.y};
    const double R = model.glue_radius();
    const std::complex<double> u0{std::abs(c) / R, 0.0};
    return linear_point(u0, c / u0);
}

struct LinearReturn {
    double period = 0.0;
    double theta = 0.0;
    PhasePoint start;
};

LinearReturn linear_return(const LinearFocusModel& model, const Vec2& value,
                           double flow_tol) {
    const std::complex<double> c{value.x, value.y};
    const double R = model.glue_radius();
    const PhasePoint p0 = linear_torus_point(model, value);
    const std::complex<double> u0 = u_of(p0);

    auto radial_gap = [&](double t) {
        const PhasePoint pt = flow(model, p0, {1.0, 0.0, t, flow_tol});
        return std::log(std::abs(u_of(pt)) / R);
    };
    // log|u(t)| grows monotonically along X1; secant from the analytic guess.
    double t0 = std::log(R / std::abs(u0));
    double t1 = t0 * (1.0 + 1e-3) + 1e-6;
    double g0 = radial_gap(t0), g1 = radial_gap(t1);
    for (int it = 0; it < 40 && std::fabs(g1) > 1e-13; ++it) {
        if (g1 == g0) break;
        const double t2 = t1 - g1 * (t1 - t0) / (g1 - g0);
        t0 = t1;
        g0 = g1;
        t1 = t2;
        g1 = radial_gap(t1);
    }
    const double T = t1;

    const PhasePoint exit = flow(model, p0, {1.0, 0.0, T, flow_tol});
    const std::complex<double> lambda = c / (R * R);
    const std::complex<double> u_glued = lambda * u_of(exit);
    const std::complex<double> v_glued = v_of(exit) / lambda;

    // X2 rotates u by e^{-i s}; s closes u back onto u0.
    const double theta = reduce_angle(std::arg(u_glued / u0));
    const std::complex<double> u_back = u_glued * std::exp(std::complex<double>(0, -theta));
    const std::complex<double> v_back = v_glued * std::exp(std::complex<double>(0, +theta));
    if (std::abs(u_back - u0) + std::abs(v_back - v_of(p0)) > 1e2 * flow_tol + 1e-10)
        throw verification_failure("linear-model return does not close on the start fiber point");

    return {T, theta, p0};
}

// Glue map on phase points (linear model only), used by the closure check.
PhasePoint apply_glue(const LinearFocusModel& model, const Vec2& value, const PhasePoint& p) {
    const std::complex<double> c{value.x, value.y};
    const std::complex<double> lambda = c / (model.glue_radius() * model.glue_radius());
    return linear_point(lambda * u_of(p), v_of(p) / lambda);
}

// Closure check for a basis generator: one X1 leg (with a single gluing
// crossing on the linear model) followed by the X2 rotation. Integer
// combinations with |n| >= 2 would cross the gluing circle n times and are
// not handled here.
void verify_closure(const ModelSystem& system, const Vec2& value, const PhasePoint& start,
                    const Vec2& gen, const LatticeOptions& opts) {
    PhasePoint p = start;
    const double flow_tol = std::fmin(opts.flow_tol, 0.05 * opts.verify_tol);
    if (gen.x != 0.0) {
        p = flow(system, p, {1.0, 0.0, gen.x, flow_tol});
        if (const auto* lin = dynamic_cast<const LinearFocusModel*>(&system))
            p = apply_glue(*lin, value, p);
    }
    if (gen.y != 0.0) p = flow(system, p, {0.0, 1.0, gen.y, flow_tol});
    const double miss = system.phase_distance(start, p);
    if (miss > opts.verify_tol)
        throw verification_failure("generator (" + std::to_string(gen.x) + ", " +
                                   std::to_string(gen.y) + ") misses closure by " +
                                   std::to_string(miss));
}

}  // namespace

PhasePoint torus_point(const ModelSystem& system, const Vec2& value) {
    if (const auto* pend = dynamic_cast<const PendulumModel*>(&system))
        return pendulum_torus_point(*pend, value);
    if (const auto* lin = dynamic_cast<const LinearFocusModel*>(&system))
        return linear_torus_point(*lin, value);
    throw invalid_config("torus_point: unsupported model " + system.name());
}

PeriodLatticeBasis period_lattice(const ModelSystem& system, const Vec2& value,
                                  const LatticeOptions& opts) {
    if (system.critical_distance(value) < opts.margin)
        throw loop_too_close("value within margin " + std::to_string(opts.margin) +
                             " of the critical set");

    PeriodLatticeBasis basis;
    basis.base_value = value;
    basis.generator_s1 = {0.0, two_pi};

    if (const auto* pend = dynamic_cast<const PendulumModel*>(&system)) {
        const PendulumIntegrals in =
            pendulum_integrals(*pend, value.x, value.y, opts.quad_tol);
        basis.generator_long = {in.period, reduce_angle(-in.dphi)};
        basis.quad_error = in.err;
    } else if (const auto* lin = dynamic_cast<const LinearFocusModel*>(&system)) {
        const LinearReturn ret = linear_return(*lin, value, opts.flow_tol);
        basis.generator_long = {ret.period, ret.theta};
        basis.quad_error = 10.0 * opts.flow_tol;
    } else {
        throw invalid_config("period_lattice: unsupported model " + system.name());
    }

    if (opts.verify) {
        const PhasePoint start = torus_point(system, value);
        verify_closure(system, value, start, basis.generator_s1, opts);
        verify_closure(system, value, start, basis.generator_long, opts);
    }
    return basis;
}

std::vector<PeriodLatticeBasis> period_lattice_batch(const ModelSystem& system,
                                                     const std::vector<Vec2>& values,
                                                     const LatticeOptions& opts, Exec exec) {
    std::vector<PeriodLatticeBasis> out(values.size());
    std::vector<std::string> failures(values.size());
    const auto body = [&](std::ptrdiff_t i) {
        try {
            out[i] = period_lattice(system, values[i], opts);
        } catch (const std::exception& e) {
            failures[i] = e.what();
        }
    };
    if (exec == Exec::parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(values.size()); ++i)
            body(i);
    } else {
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(values.size()); ++i)
            body(i);
    }
    for (std::size_t i = 0; i < failures.size(); ++i)
        if (!failures[i].empty())
            throw loop_too_close("sample " + std::to_string(i) + ": " + failures[i]);
    return out;
}

S1Coefficients s1_coefficients(const ModelSystem& system,
                               const std::vector<PhasePoint>& near_fiber_points,
                               const LatticeOptions& opts) {
    if (near_fiber_points.empty())
        throw invalid_config("s1_coefficients: no probe points given");
    std::vector<Vec2> coeffs;
    for (const auto& p : near_fiber_points) {
        const Vec2 value = system.moment_map(p);
        const PeriodLatticeBasis basis = period_lattice(system, value, opts);
        Vec2 g1 = basis.generator_s1, g2 = basis.generator_long;
        lattice_reduce(g1, g2);
        // The circle generator is the primitive lattice vector with the
        // smallest X1-time component; the reduction bounds the search to
        // small integer combinations of the reduced pair.
        Vec2 v{0.0, 0.0};
        bool have = false;
        for (int a = -3; a <= 3; ++a)
            for (int b = -3; b <= 3; ++b) {
                if (a == 0 && b == 0) continue;
                const Vec2 cand = g1 * a + g2 * b;
                if (!have || std::fabs(cand.x) < std::fabs(v.x) - 1e-12 ||
                    (std::fabs(cand.x) < std::fabs(v.x) + 1e-12 &&
                     std::fabs(cand.y) < std::fabs(v.y) - 1e-12)) {
                    v = cand;
                    have = true;
                }
            }
        if (v.y < 0.0 || (v.y == 0.0 && v.x < 0.0)) v = v * -1.0;
        coeffs.push_back(v / two_pi);
    }
    S1Coefficients out;
    for (const auto& c : coeffs) {
        out.kappa += c.x / coeffs.size();
        out.eta += c.y / coeffs.size();
    }
    for (std::size_t i = 0; i < coeffs.size(); ++i)
        for (std::size_t j = i + 1; j < coeffs.size(); ++j)
            out.spread = std::fmax(out.spread,
                                   std::fmax(std::fabs(coeffs[i].x - coeffs[j].x),
                                             std::fabs(coeffs[i].y - coeffs[j].y)));
    if (out.spread > 1e-3)
        throw inconsistent_generators("circle-generator spread " +
                                      std::to_string(out.spread) + " exceeds 1e-3");
    return out;
}

double pendulum_second_action(const PendulumModel& model, double h, double j,
                              double quad_tol) {
    const Polynomial P = model.radial_poly(h, j);
    TurningInterval iv;
    try {
        iv = turning_points(P, j, h);
    } catch (const numerical_error& e) {
        throw loop_too_close(std::string("second action: ") + e.what());
    }
    const double zlo = iv.lo, zhi = iv.hi;
    const Polynomial q = P.deflate(zlo).deflate(zhi);
    auto qp = [&q](double z) { return std::fmax(-q(z), 0.0); };
    // I2 = (1/2pi) oint p_z dz = (1/pi) int sqrt(P)/(1 - z^2) dz
    const QuadratureResult res = weighted_endpoint_quadrature(
        [&qp](double z, double w) { return w * w * std::sqrt(qp(z)) / (1.0 - z * z); },
        zlo, zhi, quad_tol);
    return res.value / pi;
}

}  // namespace ffmono
