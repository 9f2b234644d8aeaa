#include "ffmono/quadrature.hpp"
#include <cstdio>

#include <array>
#include <cmath>
#include <vector>

#include "ffmono/errors.hpp"
#include "ffmono/geom.hpp"

namespace ffmono {

namespace {

// Gauss-Legendre nodes/weights on [-1, 1], computed once by Newton iteration
// on the Legendre recurrence.
struct GaussRule {
    std::vector<double> node, weight;
};

GaussRule make_gauss(int n) {
    GaussRule g;
    g.node.resize(n);
    g.weight.resize(n);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::fabs(dx) < 1e-16) break;
        }
        g.node[i] = x;
        g.weight[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return g;
}

const GaussRule& gauss15() {
    static const GaussRule g = make_gauss(15);
    return g;
}

double gauss_panel(const std::function<double(double)>& f, double a, double b,
                   bool* finite) {
    const GaussRule& g = gauss15();
    const double m = 0.5 * (a + b), r = 0.5 * (b - a);
    double s = 0.0;
    for (std::size_t i = 0; i < g.node.size(); ++i) {
        const double v = f(m + r * g.node[i]);
        if (!std::isfinite(v)) {
            *finite = false;
            return 0.0;
        }
        s += g.weight[i] * v;
    }
    *finite = true;
    return s * r;
}

struct AdaptiveState {
    const std::function<double(double)>* f = nullptr;
    int max_depth = 24;
    int depth_reached = 0;
    double err_sum = 0.0;
};

double adapt(AdaptiveState& st, double a, double b, double whole, bool whole_ok,
             double parent_err, double tol, int depth) {
    st.depth_reached = std::max(st.depth_reached, depth);
    const double m = 0.5 * (a + b);
    bool ok_l = false, ok_r = false;
    const double left = gauss_panel(*st.f, a, m, &ok_l);
    const double right = gauss_panel(*st.f, m, b, &ok_r);
    const bool ok = whole_ok && ok_l && ok_r;
    const double err = std::fabs(whole - (left + right));
    // Stalled refinement at a tiny relative error means the panel sits on the
    // roundoff plateau of the integrand (e.g. the 1/(1 - z^2) factor loses
    // ~1e-11 of relative accuracy right next to a pole); splitting further
    // cannot help, so the panel is accepted with its recorded error.
    const bool stalled = depth >= 10 && err >= 0.25 * parent_err &&
                         err <= 1e-7 * (std::fabs(left) + std::fabs(right));
    if (ok && (err <= tol || stalled)) {
        st.err_sum += err;
        return left + right;
    }
    if (depth >= st.max_depth) {
        if (!ok)
            throw non_convergence("adaptive quadrature: non-finite integrand at depth " +
                                  std::to_string(depth));
        char buf[128];
        std::snprintf(buf, sizeof buf,
                      "adaptive quadrature: error %.3e above budget %.3e at depth %d",
                      err, tol, depth);
        throw non_convergence(buf);
    }
    return adapt(st, a, m, left, ok_l, err, 0.5 * tol, depth + 1) +
           adapt(st, m, b, right, ok_r, err, 0.5 * tol, depth + 1);
}

}  // namespace

QuadratureResult adaptive_integrate(const std::function<double(double)>& f, double a,
                                    double b, double tol, int max_depth) {
    if (!(tol > 0.0)) throw invalid_config("quadrature tolerance must be positive");
    AdaptiveState st;
    st.f = &f;
    st.max_depth = max_depth;
    bool ok = false;
    const double whole = gauss_panel(f, a, b, &ok);
    QuadratureResult res;
    res.value = adapt(st, a, b, whole, ok, 1e300, tol, 0);
    res.error_estimate = st.err_sum;
    res.refinement_depth = st.depth_reached;
    return res;
}

QuadratureResult singular_quadrature(const std::function<double(double)>& f, double a,
                                     double b, double tol, int max_depth) {
    if (!(b > a)) throw invalid_config("singular_quadrature: empty interval");
    const double m = 0.5 * (a + b), r = 0.5 * (b - a);
    // z = m + r sin(u): dz = r cos(u) du kills the endpoint 1/sqrt factors.
    auto g = [&f, m, r](double u) {
        const double c = std::cos(u);
        return f(m + r * std::sin(u)) * r * c;
    };
    return adaptive_integrate(g, -0.5 * pi, 0.5 * pi, tol, max_depth);
}

QuadratureResult weighted_endpoint_quadrature(
    const std::function<double(double, double)>& g, double a, double b, double tol,
    int max_depth) {
    if (!(b > a)) throw invalid_config("weighted quadrature: empty interval");
    const double m = 0.5 * (a + b), r = 0.5 * (b - a);
    // (z - a)(b - z) = r^2 cos^2(u) exactly under the substitution, so the
    // weight is evaluated without the cancellation of z - a near u = -pi/2.
    auto h = [&g, m, r](double u) {
        const double c = std::cos(u);
        return g(m + r * std::sin(u), r * c);
    };
    return adaptive_integrate(h, -0.5 * pi, 0.5 * pi, tol, max_depth);
}

}  // namespace ffmono
