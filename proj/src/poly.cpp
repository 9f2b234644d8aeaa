#include "ffmono/poly.hpp"

#include <algorithm>
#include <cmath>

namespace ffmono {

namespace {

double polish_newton(const Polynomial& p, const Polynomial& dp, double lo, double hi,
                     double x0) {
    // Bisection bracket maintained alongside Newton so the iteration cannot
    // escape [lo, hi].
    double a = lo, b = hi;
    const double fa = p(a);
    double x = x0;
    double sa = (fa < 0.0) ? -1.0 : 1.0;
    for (int it = 0; it < 80; ++it) {
        const double fx = p(x);
        if (fx == 0.0) return x;
        if ((fx < 0.0 ? -1.0 : 1.0) == sa) a = x; else b = x;
        const double d = dp(x);
        double xn = (d != 0.0) ? x - fx / d : 0.5 * (a + b);
        if (!(xn > a && xn < b)) xn = 0.5 * (a + b);
        if (std::fabs(xn - x) <= 1e-15 * (1.0 + std::fabs(x))) return xn;
        x = xn;
    }
    return x;
}

}  // namespace

std::vector<double> roots_in_interval(const Polynomial& p, double a, double b,
                                      double scan_step, double end_tol) {
    std::vector<double> roots;
    const Polynomial dp = p.derivative();

    const int n = std::max(8, static_cast<int>(std::ceil((b - a) / scan_step)));
    const double h = (b - a) / n;
    std::vector<double> vals(n + 1);
    double scale = 0.0;
    for (int i = 0; i <= n; ++i) {
        vals[i] = p(a + i * h);
        scale = std::max(scale, std::fabs(vals[i]));
    }
    if (scale == 0.0) return roots;  // identically zero on the grid

    auto push = [&roots](double r) {
        if (roots.empty() || std::fabs(roots.back() - r) > 1e-12) roots.push_back(r);
    };

    // Grid nodes indistinguishable from zero count as roots; sign changes
    // between non-zero nodes are bisected and Newton-polished.
    std::vector<bool> node_zero(n + 1);
    for (int i = 0; i <= n; ++i) node_zero[i] = std::fabs(vals[i]) <= end_tol * scale;

    if (node_zero[0]) push(a);
    for (int i = 0; i < n; ++i) {
        if (node_zero[i + 1]) {
            push(a + (i + 1) * h);
            continue;
        }
        if (node_zero[i]) continue;
        if ((vals[i] < 0.0) != (vals[i + 1] < 0.0)) {
            const double x0 = a + i * h, x1 = a + (i + 1) * h;
            push(polish_newton(p, dp, x0, x1, 0.5 * (x0 + x1)));
        }
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

}  // namespace ffmono
