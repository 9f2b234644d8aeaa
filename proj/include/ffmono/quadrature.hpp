#pragma once

#include <functional>

namespace ffmono {

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    int refinement_depth = 0;
};

// Adaptive Gauss-Legendre panel quadrature of a smooth integrand on [a, b].
// Panels split until the whole-vs-halves discrepancy meets the local error
// budget. Throws non_convergence past `max_depth` levels.
QuadratureResult adaptive_integrate(const std::function<double(double)>& f, double a,
                                    double b, double tol, int max_depth = 24);

// Quadrature for integrands with inverse-square-root behavior at both
// endpoints: substitutes z = m + r sin(u) (m, r the interval midpoint and
// half-width), which turns f ~ 1/sqrt((z-a)(b-z)) into a smooth integrand,
// then runs the adaptive panel scheme. Interior near-poles are handled by the
// same panel refinement.
QuadratureResult singular_quadrature(const std::function<double(double)>& f, double a,
                                     double b, double tol, int max_depth = 24);

// Same substitution for integrands of the form g(z, w) / w with
// w = sqrt((z-a)(b-z)). The weight is produced by the substitution itself
// (w = r cos u), so the integrand never sees the endpoint cancellation of
// z - a and b - z. Integrates g(z(u), w(u)) du over (-pi/2, pi/2).
QuadratureResult weighted_endpoint_quadrature(
    const std::function<double(double, double)>& g, double a, double b, double tol,
    int max_depth = 24);

}  // namespace ffmono
