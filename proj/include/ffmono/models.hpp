#pragma once

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ffmono/geom.hpp"
#include "ffmono/poly.hpp"

namespace ffmono {

// Phase-space point in one of the model's canonical charts. Coordinates are
// interleaved canonical pairs (q1, p1, q2, p2); all built-in systems have two
// degrees of freedom.
struct PhasePoint {
    std::array<double, 4> coords{};
    int chart = 0;
};

enum class PointType { focus_focus, degenerate, other_nondegenerate };

struct SingularPointReport {
    PhasePoint location;
    // Coefficients of the quadratic parts in the focus-focus basis:
    // F1 ~ a f1 + b f2, F2 ~ c f1 + d f2 with f1 = x1 y1 + x2 y2 and
    // f2 = x1 y2 - x2 y1. Signs fixed by the convention a >= 0, d >= 0,
    // ad - bc >= 0.
    double a = 0, b = 0, c = 0, d = 0;
    double det_ab_cd = 0;  // |ad - bc|
    PointType classification = PointType::degenerate;
    std::optional<std::pair<int, int>> weights;  // (1,-1) for focus-focus
};

// A singular point of the moment map together with an exactly-canonical local
// frame centered on it (the main chart may be degenerate there, e.g. the
// azimuthal chart at a pendulum pole).
struct SingularPoint {
    PhasePoint location;
    Vec2 moment_value;
    int sign = +1;  // always + for Hamiltonian systems
    std::string label;
    std::array<Mat4, 2> hessians{};  // exact Hessians of (F1, F2) at the point
};

class ModelSystem {
public:
    virtual ~ModelSystem() = default;

    virtual const std::string& name() const = 0;
    int dof() const { return 2; }

    virtual Vec2 moment_map(const PhasePoint& p) const = 0;
    // Gradient of moment-map component (0 or 1) in the point's chart.
    virtual std::array<double, 4> gradient(int component, const PhasePoint& p) const = 0;
    virtual bool chart_valid(const PhasePoint& p) const = 0;
    // True when coordinate i of the given chart is circle-valued (2*pi period).
    virtual bool angle_coordinate(int chart, int i) const { (void)chart, (void)i; return false; }

    virtual const std::vector<SingularPoint>& singular_points() const = 0;
    // Critical values carrying the singular points above.
    virtual std::vector<Vec2> isolated_critical_values() const = 0;
    // Distance from `value` to the full critical-value set (isolated values
    // plus any critical curves).
    virtual double critical_distance(const Vec2& value) const = 0;
    // Index (0-based) of the moment-map component generating a 2*pi-periodic
    // flow, if any.
    virtual std::optional<int> s1_component() const = 0;

    // Hamiltonian vector field of kappa*F1 + eta*F2 at p, from the exact
    // gradients and the canonical pairing on interleaved (q,p) pairs.
    std::array<double, 4> combined_field(double kappa, double eta, const PhasePoint& p) const;

    // Distance between two points in the same chart, wrapping circle-valued
    // coordinates.
    double phase_distance(const PhasePoint& a, const PhasePoint& b) const;
};

// ---------------------------------------------------------------------------
// Built-in systems.

// Polynomial potential V(z) = sum a_i z^i on z in [-1, 1]; degree <= 6.
class PendulumPotential {
public:
    PendulumPotential() : poly_({0.0, 1.0}) {}
    explicit PendulumPotential(std::vector<double> coeffs);

    double operator()(double z) const { return poly_(z); }
    double derivative(double z) const { return dpoly_(z); }
    const Polynomial& poly() const { return poly_; }

private:
    Polynomial poly_;
    Polynomial dpoly_;
};

class PendulumModel;
class LinearFocusModel;

// Spherical pendulum with F1 = H (kinetic + V(z)) and F2 = J (vertical
// angular momentum). Chart 0 is the reduced description (z, p_z, phi, p_phi);
// charts 1 and 2 are exact cotangent charts at the north and south poles.
class PendulumModel : public ModelSystem {
public:
    enum Chart { reduced = 0, north = 1, south = 2 };

    explicit PendulumModel(PendulumPotential potential);

    const std::string& name() const override { return name_; }
    Vec2 moment_map(const PhasePoint& p) const override;
    std::array<double, 4> gradient(int component, const PhasePoint& p) const override;
    bool chart_valid(const PhasePoint& p) const override;
    bool angle_coordinate(int chart, int i) const override {
        return chart == reduced && i == 2;
    }
    const std::vector<SingularPoint>& singular_points() const override { return singular_; }
    std::vector<Vec2> isolated_critical_values() const override;
    double critical_distance(const Vec2& value) const override;
    std::optional<int> s1_component() const override { return 1; }

    const PendulumPotential& potential() const { return potential_; }

    // Radial polynomial of the reduced dynamics: zdot^2 = P(z) with
    // P(z) = 2 (h - V(z)) (1 - z^2) - j^2.
    Polynomial radial_poly(double h, double j) const;

    // Energy of the rest point at pole sigma = +-1.
    double pole_energy(int sigma) const { return potential_(static_cast<double>(sigma)); }
    // True when the pole is a local maximum of V along the sphere (the rest
    // point sits on a pinched fiber).
    bool pole_unstable(int sigma) const;

    // Sampled relative-equilibrium curves (h, j), both signs of j.
    const std::vector<std::vector<Vec2>>& critical_curves() const { return crit_curves_; }

    // Bounding box {h_min, h_max, j_max} of the isolated critical-value island
    // that appears when V has an interior maximum below the pole level.
    // Empty when no island exists.
    std::optional<std::array<double, 3>> island_bounds() const;

private:
    void build_singular_points();
    void build_critical_curves();

    std::string name_;
    PendulumPotential potential_;
    std::vector<SingularPoint> singular_;
    std::vector<std::vector<Vec2>> crit_curves_;
};

// Quadratic focus-focus model on R^4: f1 = x1 y1 + x2 y2, f2 = x1 y2 - x2 y1
// with coords = (x1, y1, x2, y2). The f2-flow is a rotation of period 2*pi.
class LinearFocusModel : public ModelSystem {
public:
    LinearFocusModel();

    const std::string& name() const override { return name_; }
    Vec2 moment_map(const PhasePoint& p) const override;
    std::array<double, 4> gradient(int component, const PhasePoint& p) const override;
    bool chart_valid(const PhasePoint& p) const override;
    const std::vector<SingularPoint>& singular_points() const override { return singular_; }
    std::vector<Vec2> isolated_critical_values() const override { return {{0.0, 0.0}}; }
    double critical_distance(const Vec2& value) const override { return norm(value); }
    std::optional<int> s1_component() const override { return 1; }

    // Radius of the gluing circle used by the period-lattice return
    // construction (see lattice.hpp).
    double glue_radius() const { return 1.0; }

private:
    std::string name_;
    std::vector<SingularPoint> singular_;
};

std::unique_ptr<ModelSystem> linear_focus_focus_model();
std::unique_ptr<ModelSystem> pendulum_system(PendulumPotential potential);
// V(z) = z - z^2 / (2R), the height potential flattened at the top.
PendulumPotential modified_pendulum_potential(double R);

// ---------------------------------------------------------------------------
// Local classification and fiber census.

struct ClassifyOptions {
    double fd_step = 1e-4;            // central finite-difference step
    double degeneracy_tol = 1e-8;     // threshold on |ad - bc|
    double match_tol = 1e-6;          // max distance of p to a listed singular point
    bool use_exact_hessians = true;   // prefer model-supplied Hessians
};

SingularPointReport classify_singular_point(const ModelSystem& system, const PhasePoint& p,
                                            const ClassifyOptions& opts = {});

struct FiberCensus {
    int k = 0;
    std::vector<int> signs;
};

// Number (and signs) of focus-focus points on the fiber over `value`, from the
// model's analytic singular-point list. Throws not_critical when no singular
// point lies over the value.
FiberCensus singular_fiber_census(const ModelSystem& system, const Vec2& value,
                                  double value_tol = 1e-8);

}  // namespace ffmono
