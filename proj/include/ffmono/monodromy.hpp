#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ffmono/lattice.hpp"
#include "ffmono/models.hpp"

namespace ffmono {

// Closed loop of regular values (first sample repeated last).
struct ValueLoop {
    std::vector<Vec2> samples;
    std::optional<Vec2> target;  // enclosed critical value, when meaningful
    int orientation = +1;

    static ValueLoop circle(const Vec2& center, double radius, int points,
                            int orientation = +1);
    static ValueLoop polygon(const std::vector<Vec2>& vertices, int points_per_edge,
                             int orientation = +1);
    // Concatenation a.b sharing a basepoint (loop composition in the base).
    static ValueLoop concatenate(const ValueLoop& a, const ValueLoop& b);

    ValueLoop reversed() const;
    // Polygonal winding number around p (exact integer).
    int winding_number(const Vec2& p) const;
    // Checks closure, margin to the critical set and the winding/orientation
    // invariant. Throws invalid_loop / loop_too_close.
    void validate(const ModelSystem& system, double margin = 1e-3) const;
};

struct MonodromyMatrix {
    Mat2i entries;
    std::string basis_note;  // basepoint basis id; guards loop composition
};

struct ContinuationRow {
    int index = 0;
    Vec2 value;
    double period = 0.0;
    double theta = 0.0;  // continued branch of the closing time
    double quad_error = 0.0;
};

struct ContinuationOptions {
    LatticeOptions lattice;
    double integer_snap = 1e-3;
    double theta_step_limit = pi / 2;  // subdivision threshold on increments
    int max_subdivision_depth = 16;
    Exec exec = Exec::parallel;
    // Optional initial basis in terms of the default {(0,2pi), (T0,Theta0)}:
    // rows of U are the coordinates of the starting basis vectors.
    std::optional<Mat2i> initial_basis;
};

struct ContinuationResult {
    MonodromyMatrix matrix;      // literal transport matrix in the chosen basis
    long long k = 0;             // |k| of the unipotent conjugacy class
    std::vector<ContinuationRow> trace;
    int subdivision_depth = 0;
    long long quadrature_calls = 0;
};

ContinuationResult continue_lattice(const ModelSystem& system, const ValueLoop& loop,
                                    const ContinuationOptions& opts = {});

// Closed-form calculators.
MonodromyMatrix monodromy_from_count(long long k);
MonodromyMatrix monodromy_signed(const std::vector<int>& signs);
Mat3i embed_3dof(const Mat2i& m);
// Transport along loop a, then loop b: returns m_b * m_a. Throws
// basis_mismatch when the two matrices are recorded in different bases.
MonodromyMatrix compose_loops(const MonodromyMatrix& m_a, const MonodromyMatrix& m_b);

void write_trace_csv(const std::string& path, const std::vector<ContinuationRow>& rows);

}  // namespace ffmono
