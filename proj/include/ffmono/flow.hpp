#pragma once

#include "ffmono/models.hpp"

namespace ffmono {

// Flow of the field kappa*X1 + eta*X2 for the given duration. The integrator
// is the implicit midpoint rule (symplectic, order 2); the step count doubles
// until both the moment-map drift along the trajectory and a step-doubling
// position-error estimate fall below `tolerance`.
struct FlowSpec {
    double kappa = 1.0;
    double eta = 0.0;
    double duration = 0.0;
    double tolerance = 1e-9;
};

struct FlowDiagnostics {
    long long steps = 0;
    double moment_drift = 0.0;
    double position_error = 0.0;
};

PhasePoint flow(const ModelSystem& system, const PhasePoint& start, const FlowSpec& spec,
                FlowDiagnostics* diag = nullptr);

}  // namespace ffmono
