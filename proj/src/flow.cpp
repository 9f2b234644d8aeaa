#include "ffmono/flow.hpp"

#include <cmath>

#include "ffmono/errors.hpp"

namespace ffmono {

namespace {

using State = std::array<double, 4>;

State field_at(const ModelSystem& system, const FlowSpec& spec, const PhasePoint& base,
               const State& coords) {
    PhasePoint p = base;
    p.coords = coords;
    return system.combined_field(spec.kappa, spec.eta, p);
}

// One implicit midpoint step; fixed-point iteration converges fast for the
// small steps the controller picks.
State midpoint_step(const ModelSystem& system, const FlowSpec& spec, const PhasePoint& base,
                    const State& x, double h) {
    State y = x;
    State f = field_at(system, spec, base, x);
    for (int i = 0; i < 4; ++i) y[i] = x[i] + h * f[i];
    for (int it = 0; it < 60; ++it) {
        State mid;
        for (int i = 0; i < 4; ++i) mid[i] = 0.5 * (x[i] + y[i]);
        f = field_at(system, spec, base, mid);
        double delta = 0.0, scale = 1.0;
        State yn;
        for (int i = 0; i < 4; ++i) {
            yn[i] = x[i] + h * f[i];
            delta = std::fmax(delta, std::fabs(yn[i] - y[i]));
            scale = std::fmax(scale, std::fabs(yn[i]));
        }
        y = yn;
        if (delta < 1e-15 * scale) break;
    }
    return y;
}

struct RunResult {
    State end;
    double drift = 0.0;
    bool valid = true;
};

RunResult run(const ModelSystem& system, const PhasePoint& start, const FlowSpec& spec,
              long long steps) {
    RunResult r;
    const double h = spec.duration / static_cast<double>(steps);
    const Vec2 f0 = system.moment_map(start);
    State x = start.coords;
    PhasePoint probe = start;
    for (long long s = 0; s < steps; ++s) {
        x = midpoint_step(system, spec, start, x, h);
        probe.coords = x;
        if (!system.chart_valid(probe)) {
            r.valid = false;
            return r;
        }
        const Vec2 f = system.moment_map(probe);
        r.drift = std::fmax(r.drift,
                            std::fmax(std::fabs(f.x - f0.x), std::fabs(f.y - f0.y)));
    }
    r.end = x;
    return r;
}

}  // namespace

PhasePoint flow(const ModelSystem& system, const PhasePoint& start, const FlowSpec& spec,
                FlowDiagnostics* diag) {
    if (!(spec.tolerance > 0.0)) throw invalid_config("flow tolerance must be positive");
    if (!std::isfinite(spec.duration)) throw invalid_config("flow duration must be finite");
    if (!system.chart_valid(start)) throw chart_exit("flow start point is not chart-valid");

    if (spec.duration == 0.0) {
        if (diag) *diag = {};
        return start;
    }

    long long steps =
        std::max<long long>(8, static_cast<long long>(std::ceil(std::fabs(spec.duration) / 0.02)));
    const long long max_steps = 1LL << 24;

    RunResult coarse = run(system, start, spec, steps);
    if (!coarse.valid)
        throw chart_exit("trajectory left the valid chart of " + system.name());
    for (;;) {
        RunResult fine = run(system, start, spec, steps * 2);
        if (!fine.valid)
            throw chart_exit("trajectory left the valid chart of " + system.name());
        double pos_err = 0.0;
        for (int i = 0; i < 4; ++i)
            pos_err = std::fmax(pos_err, std::fabs(fine.end[i] - coarse.end[i]));
        if (fine.drift <= spec.tolerance && pos_err <= spec.tolerance) {
            if (diag) {
                diag->steps = steps * 2;
                diag->moment_drift = fine.drift;
                diag->position_error = pos_err;
            }
            PhasePoint out = start;
            out.coords = fine.end;
            return out;
        }
        steps *= 2;
        coarse = fine;
        if (steps > max_steps)
            throw tolerance_failure("step control cannot reach tolerance " +
                                    std::to_string(spec.tolerance));
    }
}

}  // namespace ffmono
