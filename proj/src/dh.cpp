#include "ffmono/dh.hpp"

#include <cmath>
#include <random>

#include "ffmono/errors.hpp"
#include "ffmono/quadrature.hpp"
#include "ffmono/turning.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ffmono {

namespace {

// ---------------------------------------------------------------------------
// Quadrature estimator.
//
// Pendulum: at momentum c the reduced phase space is (z, p_z) with
// H_c = (1/2)(1-z^2) p_z^2 + c^2/(2(1-z^2)) + V(z). The p_z-extent of
// {H_c <= h} at fixed z is 2 sqrt(P_{h,c}(z)) / (1-z^2) with the radial
// polynomial P, so area{H_c <= h} = oint p_z dz summed over the admissible
// intervals, and the window volume is V(c) = area(E) - area(floor).

double pendulum_sublevel_area(const PendulumModel& model, double h, double c,
                              double quad_tol, double* err) {
    const Polynomial P = model.radial_poly(h, c);
    std::vector<TurningInterval> intervals;
    try {
        intervals = oscillation_intervals(P);
    } catch (const no_oscillation&) {
        return 0.0;
    }
    double area = 0.0;
    for (const auto& iv : intervals) {
        const Polynomial q = P.deflate(iv.lo).deflate(iv.hi);
        auto qp = [&q](double z) { return std::fmax(-q(z), 0.0); };
        const QuadratureResult res = weighted_endpoint_quadrature(
            [&qp](double z, double w) { return w * w * std::sqrt(qp(z)) / (1.0 - z * z); },
            iv.lo, iv.hi, quad_tol);
        area += 2.0 * res.value;
        if (err) *err += 2.0 * res.error_estimate;
    }
    return area;
}

double quad_volume(const ModelSystem& system, const DHParams& p, double floor_e, double c,
                   double* err) {
    if (const auto* pend = dynamic_cast<const PendulumModel*>(&system)) {
        double e = 0.0;
        const double a_top = pendulum_sublevel_area(*pend, p.energy_cap, c, p.quad_tol, &e);
        const double a_bot = pendulum_sublevel_area(*pend, floor_e, c, p.quad_tol, &e);
        if (err) *err = e;
        return a_top - a_bot;
    }
    if (dynamic_cast<const LinearFocusModel*>(&system)) {
        // {f2 = c} cut to the ball |point|^2 <= cutoff, reduced by the circle
        // action. In the invariant coordinates s = |w+|^2/2, t = |w-|^2/2
        // (f2 = s - t, |point|^2 = 2(s + t)) the reduced area is
        // 2 pi (t_max - t_min) = pi (cutoff/2 - |c|).
        if (err) *err = 0.0;
        const double v = pi * (0.5 * p.energy_cap - std::fabs(c));
        if (v <= 0.0)
            throw cutoff_too_low("linear model: momentum range reaches the ball boundary");
        return v;
    }
    throw invalid_config("dh_profile: unsupported model " + system.name());
}

// ---------------------------------------------------------------------------
// Monte Carlo estimator: uniform sampling of the localized region, histogram
// of the momentum pushforward. Batches draw independent generators seeded
// from (seed, batch index), so results are identical for any thread count.

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

struct McResult {
    std::vector<double> value, stderr_;
};

McResult mc_histogram(const ModelSystem& system, const DHParams& p, double floor_e,
                      const std::vector<double>& centers) {
    const int nbins = static_cast<int>(centers.size());
    const double dc = centers.size() > 1 ? centers[1] - centers[0] : 1.0;
    const double c_lo = centers.front() - 0.5 * dc;

    const auto* pend = dynamic_cast<const PendulumModel*>(&system);
    const auto* lin = dynamic_cast<const LinearFocusModel*>(&system);
    if (!pend && !lin) throw invalid_config("dh MC: unsupported model " + system.name());

    double box_volume = 0.0;
    double pmax = 0.0, radius = 0.0;
    if (pend) {
        double vmin = 1e300;
        for (int i = 0; i <= 200; ++i) vmin = std::fmin(vmin, pend->potential()(-1.0 + i / 100.0));
        pmax = std::sqrt(2.0 * std::fmax(p.energy_cap - vmin, 0.0));
        // sphere area x momentum disk
        box_volume = (2.0 * two_pi) * (pi * pmax * pmax);
    } else {
        radius = std::sqrt(p.energy_cap);
        box_volume = 0.5 * pi * pi * radius * radius * radius * radius;
    }

    const long long batch_size = 1 << 16;
    const long long nbatch = (p.mc_samples + batch_size - 1) / batch_size;
    std::vector<std::vector<long long>> counts(nbatch);

    const auto run_batch = [&](long long b) {
        std::mt19937_64 rng(splitmix64(p.seed ^ static_cast<std::uint64_t>(b + 1)));
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        std::normal_distribution<double> gauss(0.0, 1.0);
        std::vector<long long> local(nbins, 0);
        const long long n = std::min(batch_size, p.mc_samples - b * batch_size);
        for (long long i = 0; i < n; ++i) {
            double hval = 0.0, jval = 0.0;
            if (pend) {
                // Uniform point on the sphere (z uniform, azimuth immaterial:
                // both H and J are rotation-invariant in the frame below) and
                // a uniform momentum in the tangent disk of radius pmax.
                // J = a sqrt(1 - z^2) with a the azimuthal momentum component.
                const double z = 1.0 - 2.0 * unif(rng);
                double a, bb;
                do {
                    a = 2.0 * unif(rng) - 1.0;
                    bb = 2.0 * unif(rng) - 1.0;
                } while (a * a + bb * bb > 1.0);
                a *= pmax;
                bb *= pmax;
                hval = 0.5 * (a * a + bb * bb) + pend->potential()(z);
                jval = a * std::sqrt(std::fmax(1.0 - z * z, 0.0));
                if (hval < floor_e || hval > p.energy_cap) continue;
            } else {
                double g[4];
                for (double& gi : g) gi = gauss(rng);
                const double nrm = std::sqrt(g[0] * g[0] + g[1] * g[1] + g[2] * g[2] + g[3] * g[3]);
                if (nrm == 0.0) continue;
                const double r = radius * std::pow(unif(rng), 0.25);
                for (double& gi : g) gi *= r / nrm;
                jval = g[0] * g[3] - g[2] * g[1];  // x1 y2 - x2 y1
            }
            const int bin = static_cast<int>(std::floor((jval - c_lo) / dc));
            if (bin >= 0 && bin < nbins) ++local[bin];
        }
        counts[b] = std::move(local);
    };

    if (p.exec == Exec::parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
        for (long long b = 0; b < nbatch; ++b) run_batch(b);
    } else {
        for (long long b = 0; b < nbatch; ++b) run_batch(b);
    }

    std::vector<long long> total(nbins, 0);
    for (const auto& c : counts)
        for (int i = 0; i < nbins; ++i) total[i] += c[i];

    McResult out;
    out.value.resize(nbins);
    out.stderr_.resize(nbins);
    const double n = static_cast<double>(p.mc_samples);
    for (int i = 0; i < nbins; ++i) {
        const double frac = total[i] / n;
        out.value[i] = box_volume * frac / (dc * two_pi);
        out.stderr_[i] = box_volume * std::sqrt(std::fmax(frac * (1.0 - frac), 0.0) / n) /
                         (dc * two_pi);
    }
    return out;
}

double fit_slope(const std::vector<DHSample>& samples, bool positive_side, double c_max) {
    // Least-squares line over the outer 40% of the half-range.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (const auto& s : samples) {
        const double c = positive_side ? s.c : -s.c;
        if (c < 0.6 * c_max - 1e-15) continue;
        ++n;
        sx += s.c;
        sy += s.v;
        sxx += s.c * s.c;
        sxy += s.c * s.v;
    }
    if (n < 2) throw invalid_config("dh_profile: too few samples for the slope fit");
    const double denom = n * sxx - sx * sx;
    return (n * sxy - sx * sy) / denom;
}

}  // namespace

double default_energy_floor(const ModelSystem& system) {
    if (const auto* pend = dynamic_cast<const PendulumModel*>(&system)) {
        // The window floor sits between the energy of the fiber under study
        // and the highest fixed component below it, so exactly the fixed
        // points of that fiber stay inside the window.
        const double north = pend->pole_energy(1), south = pend->pole_energy(-1);
        const double fiber = std::fmax(north, south);
        double below = 1e300;
        for (int sigma : {1, -1})
            if (pend->pole_energy(sigma) < fiber - 1e-12)
                below = (below == 1e300) ? pend->pole_energy(sigma)
                                         : std::fmax(below, pend->pole_energy(sigma));
        if (below == 1e300) {
            double vmin = 1e300;
            for (int i = 0; i <= 200; ++i)
                vmin = std::fmin(vmin, pend->potential()(-1.0 + i / 100.0));
            below = vmin;
        }
        return 0.5 * (below + fiber);
    }
    return 0.0;
}

DHProfile dh_profile(const ModelSystem& system, const DHParams& params) {
    if (params.samples < 5 || params.samples % 2 == 0)
        throw invalid_config("dh_profile: samples must be odd and >= 5");
    if (!(params.c_max > 0.0)) throw invalid_config("dh_profile: c_max must be positive");

    const double floor_e = params.energy_floor.value_or(default_energy_floor(system));
    if (dynamic_cast<const PendulumModel*>(&system) && !(params.energy_cap > floor_e))
        throw cutoff_too_low("energy cap does not exceed the window floor");
    if (dynamic_cast<const LinearFocusModel*>(&system) &&
        !(0.5 * params.energy_cap > params.c_max))
        throw cutoff_too_low("linear model: momentum range reaches the ball boundary");

    DHProfile profile;
    profile.energy_cap = params.energy_cap;
    profile.energy_floor = floor_e;
    profile.seed = params.seed;
    profile.mc_samples = params.mc_samples;

    std::vector<double> centers(params.samples);
    for (int i = 0; i < params.samples; ++i)
        centers[i] = -params.c_max + 2.0 * params.c_max * i / (params.samples - 1);

    profile.samples.resize(params.samples);
    std::string failure;
    const auto eval_one = [&](int i) {
        try {
            double err = 0.0;
            const double v = quad_volume(system, params, floor_e, centers[i], &err);
            profile.samples[i] = {centers[i], v, err, 0.0, 0.0};
        } catch (const std::exception& e) {
#ifdef _OPENMP
#pragma omp critical
#endif
            if (failure.empty()) failure = e.what();
        }
    };
    if (params.exec == Exec::parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
        for (int i = 0; i < params.samples; ++i) eval_one(i);
    } else {
        for (int i = 0; i < params.samples; ++i) eval_one(i);
    }
    if (!failure.empty()) throw quadrature_failure("dh_profile: " + failure);

    const double v0 = profile.samples[params.samples / 2].v;
    if (v0 <= 0.0) throw cutoff_too_low("localized region is empty at c = 0");

    if (params.mc_samples > 0) {
        const McResult mc = mc_histogram(system, params, floor_e, centers);
        for (int i = 0; i < params.samples; ++i) {
            profile.samples[i].v_mc = mc.value[i];
            profile.samples[i].v_mc_err = mc.stderr_[i];
        }
    }

    profile.slope_pos = fit_slope(profile.samples, true, params.c_max);
    profile.slope_neg = fit_slope(profile.samples, false, params.c_max);

    // Slope jump from the symmetrized defect g(c) = V(c)+V(-c)-2V(0), which
    // is J c + B c^2 with J the jump: the odd smooth terms cancel, so the fit
    // is unbiased where the one-sided slopes still carry the O(c) curvature
    // of the localization window.
    {
        double s11 = 0, s12 = 0, s22 = 0, b1 = 0, b2 = 0;
        const int n = params.samples;
        const double v0 = profile.samples[n / 2].v;
        for (int i = n / 2 + 1; i < n; ++i) {
            const double c = profile.samples[i].c;
            const double gsym = profile.samples[i].v + profile.samples[n - 1 - i].v - 2.0 * v0;
            s11 += c * c;
            s12 += c * c * c;
            s22 += c * c * c * c;
            b1 += c * gsym;
            b2 += c * c * gsym;
        }
        const double det = s11 * s22 - s12 * s12;
        profile.jump = (s22 * b1 - s12 * b2) / det;
    }
    profile.k_fitted = -profile.jump / profile.normalization;
    return profile;
}

DHCheckReport dh_check(const DHProfile& profile, long long k) {
    DHCheckReport report;
    const int n = static_cast<int>(profile.samples.size());
    const double v0 = profile.samples[n / 2].v;
    for (int i = n / 2 + 1; i < n; ++i) {
        const double c = profile.samples[i].c;
        const double vp = profile.samples[i].v;
        const double vm = profile.samples[n - 1 - i].v;
        const double r = vp + vm - 2.0 * v0 + static_cast<double>(k) * profile.normalization * c;
        report.residual_max = std::fmax(report.residual_max, std::fabs(r));
    }
    report.jump_vs_k = std::fabs(profile.k_fitted - static_cast<double>(k));
    return report;
}

}  // namespace ffmono
