// Benchmark of the OpenMP kernels against their serial reference paths:
// period-lattice batches, DH profile quadrature, DH Monte Carlo, and the
// Bohr-Sommerfeld action grid.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>

#include "ffmono/bs.hpp"
#include "ffmono/dh.hpp"
#include "ffmono/lattice.hpp"
#include "ffmono/models.hpp"
#include "ffmono/monodromy.hpp"

using namespace ffmono;

namespace {

template <typename F>
double timed(F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(t1 - t0).count();
}

void report(const char* name, double t_serial, double t_parallel, bool equal) {
    std::printf("%-22s serial %8.3f s   parallel %8.3f s   speedup %5.2fx   %s\n", name,
                t_serial, t_parallel, t_serial / t_parallel,
                equal ? "results identical" : "RESULTS DIFFER");
}

}  // namespace

int main() {
    const auto pend = pendulum_system(PendulumPotential({0.0, 1.0}));

    {
        std::vector<Vec2> values;
        for (int rep = 0; rep < 4; ++rep) {
            const auto loop = ValueLoop::circle({1.0, 0.0}, 0.25 + 0.02 * rep, 128);
            values.insert(values.end(), loop.samples.begin(), loop.samples.end());
        }
        LatticeOptions opts;
        std::vector<PeriodLatticeBasis> a, b;
        const double ts = timed([&] { a = period_lattice_batch(*pend, values, opts, Exec::serial); });
        const double tp = timed([&] { b = period_lattice_batch(*pend, values, opts, Exec::parallel); });
        bool equal = a.size() == b.size();
        for (std::size_t i = 0; equal && i < a.size(); ++i)
            equal = a[i].generator_long.x == b[i].generator_long.x &&
                    a[i].generator_long.y == b[i].generator_long.y;
        report("period-lattice batch", ts, tp, equal);
    }

    {
        DHParams p;
        p.energy_cap = 1.5;
        p.c_max = 0.1;
        p.samples = 81;
        DHProfile a, b;
        p.exec = Exec::serial;
        const double ts = timed([&] { a = dh_profile(*pend, p); });
        p.exec = Exec::parallel;
        const double tp = timed([&] { b = dh_profile(*pend, p); });
        bool equal = true;
        for (std::size_t i = 0; i < a.samples.size(); ++i)
            equal = equal && a.samples[i].v == b.samples[i].v;
        report("dh quadrature profile", ts, tp, equal);
    }

    {
        DHParams p;
        p.energy_cap = 1.5;
        p.c_max = 0.1;
        p.samples = 41;
        p.mc_samples = 4000000;
        DHProfile a, b;
        p.exec = Exec::serial;
        const double ts = timed([&] { a = dh_profile(*pend, p); });
        p.exec = Exec::parallel;
        const double tp = timed([&] { b = dh_profile(*pend, p); });
        bool equal = true;
        for (std::size_t i = 0; i < a.samples.size(); ++i)
            equal = equal && a.samples[i].v_mc == b.samples[i].v_mc;
        report("dh monte carlo", ts, tp, equal);
    }

    {
        BSGrid g;
        g.f1_min = 0.55;
        g.f1_max = 1.45;
        g.f2_min = -0.4;
        g.f2_max = 0.4;
        g.exclusion = 0.07;
        g.f1_nodes = 96;
        BSLattice a, b;
        const double ts = timed([&] { a = bs_lattice(*pend, 0.025, g, 1e-9, Exec::serial); });
        const double tp = timed([&] { b = bs_lattice(*pend, 0.025, g, 1e-9, Exec::parallel); });
        bool equal = a.base_values.size() == b.base_values.size();
        for (std::size_t i = 0; equal && i < a.base_values.size(); ++i)
            equal = a.base_values[i].x == b.base_values[i].x;
        report("bs action grid", ts, tp, equal);
    }

    return 0;
}
