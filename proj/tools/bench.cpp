// Timing comparison of the OpenMP kernels against their serial references.
#include <cstdio>
#include <random>

#include "sscl/doubling.hpp"
#include "sscl/grid.hpp"
#include "sscl/harness.hpp"
#include "sscl/reference.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace sscl;

namespace {

double now() {
#ifdef _OPENMP
    return omp_get_wtime();
#else
    return static_cast<double>(clock()) / CLOCKS_PER_SEC;
#endif
}

GridField noisy_field(const TorusGrid& g, unsigned seed) {
    std::mt19937 gen(seed);
    std::normal_distribution<double> dist(0.0, 0.5);
    GridField u(g);
    for (auto& v : u.values) v = dist(gen);
    return u;
}

template <typename F>
double timed(const char* label, double reference, F&& body) {
    const double t0 = now();
    const double value = body();
    const double dt = now() - t0;
    std::printf("%-34s %10.4f s   value %.6e", label, dt, value);
    if (reference > 0.0) std::printf("   speedup %.2fx", reference / dt);
    std::printf("\n");
    return dt;
}

}  // namespace

int main() {
#ifdef _OPENMP
    std::printf("threads: %d\n", omp_get_max_threads());
#else
    std::printf("threads: 1 (no OpenMP)\n");
#endif

    {
        const TorusGrid g = build_grid(1, 2048);
        const GridField u = noisy_field(g, 5);
        const double tser = timed("modulus_table serial n=2048", 0.0, [&] {
            const auto t = serial::modulus_table(u);
            return t[t.size() / 2];
        });
        timed("modulus_table omp    n=2048", tser, [&] {
            const auto t = modulus_table(u);
            return t[t.size() / 2];
        });
    }

    {
        const TorusGrid g = build_grid(1, 96);
        const GridField a = noisy_field(g, 7), b = noisy_field(g, 8);
        const XiGrid xi = xi_grid_for_range(-2.0, 2.0, 96);
        const KineticFunction f1 = kinetic_function(a, xi), f2 = kinetic_function(b, xi);
        const DiscreteKernel rho = bake_kernel(g, Mollifier{MollifierKind::triangular, 0.1});
        const PsiPair psi = build_psi(0.25);
        const double tser = timed("doubled_integral serial n=96", 0.0, [&] {
            return serial::doubled_integral(f1, f2, rho, psi);
        });
        timed("doubled_integral omp    n=96", tser, [&] {
            return doubled_integral(f1, f2, rho, psi);
        });
    }

    {
        const TorusGrid g = build_grid(1, 256);
        NoiseSpec spec;
        spec.kind = NoiseKind::multiplicative;
        spec.K = 4;
        spec.amplitude = 0.25;
        const NoiseModel noise = build_noise_model(spec);
        const DiscreteKernel rho = bake_kernel(g, Mollifier{MollifierKind::triangular, 0.1});
        const PsiPair psi = build_psi(0.1);
        std::vector<YoungSlice> traj;
        for (int s = 0; s < 4; ++s)
            traj.push_back({0.125, EmpiricalYoungMeasure::from_field(noisy_field(g, 10 + s)),
                            EmpiricalYoungMeasure::from_field(noisy_field(g, 20 + s))});
        const double tser = timed("I_psi serial n=256", 0.0, [&] {
            return serial::I_psi_estimate(traj, rho, psi, noise).value;
        });
        timed("I_psi omp    n=256", tser, [&] {
            return I_psi_estimate(traj, rho, psi, noise).value;
        });
    }

    {
        // ensemble throughput: same paths on 1 thread vs all threads
        ExperimentConfig cfg;
        cfg.n = 128;
        cfg.noise.kind = NoiseKind::additive;
        cfg.noise.K = 4;
        cfg.noise.amplitude = 0.25;
        cfg.eta = 0.125;
        cfg.t_end = 0.1;
        cfg.snapshot_times = {0.0, 0.1};
        cfg.accumulate_measure = false;
        const SolverConfig scfg = solver_config(cfg);
        const GridField u0 = initial_field(cfg.init, scfg.grid);
#ifdef _OPENMP
        const int max_threads = omp_get_max_threads();
        omp_set_num_threads(1);
#endif
        const double tser = timed("ensemble 16 paths, 1 thread", 0.0, [&] {
            const auto runs = run_ensemble(scfg, u0, 99, 16);
            return runs.back().ledger.l2sq.back();
        });
#ifdef _OPENMP
        omp_set_num_threads(max_threads);
#endif
        timed("ensemble 16 paths, all threads", tser, [&] {
            const auto runs = run_ensemble(scfg, u0, 99, 16);
            return runs.back().ledger.l2sq.back();
        });
    }
    return 0;
}
