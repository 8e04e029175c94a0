#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "sscl/harness.hpp"
#include "sscl/reference.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace sscl;

namespace {

GridField noisy_field(const TorusGrid& g, unsigned seed) {
    std::mt19937 gen(seed);
    std::normal_distribution<double> dist(0.0, 0.5);
    GridField u(g);
    for (auto& v : u.values) v = dist(gen);
    return u;
}

}  // namespace

TEST_CASE("modulus table matches the serial reference") {
    for (int dim : {1, 2}) {
        const TorusGrid g = build_grid(dim, dim == 1 ? 128 : 16);
        const GridField u = noisy_field(g, 3);
        const auto fast = modulus_table(u);
        const auto ref = serial::modulus_table(u);
        REQUIRE(fast.size() == ref.size());
        for (std::size_t i = 0; i < fast.size(); ++i)
            CHECK(fast[i] == doctest::Approx(ref[i]).epsilon(1e-13));
    }
}

TEST_CASE("seminorm against the direct pair sum") {
    const TorusGrid g = build_grid(1, 96);
    const GridField u = noisy_field(g, 4);
    CHECK(seminorm_p_sigma(u, 0.4) ==
          doctest::Approx(serial::seminorm_p_sigma(u, 0.4)).epsilon(1e-12));
    const TorusGrid g2 = build_grid(2, 12);
    const GridField u2 = noisy_field(g2, 5);
    CHECK(seminorm_p_sigma(u2, 0.5) ==
          doctest::Approx(serial::seminorm_p_sigma(u2, 0.5)).epsilon(1e-12));
}

TEST_CASE("doubled integral fast path equals the direct quadruple sum") {
    const TorusGrid g = build_grid(1, 24);
    const XiGrid xi = make_xi_grid(-1.6, 1.6, 48);
    const KineticFunction f1 = kinetic_function(noisy_field(g, 6), xi);
    const KineticFunction f2 = kinetic_function(noisy_field(g, 7), xi);
    const DiscreteKernel rho = bake_kernel(g, Mollifier{MollifierKind::triangular, 0.15});
    const PsiPair psi = build_psi(0.3);
    CHECK(doubled_integral(f1, f2, rho, psi) ==
          doctest::Approx(serial::doubled_integral(f1, f2, rho, psi)).epsilon(1e-10));
}

TEST_CASE("I_psi fast path equals the serial reference") {
    const TorusGrid g = build_grid(1, 48);
    NoiseSpec spec;
    spec.kind = NoiseKind::multiplicative;
    spec.K = 3;
    spec.amplitude = 0.3;
    const NoiseModel noise = build_noise_model(spec);
    std::vector<YoungSlice> traj = {
        {0.2, EmpiricalYoungMeasure::from_field(noisy_field(g, 8)),
         EmpiricalYoungMeasure::from_field(noisy_field(g, 9))}};
    const DiscreteKernel rho = bake_kernel(g, Mollifier{MollifierKind::triangular, 0.1});
    const PsiPair psi = build_psi(0.2);
    const EstimateWithBound fast = I_psi_estimate(traj, rho, psi, noise);
    const EstimateWithBound ref = serial::I_psi_estimate(traj, rho, psi, noise);
    CHECK(fast.value == doctest::Approx(ref.value).epsilon(1e-12));
    CHECK(fast.bound == doctest::Approx(ref.bound).epsilon(1e-14));
}

TEST_CASE("ensembles are reproducible across thread counts") {
#ifdef _OPENMP
    const int saved = omp_get_max_threads();
#endif
    ExperimentConfig cfg;
    cfg.n = 48;
    cfg.noise.kind = NoiseKind::additive;
    cfg.noise.K = 3;
    cfg.noise.amplitude = 0.3;
    cfg.eta = 0.05;
    cfg.t_end = 0.1;
    cfg.snapshot_times = {0.05, 0.1};
    const SolverConfig scfg = solver_config(cfg);
    const GridField u0 = initial_field(cfg.init, scfg.grid);

    auto run_with = [&](int threads) {
#ifdef _OPENMP
        omp_set_num_threads(threads);
#else
        (void)threads;
#endif
        return run_ensemble(scfg, u0, 2024, 8);
    };
    const auto r1 = run_with(1);
    const auto r2 = run_with(2);
    const auto r8 = run_with(8);
#ifdef _OPENMP
    omp_set_num_threads(saved);
#endif
    for (int i = 0; i < 8; ++i) {
        // bitwise identical per path
        CHECK(r1[i].snapshots.back().u.values == r2[i].snapshots.back().u.values);
        CHECK(r1[i].snapshots.back().u.values == r8[i].snapshots.back().u.values);
        CHECK(r1[i].ledger.l2sq == r2[i].ledger.l2sq);
    }
    // ordered reduction gives identical aggregates
    auto aggregate = [](const std::vector<PathRun>& runs) {
        StatAccumulator acc;
        for (const auto& r : runs) acc.add(r.ledger.l2sq.back());
        return acc;
    };
    CHECK(aggregate(r1).mean() == doctest::Approx(aggregate(r2).mean()).epsilon(1e-15));
    CHECK(aggregate(r1).mean() == doctest::Approx(aggregate(r8).mean()).epsilon(1e-15));
}
