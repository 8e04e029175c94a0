#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "sscl/doubling.hpp"
#include "sscl/oracles.hpp"
#include "sscl/quadrature.hpp"
#include "sscl/reference.hpp"

using namespace sscl;

namespace {

KineticFunction random_step_kinetic(const TorusGrid& g, const XiGrid& xi,
                                    std::mt19937& gen) {
    std::uniform_real_distribution<double> level(-0.8, 1.2);
    GridField u(g);
    for (auto& v : u.values) v = level(gen);
    return kinetic_function(u, xi);
}

}  // namespace

TEST_CASE("psi pair closed forms") {
    for (PsiBase base : {PsiBase::triangular, PsiBase::quartic}) {
        const PsiPair p = build_psi(0.4, base);
        // unit mass
        const double mass = adaptive_simpson([&](double r) { return p.psi(r); },
                                             -0.4, 0.4, 1e-12);
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(p.psi1(0.4) == doctest::Approx(1.0).epsilon(1e-13));
        CHECK(p.psi1(-0.4) == 0.0);
        // psi2 grows linearly above the support with no offset
        CHECK(p.psi2(0.4) == doctest::Approx(0.4).epsilon(1e-13));
        CHECK(p.psi2(1.3) == doctest::Approx(1.3).epsilon(1e-13));
        CHECK(p.psi2(-0.5) == 0.0);
        // antiderivative consistency by quadrature
        for (double r : {-0.3, -0.1, 0.05, 0.2, 0.35}) {
            const double direct = adaptive_simpson([&](double s) { return p.psi(s); },
                                                   -0.4, r, 1e-12);
            CHECK(p.psi1(r) == doctest::Approx(direct).epsilon(1e-9));
            const double direct2 = adaptive_simpson([&](double s) { return p.psi1(s); },
                                                    -0.4, r, 1e-12);
            CHECK(p.psi2(r) == doctest::Approx(direct2).epsilon(1e-9));
        }
        // C_psi is the actual sup of |r psi_base(r)|
        double sup = 0.0;
        for (double s = -1.0; s <= 1.0; s += 1e-4)
            sup = std::max(sup, std::abs(s * p.psi(s * p.delta) * p.delta));
        CHECK(sup == doctest::Approx(p.C_psi).epsilon(1e-4));
    }
    CHECK(build_psi(1.0).psi2(0.0) == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
    CHECK_THROWS_AS(build_psi(0.0), std::invalid_argument);
}

TEST_CASE("doubled integral equals brute force on small grids") {
    std::mt19937 gen(17);
    for (int n : {4, 8}) {
        const TorusGrid g = build_grid(1, n);
        const XiGrid xi = make_xi_grid(-1.0, 1.4, 12);
        for (int rep = 0; rep < 3; ++rep) {
            const KineticFunction f1 = random_step_kinetic(g, xi, gen);
            const KineticFunction f2 = random_step_kinetic(g, xi, gen);
            for (double eps : {0.05, 0.4}) {
                const DiscreteKernel rho =
                    bake_kernel(g, Mollifier{MollifierKind::triangular, eps});
                for (double delta : {0.15, 0.6}) {
                    const PsiPair psi = build_psi(delta);
                    const double fast = doubled_integral(f1, f2, rho, psi);
                    const double brute = serial::doubled_integral(f1, f2, rho, psi);
                    CHECK(fast == doctest::Approx(brute).epsilon(1e-10));
                }
            }
        }
    }
    // quartic base cross-check
    const TorusGrid g = build_grid(1, 8);
    const XiGrid xi = make_xi_grid(-1.0, 1.4, 10);
    const KineticFunction f1 = random_step_kinetic(g, xi, gen);
    const KineticFunction f2 = random_step_kinetic(g, xi, gen);
    const DiscreteKernel rho = bake_kernel(g, Mollifier{MollifierKind::smooth_bump, 0.3});
    const PsiPair psi = build_psi(0.3, PsiBase::quartic);
    CHECK(doubled_integral(f1, f2, rho, psi) ==
          doctest::Approx(serial::doubled_integral(f1, f2, rho, psi)).epsilon(1e-10));

    // incompatible grids rejected
    const XiGrid other = make_xi_grid(-1.0, 1.4, 14);
    CHECK_THROWS_AS(doubled_integral(f1, random_step_kinetic(g, other, gen), rho, psi),
                    std::invalid_argument);
}

TEST_CASE("indicator case reduces to psi2 of the state difference") {
    const TorusGrid g = build_grid(1, 8);
    // bin edges at multiples of 0.05 so 0.7 and 0.2 sit exactly on edges
    const XiGrid xi = make_xi_grid(-1.0, 2.0, 60);
    const double k = (0.7 - xi.lo) / xi.dxi;
    REQUIRE(std::abs(k - std::round(k)) < 1e-12);

    GridField u1(g, 0.7), u2(g, 0.2);
    const KineticFunction f1 = kinetic_function(u1, xi), f2 = kinetic_function(u2, xi);
    // atom kernel: all kernel mass on the zero offset
    const DiscreteKernel atom =
        bake_kernel(g, Mollifier{MollifierKind::triangular, 0.5 * g.dx});
    const PsiPair psi = build_psi(1.0);
    const double val = doubled_integral(f1, f2, atom, psi);
    CHECK(val == doctest::Approx(psi.psi2(0.5)).epsilon(1e-10));
    CHECK(psi.psi2(0.5) == doctest::Approx(25.0 / 48.0).epsilon(1e-14));

    // coincident data collapse to psi2(0) -> 0 along a delta ladder
    double prev = 1e9;
    for (double delta : {0.8, 0.4, 0.2, 0.1}) {
        const double v = doubled_integral(f1, f1, atom, build_psi(delta));
        CHECK(v == doctest::Approx(delta / 6.0).epsilon(1e-9));
        CHECK(v < prev);
        prev = v;
    }
}

TEST_CASE("doubled integral approaches the contraction functional as delta -> 0") {
    const TorusGrid g = build_grid(1, 32);
    const XiGrid xi = make_xi_grid(-1.5, 1.5, 600);
    GridField u1(g), u2(g);
    for (int i = 0; i < g.n; ++i) {
        u1(i) = 0.5 * std::sin(2.0 * M_PI * i * g.dx) + 0.1;
        u2(i) = 0.3 * std::cos(2.0 * M_PI * i * g.dx);
    }
    const KineticFunction f1 = kinetic_function(u1, xi), f2 = kinetic_function(u2, xi);
    const DiscreteKernel atom =
        bake_kernel(g, Mollifier{MollifierKind::triangular, 0.5 * g.dx});
    const double target = positive_part_l1(u1, u2);
    double prev_err = 1e9;
    for (double delta : {0.4, 0.2, 0.1, 0.05}) {
        const double v = doubled_integral(f1, f2, atom, build_psi(delta));
        const double err = std::abs(v - target);
        CHECK(err <= prev_err + xi.dxi);  // monotone within quadrature error
        prev_err = err;
    }
    CHECK(prev_err < 0.06);

    CHECK(positive_part_l1(u2, u2) == 0.0);
    GridField shifted(g);
    for (int i = 0; i < g.n; ++i) shifted(i) = u2(i) + 0.37;
    CHECK(positive_part_l1(shifted, u2) == doctest::Approx(0.37).epsilon(1e-12));
    CHECK(positive_part_l1(u2, shifted) == 0.0);
}

TEST_CASE("I_psi bound holds across the sweep") {
    const TorusGrid g = build_grid(1, 48);
    GridField u1(g), u2(g);
    for (int i = 0; i < g.n; ++i) {
        u1(i) = 0.6 * std::sin(2.0 * M_PI * i * g.dx);
        u2(i) = 0.4 * std::cos(4.0 * M_PI * i * g.dx) + 0.2;
    }
    std::vector<YoungSlice> traj = {{0.25, EmpiricalYoungMeasure::from_field(u1),
                                     EmpiricalYoungMeasure::from_field(u2)},
                                    {0.25, EmpiricalYoungMeasure::from_field(u2),
                                     EmpiricalYoungMeasure::from_field(u1)}};

    NoiseSpec add;
    add.kind = NoiseKind::additive;
    add.K = 3;
    add.amplitude = 0.4;
    NoiseSpec mult = add;
    mult.kind = NoiseKind::multiplicative;
    mult.shape = NoiseShape::sine;
    for (const NoiseSpec& spec : {add, mult}) {
        const NoiseModel noise = build_noise_model(spec);
        for (double eps : {0.05, 0.1, 0.2}) {
            const DiscreteKernel rho =
                bake_kernel(g, Mollifier{MollifierKind::triangular, eps});
            for (double delta : {0.05, 0.2, 0.8}) {
                const EstimateWithBound est =
                    I_psi_estimate(traj, rho, build_psi(delta), noise);
                CHECK(est.pass);
                CHECK(est.value >= 0.0);
            }
        }
    }

    // zero noise: value 0, bound 0
    const NoiseModel none = build_noise_model(NoiseSpec{});
    const DiscreteKernel rho = bake_kernel(g, Mollifier{MollifierKind::triangular, 0.1});
    const EstimateWithBound z = I_psi_estimate(traj, rho, build_psi(0.1), none);
    CHECK(z.value == 0.0);

    // additive noise, coincident measures, atom kernel: only x=y pairs
    const DiscreteKernel atom =
        bake_kernel(g, Mollifier{MollifierKind::triangular, 0.5 * g.dx});
    std::vector<YoungSlice> same = {{0.5, EmpiricalYoungMeasure::from_field(u1),
                                     EmpiricalYoungMeasure::from_field(u1)}};
    const EstimateWithBound coincident =
        I_psi_estimate(same, atom, build_psi(0.5), build_noise_model(add));
    CHECK(coincident.value == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(coincident.bound > 0.0);
}

TEST_CASE("upsilon quadrature, support and ffp bound") {
    const FluxModel burgers = make_flux("burgers");
    const PsiPair psi = build_psi(0.1);
    // empty region
    CHECK(upsilon(0.3, 0.3 + 0.1, psi, burgers) == 0.0);
    CHECK(upsilon(0.3, 0.9, psi, burgers) == 0.0);

    // against an independent 2D midpoint quadrature
    auto brute = [&](double xi, double zeta) {
        const int N = 2000;
        double acc = 0.0;
        const double rlo = -psi.delta, rhi = std::min(psi.delta, xi - zeta);
        if (rhi <= rlo) return 0.0;
        const double hr = (rhi - rlo) / N;
        for (int i = 0; i < N; ++i) {
            const double r = rlo + (i + 0.5) * hr;
            const double zhi = xi - r;
            if (zhi <= zeta) continue;
            const int M = 400;
            const double hz = (zhi - zeta) / M;
            double inner = 0.0;
            for (int j = 0; j < M; ++j) {
                const double z = zeta + (j + 0.5) * hz;
                inner += burgers.growth_C *
                         (1.0 + std::abs(z + r) + std::abs(z)) * hz;
            }
            acc += psi.psi(r) * std::abs(r) * inner * hr;
        }
        return acc;
    };
    const double ups = upsilon(1.0, 0.0, psi, burgers);
    CHECK(ups == doctest::Approx(brute(1.0, 0.0)).epsilon(1e-5));
    CHECK(upsilon_check(1.0, 0.0, psi, burgers).pass);

    // delta-halving halves the bound, and the value decreases
    const UpsilonCheck full = upsilon_check(1.0, 0.0, build_psi(0.1), burgers);
    const UpsilonCheck half = upsilon_check(1.0, 0.0, build_psi(0.05), burgers);
    CHECK(half.bound == doctest::Approx(0.5 * full.bound).epsilon(1e-12));
    CHECK(half.value < full.value);

    // ffp check across a lattice, both fluxes
    for (const char* name : {"burgers", "cubic", "linear"}) {
        const FluxModel f = make_flux(name);
        for (double delta : {0.05, 0.2, 0.8})
            for (double xi = -3.0; xi <= 3.0; xi += 0.5)
                for (double zeta = -3.0; zeta <= 3.0; zeta += 0.5)
                    CHECK(upsilon_check(xi, zeta, build_psi(delta), f).pass);
    }
}

TEST_CASE("I_rho vanishes in the trivial cases and obeys its bound") {
    const TorusGrid g = build_grid(1, 48);
    const FluxModel burgers = make_flux("burgers");
    const FluxModel linear = make_flux("linear", 1.5);

    GridField c1(g, 0.4), c2(g, 0.4);
    std::vector<YoungSlice> flat = {{0.5, EmpiricalYoungMeasure::from_field(c1),
                                     EmpiricalYoungMeasure::from_field(c2)}};
    const DiscreteKernel rho = bake_kernel(g, Mollifier{MollifierKind::triangular, 0.1});
    const EstimateWithBound on_const =
        I_rho_estimate(flat, rho, build_psi(0.2), burgers);
    CHECK(std::abs(on_const.value) < 1e-14);

    GridField u1(g), u2(g);
    for (int i = 0; i < g.n; ++i) {
        u1(i) = 0.6 * std::sin(2.0 * M_PI * i * g.dx);
        u2(i) = 0.4 * std::cos(4.0 * M_PI * i * g.dx) + 0.2;
    }
    std::vector<YoungSlice> traj = {{0.5, EmpiricalYoungMeasure::from_field(u1),
                                     EmpiricalYoungMeasure::from_field(u2)}};
    // linear flux: a(xi) - a(zeta) = 0 identically (zero to rounding)
    CHECK(std::abs(I_rho_estimate(traj, rho, build_psi(0.2), linear).value) < 1e-15);

    for (double eps : {0.05, 0.1, 0.2})
        for (double delta : {0.05, 0.2, 0.8}) {
            const DiscreteKernel k =
                bake_kernel(g, Mollifier{MollifierKind::triangular, eps});
            const EstimateWithBound est =
                I_rho_estimate(traj, k, build_psi(delta), burgers);
            CHECK(est.pass);
            CHECK(std::abs(est.value) <= est.bound);
        }
}

TEST_CASE("irho inner kernel is dominated by upsilon") {
    const FluxModel burgers = make_flux("burgers");
    const PsiPair psi = build_psi(0.3);
    for (double v = -1.5; v <= 1.5; v += 0.3)
        for (double w = -1.5; w <= 1.5; w += 0.3)
            CHECK(std::abs(irho_inner(v, w, psi, burgers)) <=
                  upsilon(v, w, psi, burgers) + 1e-12);
}

TEST_CASE("combined remainder decreases along the delta = eps^{4/3} ladder") {
    const TorusGrid g = build_grid(1, 128);
    NoiseSpec spec;
    spec.kind = NoiseKind::multiplicative;
    spec.K = 4;
    spec.amplitude = 0.25;
    const NoiseModel noise = build_noise_model(spec);
    const FluxModel burgers = make_flux("burgers");
    double prev = 1e18;
    for (int j = 0; j < 5; ++j) {
        const double eps = 0.4 * std::pow(2.0, -j);
        const double delta = std::pow(eps, 4.0 / 3.0);
        const double r =
            combined_remainder(0.5, eps, delta, g, MollifierKind::triangular,
                               PsiBase::triangular, noise, burgers, 0.25, 0.25);
        CHECK(r < prev);
        prev = r;
    }
}

TEST_CASE("contraction functional over coupled ensembles") {
    const TorusGrid g = build_grid(1, 16);
    std::vector<GridField> e1, e2;
    for (int i = 0; i < 8; ++i) {
        GridField a(g, 0.5 + 0.01 * i), b(g, 0.2);
        e1.push_back(a);
        e2.push_back(b);
    }
    const ContractionValue v = contraction_functional(e1, e2);
    CHECK(v.mean == doctest::Approx(0.3 + 0.01 * 3.5).epsilon(1e-12));
    CHECK(v.stderr_ > 0.0);
    // ordered the other way: exactly zero
    const ContractionValue z = contraction_functional(e2, e2);
    CHECK(z.mean == 0.0);
    CHECK_THROWS_AS(contraction_functional(e1, {}), std::invalid_argument);
}

TEST_CASE("histogram fibers agree with equivalent atoms in the estimators") {
    const TorusGrid g = build_grid(1, 24);
    // histogram with all fiber mass in the bin containing the atom value
    const XiGrid xi = make_xi_grid(-1.0, 1.0, 400);
    GridField u1(g), u2(g);
    for (int i = 0; i < g.n; ++i) {
        u1(i) = xi.center(xi.bin_of(0.4 * std::sin(2.0 * M_PI * i * g.dx)));
        u2(i) = xi.center(xi.bin_of(0.3 * std::cos(2.0 * M_PI * i * g.dx)));
    }
    std::vector<double> fib1(g.size() * xi.bins, 0.0), fib2 = fib1;
    for (std::size_t x = 0; x < g.size(); ++x) {
        fib1[x * xi.bins + xi.bin_of(u1.values[x])] = 1.0;
        fib2[x * xi.bins + xi.bin_of(u2.values[x])] = 1.0;
    }
    std::vector<YoungSlice> atom_traj = {{0.5, EmpiricalYoungMeasure::from_field(u1),
                                          EmpiricalYoungMeasure::from_field(u2)}};
    std::vector<YoungSlice> hist_traj = {
        {0.5, EmpiricalYoungMeasure::from_histogram(g, xi, fib1),
         EmpiricalYoungMeasure::from_histogram(g, xi, fib2)}};

    NoiseSpec spec;
    spec.kind = NoiseKind::multiplicative;
    spec.K = 2;
    spec.amplitude = 0.3;
    const NoiseModel noise = build_noise_model(spec);
    const FluxModel burgers = make_flux("burgers");
    const DiscreteKernel rho = bake_kernel(g, Mollifier{MollifierKind::triangular, 0.15});
    const PsiPair psi = build_psi(0.2);

    const EstimateWithBound pa = I_psi_estimate(atom_traj, rho, psi, noise);
    const EstimateWithBound ph = I_psi_estimate(hist_traj, rho, psi, noise);
    CHECK(pa.value == doctest::Approx(ph.value).epsilon(1e-12));
    const EstimateWithBound ra = I_rho_estimate(atom_traj, rho, psi, burgers);
    const EstimateWithBound rh = I_rho_estimate(hist_traj, rho, psi, burgers);
    CHECK(ra.value == doctest::Approx(rh.value).epsilon(1e-12));
    CHECK(ph.pass);
    CHECK(rh.pass);

    // a genuinely spread fiber still honors the bounds
    std::vector<double> spread(g.size() * xi.bins, 0.0);
    for (std::size_t x = 0; x < g.size(); ++x) {
        spread[x * xi.bins + 100] = 0.5;
        spread[x * xi.bins + 300] = 0.5;
    }
    std::vector<YoungSlice> mixed = {
        {0.5, EmpiricalYoungMeasure::from_histogram(g, xi, spread),
         EmpiricalYoungMeasure::from_field(u2)}};
    CHECK(I_psi_estimate(mixed, rho, psi, noise).pass);
    CHECK(I_rho_estimate(mixed, rho, psi, burgers).pass);
}

TEST_CASE("2D doubled integral agrees with the direct sum") {
    const TorusGrid g = build_grid(2, 6);
    const XiGrid xi = make_xi_grid(-1.0, 1.2, 10);
    std::mt19937 gen(31);
    std::uniform_real_distribution<double> level(-0.7, 1.0);
    GridField u1(g), u2(g);
    for (auto& v : u1.values) v = level(gen);
    for (auto& v : u2.values) v = level(gen);
    const KineticFunction f1 = kinetic_function(u1, xi), f2 = kinetic_function(u2, xi);
    for (double eps : {0.2, 0.45}) {
        const DiscreteKernel rho = bake_kernel(g, Mollifier{MollifierKind::triangular, eps});
        const PsiPair psi = build_psi(0.3);
        CHECK(doubled_integral(f1, f2, rho, psi) ==
              doctest::Approx(serial::doubled_integral(f1, f2, rho, psi)).epsilon(1e-10));
    }
}
