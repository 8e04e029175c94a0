#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <fstream>
#include <random>

#include "json.hpp"
#include "sscl/grid.hpp"
#include "sscl/quadrature.hpp"

using namespace sscl;

namespace {

GridField sampled(const TorusGrid& g, double (*fn)(double)) {
    GridField f(g);
    for (int i = 0; i < g.n; ++i) f(i) = fn(i * g.dx);
    return f;
}

// Half-torus indicator 1_{[0,1/2)}.
GridField half_indicator(const TorusGrid& g) {
    GridField f(g);
    for (int i = 0; i < g.n; ++i) f(i) = (i * g.dx < 0.5) ? 1.0 : 0.0;
    return f;
}

// Random trigonometric polynomial with a handful of modes.
GridField random_trig(const TorusGrid& g, std::mt19937& gen) {
    std::uniform_real_distribution<double> amp(-1.0, 1.0);
    GridField f(g);
    for (int k = 1; k <= 4; ++k) {
        const double ac = amp(gen), as = amp(gen);
        for (int i = 0; i < g.n; ++i) {
            const double x = i * g.dx;
            f(i) += ac * std::cos(2 * M_PI * k * x) + as * std::sin(2 * M_PI * k * x);
        }
    }
    return f;
}

}  // namespace

TEST_CASE("grid construction and wrapping") {
    const TorusGrid g = build_grid(1, 8);
    CHECK(g.dx == doctest::Approx(0.125).epsilon(1e-14));
    CHECK(g.wrap(-1) == 7);
    CHECK(g.wrap(8) == 0);
    const TorusGrid g2 = build_grid(2, 16);
    CHECK(g2.diameter == doctest::Approx(std::sqrt(2.0)));
    CHECK_THROWS_AS(build_grid(3, 8), std::invalid_argument);
    CHECK_THROWS_AS(build_grid(1, 3), std::invalid_argument);
}

TEST_CASE("gradient annihilates constants and matches Taylor bound") {
    const TorusGrid g = build_grid(1, 64);
    GridField c(g, 3.7);
    auto gc = gradient(c);
    for (int i = 0; i < g.n; ++i) CHECK(gc[0](i) == 0.0);

    const GridField s = sampled(g, [](double x) { return std::sin(2 * M_PI * x); });
    auto gs = gradient(s);
    double max_err = 0.0;
    for (int i = 0; i < g.n; ++i)
        max_err = std::max(max_err,
                           std::abs(gs[0](i) - 2 * M_PI * std::cos(2 * M_PI * i * g.dx)));
    CHECK(max_err < std::pow(2 * M_PI, 3) * g.dx * g.dx / 6.0);
}

TEST_CASE("gradient discrete Fourier symbol on n=8") {
    const TorusGrid g = build_grid(1, 8);
    const GridField c = sampled(g, [](double x) { return std::cos(2 * M_PI * x); });
    auto gc = gradient(c);
    const double symbol = std::sin(2 * M_PI * g.dx) / g.dx;  // -symbol * sin(2 pi x)
    for (int i = 0; i < g.n; ++i)
        CHECK(gc[0](i) ==
              doctest::Approx(-symbol * std::sin(2 * M_PI * i * g.dx)).epsilon(1e-12));
}

TEST_CASE("laplacian eigenrelation and telescoping") {
    const TorusGrid g = build_grid(1, 32);
    const GridField s = sampled(g, [](double x) { return std::sin(2 * M_PI * x); });
    const GridField L = laplacian(s);
    const double lam = -(2.0 - 2.0 * std::cos(2 * M_PI * g.dx)) / (g.dx * g.dx);
    for (int i = 0; i < g.n; ++i)
        CHECK(L(i) == doctest::Approx(lam * s(i)).epsilon(1e-11));

    double sum = 0.0;
    for (int i = 0; i < g.n; ++i) sum += L(i);
    CHECK(std::abs(sum) < 1e-9);  // telescoping, values are O(1/dx^2)

    GridField c(g, -2.0);
    const GridField Lc = laplacian(c);
    for (int i = 0; i < g.n; ++i) CHECK(Lc(i) == 0.0);
}

TEST_CASE("lp_norm basics and triangle inequality") {
    const TorusGrid g = build_grid(1, 64);
    CHECK(lp_norm(GridField(g, -1.5), 3.0) == doctest::Approx(1.5).epsilon(1e-13));
    const GridField s = sampled(g, [](double x) { return std::sin(2 * M_PI * x); });
    CHECK(lp_norm(s, 2.0) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));

    std::mt19937 gen(7);
    for (int rep = 0; rep < 5; ++rep) {
        const GridField a = random_trig(g, gen), b = random_trig(g, gen);
        GridField ab(g);
        for (int i = 0; i < g.n; ++i) ab(i) = a(i) + b(i);
        CHECK(lp_norm(ab, 2.0) <= lp_norm(a, 2.0) + lp_norm(b, 2.0) + 1e-12);
    }
    CHECK_THROWS_AS(lp_norm(s, 0.5), std::invalid_argument);
}

TEST_CASE("p_sigma of half-torus indicator matches quadrature oracle") {
    const TorusGrid g = build_grid(1, 256);
    const GridField u = half_indicator(g);
    const double sigma = 0.5;

    // Oracle: reduce the double integral over {x<1/2<y} to the offset
    // variable with exact inner antiderivatives, then integrate adaptively.
    // p = 2 * int L(s) d(s)^{-(1+sigma)} ds with L(s)=d(s)=min(s,1-s); the
    // midpoint sum excludes the diagonal cell, i.e. offsets below dx/2.
    auto integrand = [&](double s) {
        const double d = std::min(s, 1.0 - s);
        return 2.0 * std::pow(d, -sigma);
    };
    const double cut = 0.5 * g.dx;
    const double oracle = adaptive_simpson(integrand, cut, 1.0 - cut, 1e-9);
    const double closed =
        4.0 * (std::pow(0.5, 1.0 - sigma) - std::pow(cut, 1.0 - sigma)) / (1.0 - sigma);
    CHECK(oracle == doctest::Approx(closed).epsilon(1e-6));

    const double discrete = seminorm_p_sigma(u, sigma);
    CHECK(discrete == doctest::Approx(oracle).epsilon(0.02));

    CHECK(seminorm_p_sigma(GridField(g, 4.2), sigma) == 0.0);
    CHECK_THROWS_AS(seminorm_p_sigma(u, 1.0), std::invalid_argument);
}

TEST_CASE("p_sigma absolute homogeneity") {
    const TorusGrid g = build_grid(1, 64);
    std::mt19937 gen(3);
    const GridField u = random_trig(g, gen);
    GridField cu(g);
    for (int i = 0; i < g.n; ++i) cu(i) = -2.5 * u(i);
    CHECK(seminorm_p_sigma(cu, 0.4) ==
          doctest::Approx(2.5 * seminorm_p_sigma(u, 0.4)).epsilon(1e-12));
}

TEST_CASE("mollifier kernels have unit discrete mass") {
    const TorusGrid g = build_grid(1, 64);
    for (MollifierKind kind : {MollifierKind::triangular, MollifierKind::smooth_bump})
        for (double eps : {0.01, 0.1, 0.5, 2.0}) {
            const DiscreteKernel k = bake_kernel(g, Mollifier{kind, eps});
            double mass = 0.0;
            for (double r : k.rho) mass += r * g.dx;
            CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
        }
    const TorusGrid g2 = build_grid(2, 16);
    const DiscreteKernel k2 = bake_kernel(g2, Mollifier{MollifierKind::triangular, 0.3});
    double mass = 0.0;
    for (double r : k2.rho) mass += r * g2.dx * g2.dx;
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("p_sigma_rho ladder against dense epsilon sweep") {
    const TorusGrid g = build_grid(1, 256);
    const GridField u = half_indicator(g);
    const double sigma = 0.5;

    const auto table = modulus_table(u);
    const auto ladder = epsilon_ladder(g);
    const double on_ladder =
        seminorm_p_sigma_rho(table, g, sigma, MollifierKind::triangular, ladder).value;

    std::vector<double> dense;
    const double top = 2.0 * g.diameter;
    for (int j = 0; j <= 400; ++j) dense.push_back(top * std::pow(2.0, -j / 40.0));
    const double on_dense =
        seminorm_p_sigma_rho(table, g, sigma, MollifierKind::triangular, dense).value;

    CHECK(on_ladder == doctest::Approx(on_dense).epsilon(0.01));
    CHECK(seminorm_p_sigma_rho(GridField(g, 1.0), sigma, MollifierKind::triangular).value ==
          0.0);
}

TEST_CASE("seminorm comparison inequalities on the corpus") {
    // Comparison constants per mollifier kind; fitted once on this corpus
    // (20 random trig polynomials + 5 indicators) and frozen in the fixtures.
    struct Frozen {
        MollifierKind kind;
        double C1;  // p^sigma_rho <= C1 p^sigma
        double C2;  // p^s <= C2/(sigma-s) p^sigma_rho
    };
    std::ifstream fin(std::string(SSCL_FIXTURE_DIR) + "/frozen_constants.json");
    nlohmann::json fx;
    fin >> fx;
    const auto& lc = fx["lemma_comparison"];
    const Frozen frozen[] = {
        {MollifierKind::triangular, lc["triangular"]["C1"].get<double>(),
         lc["triangular"]["C2"].get<double>()},
        {MollifierKind::smooth_bump, lc["smooth_bump"]["C1"].get<double>(),
         lc["smooth_bump"]["C2"].get<double>()},
    };
    const TorusGrid g = build_grid(1, 128);
    std::mt19937 gen(11);
    std::vector<GridField> corpus;
    for (int i = 0; i < 20; ++i) corpus.push_back(random_trig(g, gen));
    for (int i = 0; i < 5; ++i) {
        GridField ind(g);
        const double a = 0.1 + 0.15 * i;
        for (int j = 0; j < g.n; ++j) ind(j) = (std::fmod(j * g.dx + a, 1.0) < 0.5) ? 1.0 : 0.0;
        corpus.push_back(ind);
    }
    const double sigma = 0.5, s = 0.25;
    for (const Frozen& fr : frozen) {
        for (const GridField& u : corpus) {
            const auto table = modulus_table(u);
            const double ps = seminorm_p_sigma(table, g, sigma);
            const double psr =
                seminorm_p_sigma_rho(table, g, sigma, fr.kind, epsilon_ladder(g)).value;
            const double plo = seminorm_p_sigma(table, g, s);
            if (ps == 0.0) continue;
            CHECK(psr <= fr.C1 * ps);
            CHECK(plo <= fr.C2 / (sigma - s) * psr);
        }
    }
}
