#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "sscl/flux.hpp"

using namespace sscl;

namespace {

std::vector<double> xi_lattice(double lo, double hi, int n) {
    std::vector<double> v;
    for (int i = 0; i < n; ++i) v.push_back(lo + (hi - lo) * i / (n - 1));
    return v;
}

}  // namespace

TEST_CASE("catalog flux evaluation") {
    const FluxModel burgers = make_flux("burgers");
    CHECK(burgers.A(2.0) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(burgers.a(3.0) == doctest::Approx(3.0).epsilon(1e-14));
    const FluxModel lin = make_flux("linear", 1.5);
    CHECK(lin.a(-7.0) == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(eval_A(burgers, 2.0)[0] == doctest::Approx(2.0));
    CHECK(eval_a(lin, 0.0)[0] == doctest::Approx(1.5));
    CHECK_THROWS_AS(make_flux("quartic"), std::invalid_argument);
}

TEST_CASE("a is the exact derivative of A") {
    const double h = 1e-4;
    for (const char* name : {"burgers", "linear", "cubic"}) {
        const FluxModel f = make_flux(name, 1.5);
        for (double xi : xi_lattice(-3.0, 3.0, 61)) {
            const double fd = (f.A(xi + h) - f.A(xi - h)) / (2 * h);
            const double scale = std::max(1.0, std::abs(f.a(xi)));
            CHECK(std::abs(fd - f.a(xi)) / scale < 1e-6);
        }
    }
}

TEST_CASE("check_gamma passes for the catalog at declared constants") {
    const auto lattice = xi_lattice(-4.0, 4.0, 81);
    for (const char* name : {"burgers", "linear", "cubic"}) {
        const GammaReport rep = check_gamma(make_flux(name, 2.0), lattice);
        CHECK(rep.pass);
        CHECK(rep.max_ratio <= 1.0);
    }
    // Burgers with C=1, p=2 has the closed-form ratio 1/(1+|xi|+|zeta|).
    const FluxModel b = make_flux("burgers");
    const GammaReport rep = check_gamma(b, {1.0, -2.0});
    CHECK(rep.max_ratio == doctest::Approx(1.0 / (1.0 + 1.0 + 2.0)).epsilon(1e-12));
}

TEST_CASE("entropy flux quadrature against closed forms") {
    const FluxModel b = make_flux("burgers");
    auto eta_sq = [](double u) { return 2.0 * u; };  // eta(u) = u^2
    CHECK(entropy_flux_scalar(b, eta_sq, 1.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-10));
    CHECK(entropy_flux_scalar(b, eta_sq, -1.5) ==
          doctest::Approx(2.0 * std::pow(-1.5, 3) / 3.0).epsilon(1e-10));
    auto ones = [](double) { return 1.0; };
    for (double u : {-2.0, 0.3, 1.7})
        CHECK(entropy_flux_scalar(b, ones, u) == doctest::Approx(b.A(u) - b.A(0)).epsilon(1e-10));
    CHECK(entropy_flux_scalar(b, eta_sq, 0.0) == 0.0);

    const FluxModel c = make_flux("cubic");
    // q(u) = int_0^u s^2 * 2s ds = u^4 / 2
    CHECK(entropy_flux_scalar(c, eta_sq, 1.3) ==
          doctest::Approx(std::pow(1.3, 4) / 2.0).epsilon(1e-10));
}

TEST_CASE("2D flux direction is normalized and scales components") {
    const FluxModel f = make_flux("burgers", 1.0, {3.0, 4.0});
    CHECK(f.direction[0] == doctest::Approx(0.6));
    CHECK(f.direction[1] == doctest::Approx(0.8));
    const auto A = eval_A(f, 2.0);
    CHECK(A[0] == doctest::Approx(1.2));
    CHECK(A[1] == doctest::Approx(1.6));
}
