#ifndef SSCL_FLUX_HPP
#define SSCL_FLUX_HPP

#include <array>
#include <functional>
#include <string>
#include <vector>

namespace sscl {

enum class FluxKind { burgers, linear, cubic };

// Scalar flux A acting along a unit direction; a = A' exactly.
// growth_C/growth_p define the majorant Gamma(xi,zeta) = C(1+|xi|^{p-1}+|zeta|^{p-1})
// with |a(xi)-a(zeta)| <= Gamma(xi,zeta)|xi-zeta|.
struct FluxModel {
    FluxKind kind = FluxKind::burgers;
    std::string name = "burgers";
    double param = 1.0;                    // advection speed for linear
    int growth_p = 2;
    double growth_C = 1.0;
    double ffp_C = 0.0;                    // frozen upsilon-bound constant
    std::array<double, 2> direction{1.0, 0.0};

    double A(double xi) const;
    double a(double xi) const;
    double max_wave_speed(double u_bound) const;
};

FluxModel make_flux(const std::string& name, double param = 1.0,
                    const std::array<double, 2>& direction = {1.0, 0.0});

std::array<double, 2> eval_A(const FluxModel& f, double xi);
std::array<double, 2> eval_a(const FluxModel& f, double xi);

struct GammaReport {
    double max_ratio = 0.0;
    bool pass = false;
    double at_xi = 0.0, at_zeta = 0.0;
};

// max over lattice pairs of |a(xi)-a(zeta)| / (Gamma(xi,zeta)|xi-zeta|).
GammaReport check_gamma(const FluxModel& f, const std::vector<double>& lattice);

// Entropy flux q(u) = int_0^u a(s) eta'(s) ds along the flux direction,
// Gauss-Legendre to ~1e-12 relative.
std::array<double, 2> entropy_flux(const FluxModel& f,
                                   const std::function<double(double)>& eta_prime, double u);
double entropy_flux_scalar(const FluxModel& f,
                           const std::function<double(double)>& eta_prime, double u);

}  // namespace sscl

#endif
