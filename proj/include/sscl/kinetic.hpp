#ifndef SSCL_KINETIC_HPP
#define SSCL_KINETIC_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sscl/flux.hpp"
#include "sscl/grid.hpp"
#include "sscl/noise.hpp"

namespace sscl {

// Uniform bins in the kinetic variable. The origin always sits on a bin edge
// and strictly inside the range; chi then vanishes identically off the grid
// and midpoint reconstruction is exact to half a bin.
struct XiGrid {
    double lo = 0.0;
    double dxi = 0.0;
    int bins = 0;

    double edge(int j) const { return lo + j * dxi; }
    double center(int j) const { return lo + (j + 0.5) * dxi; }
    double hi() const { return edge(bins); }
    int bin_of(double xi) const {  // clamped
        int j = static_cast<int>(std::floor((xi - lo) / dxi));
        return j < 0 ? 0 : (j >= bins ? bins - 1 : j);
    }
    bool contains(double xi) const { return xi >= lo && xi < hi(); }
    bool operator==(const XiGrid&) const = default;
};

XiGrid make_xi_grid(double lo, double hi, int bins);
// Range widened to the observed u-range plus a 10% margin (at least 2 bins).
XiGrid xi_grid_for_range(double u_min, double u_max, int bins, double margin_frac = 0.1);

// f(x_i, xi_j) in [0,1], nonincreasing in xi; stored row-major (x fastest on xi).
struct KineticFunction {
    TorusGrid grid;
    XiGrid xi;
    std::vector<double> values;

    double& at(std::size_t x, int j) { return values[x * xi.bins + j]; }
    double at(std::size_t x, int j) const { return values[x * xi.bins + j]; }
    std::size_t nx() const { return grid.size(); }
};

KineticFunction kinetic_function(const GridField& u, const XiGrid& xi);

// chi_f = f - 1_{0 > xi} on the same lattice; values in [-1,1].
std::vector<double> chi(const KineticFunction& f);
double chi_value(const KineticFunction& f, std::size_t x, int j);

// Midpoint xi-quadrature of chi; inverse of kinetic_function to dxi/2.
GridField reconstruct_u(const KineticFunction& f);

// Checks monotonicity in xi, range [0,1], saturation at the ends, and that
// -d_xi f has unit mass per fiber.
struct KineticFunctionCheck {
    bool monotone = true;
    bool range_ok = true;
    bool saturated = true;
    double max_fiber_mass_error = 0.0;
};
KineticFunctionCheck check_kinetic_function(const KineticFunction& f);

// Nonnegative histogram over (x-cell, t-bin, xi-bin) with widen-on-escape in xi.
class KineticMeasure {
  public:
    KineticMeasure() = default;
    KineticMeasure(const TorusGrid& grid, int t_bins, double t_end, const XiGrid& xi);

    void deposit(std::size_t x_cell, double t, double xi, double weight);
    void merge(const KineticMeasure& other);   // same geometry required

    double total_mass() const;
    double moment(double p) const;             // sum |xi_c|^p w
    double tail_mass(double R) const;          // mass in |xi| >= R
    std::vector<double> mass_per_t_bin() const;
    // m(phi) for phi(x1,x2,t,xi) evaluated at cell centers.
    double pair_with(const std::function<double(double, double, double, double)>& phi) const;

    const TorusGrid& grid() const { return grid_; }
    const XiGrid& xi() const { return xi_; }
    int t_bins() const { return t_bins_; }
    double t_end() const { return t_end_; }
    double t_center(int b) const { return (b + 0.5) * t_end_ / t_bins_; }
    bool widened() const { return widened_; }
    double weight(std::size_t x, int tb, int jb) const {
        return w_[(x * t_bins_ + tb) * xi_.bins + jb];
    }

  private:
    TorusGrid grid_;
    int t_bins_ = 0;
    double t_end_ = 0.0;
    XiGrid xi_;
    std::vector<double> w_;
    bool widened_ = false;
    void widen_to(double xi);
};

struct TailReport {
    double tail = 0.0;
    double moment = 0.0;
};
TailReport measure_tail(const KineticMeasure& m, double R, double p = 2.0);

// Per-point Young measure: either an atom at u(x) or a histogram fiber.
struct EmpiricalYoungMeasure {
    TorusGrid grid;
    bool atomic = true;
    std::vector<double> atoms;      // per x, when atomic
    XiGrid hist_xi;
    std::vector<double> hist;       // nx * bins, fibers sum to 1, when not

    static EmpiricalYoungMeasure from_field(const GridField& u);
    static EmpiricalYoungMeasure from_histogram(const TorusGrid& g, const XiGrid& xi,
                                                std::vector<double> fibers);
    double fiber_mass_error() const;
};

// integral over x of the p-th absolute moment of the fiber.
double young_moment(const EmpiricalYoungMeasure& nu, double p);

// Separable weak-convergence test H(z,xi) = h(z) g(xi).
struct SeparableObservable {
    std::string name;
    std::function<double(double, double)> h;   // of (x1,x2)
    std::function<double(double)> g;           // of xi
};
double pair_kinetic(const KineticFunction& f, const SeparableObservable& H);

struct ConvergenceReport {
    std::vector<std::vector<double>> gaps;  // [test][n]
    double final_max_gap = 0.0;
};
ConvergenceReport weak_convergence_check(const std::vector<KineticFunction>& seq,
                                         const KineticFunction& candidate,
                                         const std::vector<SeparableObservable>& tests);

// ---------------------------------------------------------------------------
// Separable test functions phi(x,t,xi) = alpha(x) beta(t) gamma(xi) with
// beta(T) = 0 and closed-form derivatives and xi-cumulatives.

struct TestFunction {
    // alpha: 1, cos(2 pi k.x) or sin(2 pi k.x)
    std::array<int, 2> wave{0, 0};
    bool sine = false;
    // beta(t) = (1 - t/T)^2
    double horizon = 1.0;
    // gamma: constant 1, or the quartic bump (1-s^2)^2, s = (xi-c)/w
    bool xi_constant = true;
    double bump_center = 0.0;
    double bump_width = 1.0;

    double alpha(double x1, double x2) const;
    std::array<double, 2> grad_alpha(double x1, double x2) const;
    double lap_alpha(double x1, double x2) const;
    double beta(double t) const;
    double dbeta(double t) const;
    double gamma(double xi) const;
    double dgamma(double xi) const;
    // int_0^u gamma(xi) dxi, exact.
    double gamma_cum(double u) const;
    // int_0^u a(xi) gamma(xi) dxi along the scalar flux, exact for the catalog.
    double flux_cum(const FluxModel& flux, double u) const;
};

}  // namespace sscl

#endif
