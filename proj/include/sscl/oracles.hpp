#ifndef SSCL_ORACLES_HPP
#define SSCL_ORACLES_HPP

#include <vector>

#include "sscl/kinetic.hpp"

namespace sscl {

// Piecewise-constant kinetic function of xi alone: 1 below the first
// breakpoint, 0 above the last, nonincreasing levels in between. All the
// collapse-dynamics integrals below are exact finite sums on this class.
struct StepKineticFunction {
    std::vector<double> breaks;   // strictly increasing
    std::vector<double> levels;   // size breaks+1; levels.front()=1, levels.back()=0

    // Convex combination of Heavisides sum_i w_i 1_{u_i > xi}, sum w_i = 1.
    static StepKineticFunction from_heavisides(std::vector<std::pair<double, double>> wu);

    double eval(double xi) const;
    // u = integral of chi_f; exact.
    double state() const;
    // integral_{-infty}^{xi} (1_{u0 > zeta} - f(zeta)) dzeta, exact.
    double lower_integral_against(double u0, double xi) const;
    bool is_indicator(double tol = 1e-14) const;
    std::vector<double> sample(const XiGrid& xi) const;
};

// Mixture a*f + (1-a)*g on the merged breakpoint set.
StepKineticFunction mix(double a, const StepKineticFunction& f, const StepKineticFunction& g);

// Relaxation toward the Heaviside at the conserved state:
// f(t) = e^{-t} f0 + (1-e^{-t}) 1_{u0 > xi}.
StepKineticFunction collapse_exact(const StepKineticFunction& f0, double t);

// Explicit Euler on the xi-sampled relaxation ODE, re-deriving u(t) from chi
// at every step.
std::vector<double> collapse_numeric(const StepKineticFunction& f0, const XiGrid& xi,
                                     double t, double dt);

// m(t,xi) = int_{-infty}^{xi} (1_{u0>zeta} - f(t,zeta)) dzeta, exact.
double collapse_measure(const StepKineticFunction& f0, double t, double xi);

// Collapse trajectory with the window [t1,t2] erased: continuous dissipation
// density plus one atomic contribution in time at t1.
struct ErasedIntervalTrajectory {
    StepKineticFunction f0;
    double t1 = 0.0, t2 = 0.0, horizon = 0.0;

    StepKineticFunction at(double t) const;            // the spliced trajectory
    double atom_cumulative(double xi) const;           // int_{-infty}^xi (f(t2)-f(t1))
    double atom_mass() const;                          // total over xi
    // Histogram of the full measure (continuous part + time atom) on the
    // given geometry, constant in x.
    KineticMeasure bake_measure(const TorusGrid& grid, int t_bins, const XiGrid& xi) const;
    std::vector<std::pair<double, KineticFunction>> snapshots(const TorusGrid& grid,
                                                              const XiGrid& xi,
                                                              int count) const;
};

ErasedIntervalTrajectory erased_interval_example(const StepKineticFunction& f0, double t1,
                                                 double t2, double horizon);

// Entropy solution of the Burgers Riemann problem with states (uL, uR),
// jump at x = 0.
double burgers_riemann(double uL, double uR, double x, double t);

// Broadcast a xi-only kinetic function onto a torus grid.
KineticFunction broadcast(const StepKineticFunction& f, const TorusGrid& grid,
                          const XiGrid& xi);

}  // namespace sscl

#endif
