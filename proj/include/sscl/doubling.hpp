#ifndef SSCL_DOUBLING_HPP
#define SSCL_DOUBLING_HPP

#include <vector>

#include "sscl/flux.hpp"
#include "sscl/grid.hpp"
#include "sscl/kinetic.hpp"
#include "sscl/noise.hpp"

namespace sscl {

enum class PsiBase { triangular, quartic };

// Mollifier pair in the kinetic variable: psi_delta(r) = psi(r/delta)/delta
// with closed-form first and second antiderivatives. psi1 climbs from 0 to 1,
// psi2 is convex, nonnegative and equals r above the support.
struct PsiPair {
    PsiBase base = PsiBase::triangular;
    double delta = 1.0;
    double C_psi = 0.25;  // sup_r |r psi_base(r)|

    double psi(double r) const;
    double psi1(double r) const;
    double psi2(double r) const;
    double sup_base() const;
};

PsiPair build_psi(double delta, PsiBase base = PsiBase::triangular);

// Four-term chi expansion of
//   int rho(x-y) psi(xi-zeta) f1(x,xi) (1 - f2(y,zeta)) dxi dzeta dx dy,
// exact for the piecewise-constant kinetic functions on their shared xi grid.
// OpenMP-parallel over x. Rejects mismatched grids.
double doubled_integral(const KineticFunction& f1, const KineticFunction& f2,
                        const DiscreteKernel& rho, const PsiPair& psi);

// int (u1 - u2)^+ dx.
double positive_part_l1(const GridField& u1, const GridField& u2);

// Monte Carlo average of int (u1 - u2)^+ dx over coupled path pairs
// (slot i of each ensemble shares the driving noise).
struct ContractionValue {
    double mean = 0.0;
    double stderr_ = 0.0;
};
ContractionValue contraction_functional(const std::vector<GridField>& u1_ensemble,
                                        const std::vector<GridField>& u2_ensemble);

// One time slice of a Young-measure trajectory with its quadrature weight.
struct YoungSlice {
    double weight = 0.0;  // dt
    EmpiricalYoungMeasure nu1;
    EmpiricalYoungMeasure nu2;
};

struct EstimateWithBound {
    double value = 0.0;
    double bound = 0.0;
    bool pass = false;
};

// I_psi: noise-coupling term of the doubled-variables balance, together with
// its additive + multiplicative majorant
//   (t D1/2) eps^2/delta  [+ (t D1 C_psi/2) h(delta)].
EstimateWithBound I_psi_estimate(const std::vector<YoungSlice>& traj,
                                 const DiscreteKernel& rho, const PsiPair& psi,
                                 const NoiseModel& noise);

// Upsilon(xi, zeta): iterated integral of Gamma |xi'-zeta'| psi_delta over
// {xi' < xi, zeta' > zeta}; zero when zeta >= xi + delta.
double upsilon(double xi, double zeta, const PsiPair& psi, const FluxModel& flux);

struct UpsilonCheck {
    double value = 0.0;
    double bound = 0.0;  // ffp_C (1 + |xi|^p + |zeta|^p) delta
    bool pass = false;
};
UpsilonCheck upsilon_check(double xi, double zeta, const PsiPair& psi, const FluxModel& flux);

// Signed inner kernel of I_rho: D(v,w) = int_{zeta>w, xi<v} (a(xi)-a(zeta))
// psi_delta(xi-zeta) dxi dzeta, |D| <= Upsilon.
double irho_inner(double v, double w, const PsiPair& psi, const FluxModel& flux);

// I_rho: flux-coupling term, with the Upsilon-mechanism bound
//   t ffp_C delta |grad rho|_{L1,proj} (1 + nu1 p-moment + nu2 p-moment).
EstimateWithBound I_rho_estimate(const std::vector<YoungSlice>& traj,
                                 const DiscreteKernel& rho, const PsiPair& psi,
                                 const FluxModel& flux);

// Remainder of the doubled-variables balance at (eps, delta): the sum of both
// bounds; decreasing along delta = eps^{4/3} ladders.
double combined_remainder(double t, double eps, double delta, const TorusGrid& grid,
                          MollifierKind kind, PsiBase base, const NoiseModel& noise,
                          const FluxModel& flux, double moment1, double moment2);

struct SweepRow {
    double epsilon = 0.0, delta = 0.0;
    double ipsi_value = 0.0, ipsi_bound = 0.0;
    double irho_value = 0.0, irho_bound = 0.0;
    bool pass = false;
};

// Geometric (eps, delta) sweep of both estimates on a fixed trajectory.
std::vector<SweepRow> bound_sweep(const std::vector<YoungSlice>& traj,
                                  const TorusGrid& grid, MollifierKind kind, PsiBase base,
                                  const NoiseModel& noise, const FluxModel& flux,
                                  const std::vector<double>& eps_ladder,
                                  const std::vector<double>& delta_ladder);

}  // namespace sscl

#endif
