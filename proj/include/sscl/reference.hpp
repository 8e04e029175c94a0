#ifndef SSCL_REFERENCE_HPP
#define SSCL_REFERENCE_HPP

#include "sscl/doubling.hpp"
#include "sscl/grid.hpp"
#include "sscl/kinetic.hpp"

// Single-threaded reference implementations of the parallel kernels, written
// as direct sums with no algebraic shortcuts. Tests compare the fast paths
// against these; the bench tool times both.
namespace sscl::serial {

std::vector<double> modulus_table(const GridField& u);

double seminorm_p_sigma(const GridField& u, double sigma);

// Direct quadruple sum of rho(x-y) psi(xi-zeta) f1 (1 - f2) over grid cells,
// with the exact per-bin-pair integral of psi. Cost O(n^2 m^2).
double doubled_integral(const KineticFunction& f1, const KineticFunction& f2,
                        const DiscreteKernel& rho, const PsiPair& psi);

EstimateWithBound I_psi_estimate(const std::vector<YoungSlice>& traj,
                                 const DiscreteKernel& rho, const PsiPair& psi,
                                 const NoiseModel& noise);

}  // namespace sscl::serial

#endif
