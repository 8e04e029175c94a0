#ifndef SSCL_RESIDUALS_HPP
#define SSCL_RESIDUALS_HPP

#include <functional>

#include "sscl/solver.hpp"

namespace sscl {

// Replays the deterministic path (cfg, u0, seed) and hands every state to the
// observer; inc is null for the terminal state. Residual evaluations stream
// through this instead of storing whole trajectories.
void run_stream(const SolverConfig& cfg, const GridField& u0, std::uint64_t path_seed,
                const std::function<void(std::size_t n, double t, const GridField& u,
                                         const IncrementBatch* inc)>& observer);

// Weak-form defect of the kinetic formulation for one separable test
// function; the stochastic integral reuses the path's own increments and the
// measure must come from the same (cfg, u0, seed) run.
double kinetic_weak_residual(const SolverConfig& cfg, const GridField& u0,
                             std::uint64_t path_seed, const KineticMeasure& m,
                             const TestFunction& phi);

// Conservative weak form of the PDE itself (xi-independent tests), written as
// an independent implementation for cross-checking.
double direct_weak_residual(const SolverConfig& cfg, const GridField& u0,
                            std::uint64_t path_seed, const TestFunction& phi);

// Convex entropy with derivatives.
struct Entropy {
    std::function<double(double)> value;
    std::function<double(double)> d1;
    std::function<double(double)> d2;
};
Entropy square_entropy();
Entropy quartic_entropy();
Entropy linear_entropy();

// Nonnegative spatial weight theta(x) = offset + amp cos(2 pi k.x).
struct SpatialWeight {
    double offset = 1.0;
    double amp = 0.0;
    std::array<int, 2> wave{1, 0};

    double theta(double x1, double x2) const;
    std::array<double, 2> grad(double x1, double x2) const;
    double lap(double x1, double x2) const;
};

// Defect of the entropy inequality between the step times nearest s and t
// (LHS - RHS; solution-like paths stay below tolerance).
double entropy_residual(const SolverConfig& cfg, const GridField& u0,
                        std::uint64_t path_seed, const Entropy& eta,
                        const SpatialWeight& theta, double s, double t);

// m(theta x eta'') over the same window, for the equivalence check.
double measure_pairing(const KineticMeasure& m, const Entropy& eta,
                       const SpatialWeight& theta, double s, double t);

struct TimeAtom {
    int t_bin = 0;
    double t_lo = 0.0, t_hi = 0.0;
    double mass = 0.0;
    double defect = 0.0;  // worst mismatch of <f+ - f-, phi> vs -m({t})(d_xi phi)
};

// Flags t-bins with mass above 5x the median and checks the jump identity
// against the bracketing kinetic-function snapshots.
std::vector<TimeAtom> detect_time_atoms(
    const KineticMeasure& m,
    const std::vector<std::pair<double, KineticFunction>>& f_snapshots,
    const std::vector<TestFunction>& tests);

}  // namespace sscl

#endif
