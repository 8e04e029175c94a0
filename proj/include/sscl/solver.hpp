#ifndef SSCL_SOLVER_HPP
#define SSCL_SOLVER_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "sscl/flux.hpp"
#include "sscl/grid.hpp"
#include "sscl/kinetic.hpp"
#include "sscl/noise.hpp"

namespace sscl {

struct SolverConfig {
    TorusGrid grid;
    FluxModel flux;
    NoiseModel noise;
    double eta = 0.0;               // viscosity
    double t_end = 0.5;
    double cfl_safety = 0.4;
    std::vector<double> snapshot_times;
    double u_bound = 2.0;           // state bound used for the wave-speed CFL
    double dt_override = 0.0;       // > 0 pins dt (coupled ladders, refinement)
    bool accumulate_measure = true;
    int xi_bins = 128;
    int t_bins = 64;
};

// Per-step energy/moment bookkeeping. Norm columns have step_count+1 rows
// (state at every step edge); increment columns have step_count rows.
struct EnergyLedger {
    std::vector<double> l2sq;        // |u|_L2^2 at step edges
    std::vector<double> l4;          // |u|_L4^4 at step edges
    std::vector<double> diss2_inc;   // 2 eta |grad u|_L2^2 dt
    std::vector<double> diss4_inc;   // eta int u^2 |grad u|^2 dx dt
    std::vector<double> noise2_inc;  // int G^2(x,u) dx dt
    std::vector<double> diss2_cum;   // prefix sums (diss2, noise2)
    std::vector<double> noise2_cum;
    bool finite() const;
};

struct Snapshot {
    double t = 0.0;
    std::size_t step = 0;
    GridField u;
};

struct PathRun {
    std::vector<Snapshot> snapshots;
    EnergyLedger ledger;
    std::optional<KineticMeasure> kinetic;
    std::uint64_t path_seed = 0;
    std::size_t step_count = 0;
    double dt_used = 0.0;
    double measure_mass_direct = 0.0;  // independently summed eta |grad u|^2 dt dx
};

struct PathBlowup : std::runtime_error {
    std::size_t step;
    std::uint64_t seed;
    PathBlowup(std::size_t s, std::uint64_t sd);
};

// dt = cfl * min(dx / max|a|, dx^2 / (2 N eta)); positive.
double stable_dt(const SolverConfig& cfg, double u_bound);

// One Euler-Maruyama step: conservative local Lax-Friedrichs flux divergence,
// explicit centered diffusion, forcing evaluated at the pre-step state.
GridField step(const GridField& u, double dt, const IncrementBatch& inc,
               const SolverConfig& cfg);

PathRun run_path(const SolverConfig& cfg, const GridField& u0, std::uint64_t path_seed);

// Energy-balance defect per snapshot time, averaged over an ensemble:
//   |u(t)|^2 + 2 eta sum |grad u|^2 dt - |u0|^2 - sum |G(u)|^2 dt.
struct EnergyCheck {
    std::vector<double> t;
    std::vector<double> margin_mean;
    std::vector<double> margin_stderr;
    double max_margin = 0.0;
};
EnergyCheck energy_check(const std::vector<PathRun>& ensemble);

// Empirical moment bounds, p in {2,4}.
struct MomentReport {
    double e_sup_norm = 0.0;      // E sup_t |u|_Lp^p
    double e_dissipation = 0.0;   // E eta int int |u|^{p-2} |grad u|^2
    double sup_norm_stderr = 0.0;
};
MomentReport moment_check(const std::vector<PathRun>& ensemble, int p);

}  // namespace sscl

#endif
