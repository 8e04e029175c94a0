#include "sscl/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

namespace sscl {

PathBlowup::PathBlowup(std::size_t s, std::uint64_t sd)
    : std::runtime_error("path blew up at step " + std::to_string(s) + ", seed " +
                         std::to_string(sd)),
      step(s),
      seed(sd) {}

bool EnergyLedger::finite() const {
    auto ok = [](const std::vector<double>& v) {
        for (double x : v)
            if (!std::isfinite(x)) return false;
        return true;
    };
    return ok(l2sq) && ok(l4) && ok(diss2_inc) && ok(diss4_inc) && ok(noise2_inc);
}

double stable_dt(const SolverConfig& cfg, double u_bound) {
    const double dx = cfg.grid.dx;
    const double amax = cfg.flux.max_wave_speed(u_bound);
    const double inf = std::numeric_limits<double>::infinity();
    const double convective = amax > 0.0 ? dx / amax : inf;
    const double diffusive =
        cfg.eta > 0.0 ? dx * dx / (2.0 * cfg.grid.dim * cfg.eta) : inf;
    double dt = cfg.cfl_safety * std::min(convective, diffusive);
    if (!std::isfinite(dt)) dt = cfg.t_end / 100.0;  // pure-noise fallback
    return dt;
}

namespace {

// Local Lax-Friedrichs (Rusanov) divergence of A(u) d, dimension by dimension.
void flux_divergence(const GridField& u, const FluxModel& flux, GridField& out) {
    const TorusGrid& g = u.grid;
    const double invdx = 1.0 / g.dx;
    if (g.dim == 1) {
        const double d1 = flux.direction[0];
        // face flux between i and i+1
        std::vector<double> face(g.n);
        for (int i = 0; i < g.n; ++i) {
            const double ul = u(i), ur = u(i + 1);
            const double lam = std::max(std::abs(flux.a(ul)), std::abs(flux.a(ur))) *
                               std::abs(d1);
            face[i] = 0.5 * (flux.A(ul) + flux.A(ur)) * d1 - 0.5 * lam * (ur - ul);
        }
        for (int i = 0; i < g.n; ++i)
            out(i) = (face[i] - face[g.wrap(i - 1)]) * invdx;
    } else {
        for (int i = 0; i < g.n; ++i)
            for (int j = 0; j < g.n; ++j) out(i, j) = 0.0;
        for (int dim = 0; dim < 2; ++dim) {
            const double dd = flux.direction[dim];
            if (dd == 0.0) continue;
            for (int i = 0; i < g.n; ++i)
                for (int j = 0; j < g.n; ++j) {
                    auto at = [&](int s) {
                        return dim == 0 ? u(i + s, j) : u(i, j + s);
                    };
                    auto face = [&](int s) {  // flux through face between s and s+1
                        const double ul = at(s), ur = at(s + 1);
                        const double lam =
                            std::max(std::abs(flux.a(ul)), std::abs(flux.a(ur))) *
                            std::abs(dd);
                        return 0.5 * (flux.A(ul) + flux.A(ur)) * dd -
                               0.5 * lam * (ur - ul);
                    };
                    out(i, j) += (face(0) - face(-1)) * invdx;
                }
        }
    }
}

}  // namespace

GridField step(const GridField& u, double dt, const IncrementBatch& inc,
               const SolverConfig& cfg) {
    const TorusGrid& g = u.grid;
    GridField div(g), next(g);
    flux_divergence(u, cfg.flux, div);
    const GridField lap = cfg.eta > 0.0 ? laplacian(u) : GridField(g);
    for (std::size_t s = 0; s < u.size(); ++s)
        next.values[s] = u.values[s] - dt * div.values[s] + dt * cfg.eta * lap.values[s];
    const int K = cfg.noise.K();
    if (K > 0) {
        for (std::size_t s = 0; s < u.size(); ++s) {
            const auto xy = g.coords(s);
            double kick = 0.0;
            for (int k = 1; k <= K; ++k)
                kick += cfg.noise.g(k, xy[0], xy[1], u.values[s]) * inc.dbeta[k - 1];
            next.values[s] += kick;
        }
    }
    for (double v : next.values)
        if (!std::isfinite(v)) throw PathBlowup(inc.step_index, inc.path_seed);
    return next;
}

PathRun run_path(const SolverConfig& cfg, const GridField& u0, std::uint64_t path_seed) {
    const TorusGrid& g = cfg.grid;
    const double amax = cfg.flux.max_wave_speed(cfg.u_bound);
    if (cfg.eta > 0.0 && cfg.eta < g.dx * amax)
        std::fprintf(stderr,
                     "run_path: eta=%g below grid-Peclet threshold dx*max|a|=%g; "
                     "scheme dissipation dominates\n",
                     cfg.eta, g.dx * amax);

    double dt0 = cfg.dt_override > 0.0 ? cfg.dt_override : stable_dt(cfg, cfg.u_bound);
    const std::size_t steps =
        static_cast<std::size_t>(std::ceil(cfg.t_end / dt0 - 1e-12));
    const double dt = cfg.t_end / static_cast<double>(steps);

    PathRun run;
    run.path_seed = path_seed;
    run.step_count = steps;
    run.dt_used = dt;

    std::vector<std::size_t> snap_steps;
    for (double t : cfg.snapshot_times) {
        const auto idx = static_cast<std::size_t>(
            std::llround(std::clamp(t, 0.0, cfg.t_end) / dt));
        snap_steps.push_back(std::min(idx, steps));
    }

    const double cell = std::pow(g.dx, g.dim);
    GridField u = u0;
    validate(u, "run_path initial datum");

    if (cfg.accumulate_measure && cfg.eta > 0.0) {
        double lo = std::min(field_min(u), -0.1), hi = std::max(field_max(u), 0.1);
        // leave room for the noise to push the state around
        const double span = std::max(std::abs(lo), std::abs(hi));
        const double drift =
            3.0 * std::sqrt(cfg.noise.D0() * (1.0 + span * span) * cfg.t_end);
        run.kinetic = KineticMeasure(g, cfg.t_bins, cfg.t_end,
                                     xi_grid_for_range(lo - drift, hi + drift, cfg.xi_bins));
    }

    auto record_norms = [&](const GridField& v) {
        double l2 = 0.0, l4 = 0.0;
        for (double x : v.values) {
            l2 += x * x;
            l4 += x * x * x * x;
        }
        run.ledger.l2sq.push_back(l2 * cell);
        run.ledger.l4.push_back(l4 * cell);
    };

    record_norms(u);
    for (std::size_t n = 0; n < steps; ++n) {
        const double t = n * dt;
        for (std::size_t si = 0; si < snap_steps.size(); ++si)
            if (snap_steps[si] == n)
                run.snapshots.push_back({cfg.snapshot_times[si], n, u});

        const GridField grad2 = gradient_squared(u);
        double g2sum = 0.0, g2w = 0.0;
        for (std::size_t s = 0; s < u.size(); ++s) {
            g2sum += grad2.values[s];
            g2w += grad2.values[s] * u.values[s] * u.values[s];
        }
        run.ledger.diss2_inc.push_back(2.0 * cfg.eta * g2sum * cell * dt);
        run.ledger.diss4_inc.push_back(cfg.eta * g2w * cell * dt);
        run.ledger.noise2_inc.push_back(cfg.noise.K() > 0 ? g2_l2(cfg.noise, u) * dt : 0.0);

        if (run.kinetic) {
            for (std::size_t s = 0; s < u.size(); ++s) {
                const double w = cfg.eta * grad2.values[s] * dt * cell;
                run.kinetic->deposit(s, t, u.values[s], w);
                run.measure_mass_direct += w;
            }
        }

        const IncrementBatch inc = sample_increments(cfg.noise, dt, path_seed, n);
        u = step(u, dt, inc, cfg);
        record_norms(u);
    }
    for (std::size_t si = 0; si < snap_steps.size(); ++si)
        if (snap_steps[si] == steps)
            run.snapshots.push_back({cfg.snapshot_times[si], steps, u});

    // prefix sums for snapshot-time energy balances
    run.ledger.diss2_cum.resize(steps + 1, 0.0);
    run.ledger.noise2_cum.resize(steps + 1, 0.0);
    for (std::size_t n = 0; n < steps; ++n) {
        run.ledger.diss2_cum[n + 1] = run.ledger.diss2_cum[n] + run.ledger.diss2_inc[n];
        run.ledger.noise2_cum[n + 1] = run.ledger.noise2_cum[n] + run.ledger.noise2_inc[n];
    }
    if (!run.ledger.finite()) throw PathBlowup(steps, path_seed);
    return run;
}

EnergyCheck energy_check(const std::vector<PathRun>& ensemble) {
    EnergyCheck out;
    if (ensemble.empty()) return out;
    const std::size_t ns = ensemble.front().snapshots.size();
    out.t.resize(ns);
    out.margin_mean.resize(ns);
    out.margin_stderr.resize(ns);
    for (std::size_t si = 0; si < ns; ++si) {
        double sum = 0.0, sumsq = 0.0;
        for (const PathRun& run : ensemble) {
            const Snapshot& snap = run.snapshots[si];
            const EnergyLedger& led = run.ledger;
            const double margin = led.l2sq[snap.step] + led.diss2_cum[snap.step] -
                                  led.l2sq[0] - led.noise2_cum[snap.step];
            sum += margin;
            sumsq += margin * margin;
        }
        const double n = static_cast<double>(ensemble.size());
        const double mean = sum / n;
        const double var = std::max(0.0, sumsq / n - mean * mean);
        out.t[si] = ensemble.front().snapshots[si].t;
        out.margin_mean[si] = mean;
        out.margin_stderr[si] = std::sqrt(var / n);
        out.max_margin = std::max(out.max_margin, mean);
    }
    return out;
}

MomentReport moment_check(const std::vector<PathRun>& ensemble, int p) {
    if (p != 2 && p != 4)
        throw std::invalid_argument("moment_check: ledger tracks p in {2,4} only");
    MomentReport rep;
    double supsum = 0.0, supsumsq = 0.0, diss = 0.0;
    for (const PathRun& run : ensemble) {
        const auto& norms = p == 2 ? run.ledger.l2sq : run.ledger.l4;
        const double sup = *std::max_element(norms.begin(), norms.end());
        supsum += sup;
        supsumsq += sup * sup;
        double d = 0.0;
        if (p == 2)
            for (double v : run.ledger.diss2_inc) d += 0.5 * v;
        else
            for (double v : run.ledger.diss4_inc) d += v;
        diss += d;
    }
    const double n = static_cast<double>(ensemble.size());
    rep.e_sup_norm = supsum / n;
    rep.e_dissipation = diss / n;
    rep.sup_norm_stderr =
        std::sqrt(std::max(0.0, supsumsq / n - rep.e_sup_norm * rep.e_sup_norm) / n);
    return rep;
}

}  // namespace sscl
