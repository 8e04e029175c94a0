#include "sscl/residuals.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sscl {

void run_stream(const SolverConfig& cfg, const GridField& u0, std::uint64_t path_seed,
                const std::function<void(std::size_t, double, const GridField&,
                                         const IncrementBatch*)>& observer) {
    double dt0 = cfg.dt_override > 0.0 ? cfg.dt_override : stable_dt(cfg, cfg.u_bound);
    const auto steps = static_cast<std::size_t>(std::ceil(cfg.t_end / dt0 - 1e-12));
    const double dt = cfg.t_end / static_cast<double>(steps);
    GridField u = u0;
    for (std::size_t n = 0; n < steps; ++n) {
        const IncrementBatch inc = sample_increments(cfg.noise, dt, path_seed, n);
        observer(n, n * dt, u, &inc);
        u = step(u, dt, inc, cfg);
    }
    observer(steps, cfg.t_end, u, nullptr);
}

double kinetic_weak_residual(const SolverConfig& cfg, const GridField& u0,
                             std::uint64_t path_seed, const KineticMeasure& m,
                             const TestFunction& phi) {
    if (std::abs(phi.beta(cfg.t_end)) > 1e-12)
        throw std::invalid_argument("kinetic_weak_residual: test must vanish at t_end");
    const TorusGrid& g = cfg.grid;
    const double cell = std::pow(g.dx, g.dim);
    double t_terms = 0.0, init_term = 0.0, ito_term = 0.0;
    run_stream(cfg, u0, path_seed, [&](std::size_t n, double t, const GridField& u,
                                       const IncrementBatch* inc) {
        if (inc == nullptr) return;  // left-endpoint quadrature in time
        const double dt = inc->dt;
        double sum_t = 0.0;
        for (std::size_t s = 0; s < u.size(); ++s) {
            const auto xy = g.coords(s);
            const double uu = u.values[s];
            const double al = phi.alpha(xy[0], xy[1]);
            const auto ga = phi.grad_alpha(xy[0], xy[1]);
            const double gdotd =
                ga[0] * cfg.flux.direction[0] + ga[1] * cfg.flux.direction[1];
            // <f, d_t phi> + <f, a.grad phi + eta lap phi> via chi cumulatives;
            // the diffusion term lands on the test side with a plus sign,
            // matching the Ito derivation of the viscous kinetic identity
            sum_t += al * phi.dbeta(t) * phi.gamma_cum(uu) +
                     phi.beta(t) * (gdotd * phi.flux_cum(cfg.flux, uu) +
                                    cfg.eta * phi.lap_alpha(xy[0], xy[1]) *
                                        phi.gamma_cum(uu));
            // Ito correction:  1/2 d_xi phi G^2 at the atom
            if (cfg.noise.K() > 0)
                sum_t += 0.5 * al * phi.beta(t) * phi.dgamma(uu) *
                         cfg.noise.G2(xy[0], xy[1], uu);
            if (n == 0) init_term += al * phi.beta(0.0) * phi.gamma_cum(uu) * cell;
        }
        t_terms += sum_t * dt * cell;
        // stochastic integral with the path's own increments
        for (int k = 1; k <= cfg.noise.K(); ++k) {
            double sk = 0.0;
            for (std::size_t s = 0; s < u.size(); ++s) {
                const auto xy = g.coords(s);
                const double uu = u.values[s];
                sk += cfg.noise.g(k, xy[0], xy[1], uu) * phi.alpha(xy[0], xy[1]) *
                      phi.beta(t) * phi.gamma(uu);
            }
            ito_term += sk * cell * inc->dbeta[k - 1];
        }
    });
    double measure_term = 0.0;
    if (!phi.xi_constant)
        measure_term = m.pair_with([&](double x1, double x2, double t, double xi) {
            return phi.alpha(x1, x2) * phi.beta(t) * phi.dgamma(xi);
        });
    return t_terms + init_term + ito_term - measure_term;
}

double direct_weak_residual(const SolverConfig& cfg, const GridField& u0,
                            std::uint64_t path_seed, const TestFunction& phi) {
    if (!phi.xi_constant)
        throw std::invalid_argument("direct_weak_residual: xi-independent tests only");
    if (std::abs(phi.beta(cfg.t_end)) > 1e-12)
        throw std::invalid_argument("direct_weak_residual: test must vanish at t_end");
    const TorusGrid& g = cfg.grid;
    const double cell = std::pow(g.dx, g.dim);
    double acc = 0.0;
    run_stream(cfg, u0, path_seed, [&](std::size_t n, double t, const GridField& u,
                                       const IncrementBatch* inc) {
        if (inc == nullptr) return;
        const double dt = inc->dt;
        for (std::size_t s = 0; s < u.size(); ++s) {
            const auto xy = g.coords(s);
            const double uu = u.values[s];
            const auto ga = phi.grad_alpha(xy[0], xy[1]);
            const double gdotd =
                ga[0] * cfg.flux.direction[0] + ga[1] * cfg.flux.direction[1];
            acc += dt * cell *
                   (uu * phi.alpha(xy[0], xy[1]) * phi.dbeta(t) +
                    phi.beta(t) * (gdotd * (cfg.flux.A(uu) - cfg.flux.A(0.0)) +
                                   cfg.eta * phi.lap_alpha(xy[0], xy[1]) * uu));
            if (n == 0)
                acc += phi.alpha(xy[0], xy[1]) * phi.beta(0.0) * uu * cell;
        }
        for (int k = 1; k <= cfg.noise.K(); ++k) {
            double sk = 0.0;
            for (std::size_t s = 0; s < u.size(); ++s) {
                const auto xy = g.coords(s);
                sk += cfg.noise.g(k, xy[0], xy[1], u.values[s]) *
                      phi.alpha(xy[0], xy[1]) * phi.beta(t);
            }
            acc += sk * cell * inc->dbeta[k - 1];
        }
    });
    return acc;
}

Entropy square_entropy() {
    return {[](double u) { return u * u; }, [](double u) { return 2.0 * u; },
            [](double) { return 2.0; }};
}

Entropy quartic_entropy() {
    return {[](double u) { return u * u * u * u; },
            [](double u) { return 4.0 * u * u * u; },
            [](double u) { return 12.0 * u * u; }};
}

Entropy linear_entropy() {
    return {[](double u) { return u; }, [](double) { return 1.0; },
            [](double) { return 0.0; }};
}

double SpatialWeight::theta(double x1, double x2) const {
    return offset + amp * std::cos(2.0 * M_PI * (wave[0] * x1 + wave[1] * x2));
}

std::array<double, 2> SpatialWeight::grad(double x1, double x2) const {
    const double s = -amp * 2.0 * M_PI * std::sin(2.0 * M_PI * (wave[0] * x1 + wave[1] * x2));
    return {s * wave[0], s * wave[1]};
}

double SpatialWeight::lap(double x1, double x2) const {
    const double k2 = 4.0 * M_PI * M_PI * (wave[0] * wave[0] + wave[1] * wave[1]);
    return -k2 * amp * std::cos(2.0 * M_PI * (wave[0] * x1 + wave[1] * x2));
}

double entropy_residual(const SolverConfig& cfg, const GridField& u0,
                        std::uint64_t path_seed, const Entropy& eta,
                        const SpatialWeight& theta, double s_time, double t_time) {
    if (s_time > t_time) throw std::invalid_argument("entropy_residual: s > t");
    const TorusGrid& g = cfg.grid;
    const double cell = std::pow(g.dx, g.dim);
    double lhs_start = 0.0, lhs_end = 0.0, flux_term = 0.0, ito_term = 0.0, g2_term = 0.0;

    // snap the window to step indices
    double dt0 = cfg.dt_override > 0.0 ? cfg.dt_override : stable_dt(cfg, cfg.u_bound);
    const auto steps = static_cast<std::size_t>(std::ceil(cfg.t_end / dt0 - 1e-12));
    const double dt = cfg.t_end / static_cast<double>(steps);
    const auto ns = static_cast<std::size_t>(std::llround(s_time / dt));
    const auto nt = static_cast<std::size_t>(
        std::min<double>(std::llround(t_time / dt), static_cast<double>(steps)));

    run_stream(cfg, u0, path_seed, [&](std::size_t n, double, const GridField& u,
                                       const IncrementBatch* inc) {
        auto weighted_eta = [&]() {
            double acc = 0.0;
            for (std::size_t s = 0; s < u.size(); ++s) {
                const auto xy = g.coords(s);
                acc += theta.theta(xy[0], xy[1]) * eta.value(u.values[s]) * cell;
            }
            return acc;
        };
        if (n == ns) lhs_start = weighted_eta();
        if (n == nt) lhs_end = weighted_eta();
        if (inc == nullptr || n < ns || n >= nt) return;
        for (std::size_t s = 0; s < u.size(); ++s) {
            const auto xy = g.coords(s);
            const double uu = u.values[s];
            const auto gt = theta.grad(xy[0], xy[1]);
            const double gdotd =
                gt[0] * cfg.flux.direction[0] + gt[1] * cfg.flux.direction[1];
            if (gdotd != 0.0)
                flux_term += dt * cell * gdotd * entropy_flux_scalar(cfg.flux, eta.d1, uu);
            if (cfg.noise.K() > 0)
                g2_term += 0.5 * dt * cell * theta.theta(xy[0], xy[1]) *
                           cfg.noise.G2(xy[0], xy[1], uu) * eta.d2(uu);
        }
        for (int k = 1; k <= cfg.noise.K(); ++k) {
            double sk = 0.0;
            for (std::size_t s = 0; s < u.size(); ++s) {
                const auto xy = g.coords(s);
                sk += theta.theta(xy[0], xy[1]) *
                      cfg.noise.g(k, xy[0], xy[1], u.values[s]) * eta.d1(u.values[s]);
            }
            ito_term += sk * cell * inc->dbeta[k - 1];
        }
    });
    return lhs_end - lhs_start - flux_term - ito_term - g2_term;
}

double measure_pairing(const KineticMeasure& m, const Entropy& eta,
                       const SpatialWeight& theta, double s, double t) {
    double acc = 0.0;
    const double bin_dt = m.t_end() / m.t_bins();
    for (std::size_t x = 0; x < m.grid().size(); ++x) {
        const auto xy = m.grid().coords(x);
        for (int tb = 0; tb < m.t_bins(); ++tb) {
            const double tc = (tb + 0.5) * bin_dt;
            if (tc < s || tc > t) continue;
            for (int j = 0; j < m.xi().bins; ++j) {
                const double w = m.weight(x, tb, j);
                if (w != 0.0)
                    acc += w * theta.theta(xy[0], xy[1]) * eta.d2(m.xi().center(j));
            }
        }
    }
    return acc;
}

std::vector<TimeAtom> detect_time_atoms(
    const KineticMeasure& m,
    const std::vector<std::pair<double, KineticFunction>>& f_snapshots,
    const std::vector<TestFunction>& tests) {
    std::vector<TimeAtom> atoms;
    std::vector<double> per_bin = m.mass_per_t_bin();
    std::vector<double> sorted = per_bin;
    std::sort(sorted.begin(), sorted.end());
    const double median = sorted[sorted.size() / 2];
    const double threshold = 5.0 * median;
    const double bin_dt = m.t_end() / m.t_bins();
    const double cell = std::pow(m.grid().dx, m.grid().dim);

    for (int tb = 0; tb < m.t_bins(); ++tb) {
        if (per_bin[tb] <= threshold || per_bin[tb] == 0.0) continue;
        TimeAtom atom;
        atom.t_bin = tb;
        atom.t_lo = tb * bin_dt;
        atom.t_hi = (tb + 1) * bin_dt;
        atom.mass = per_bin[tb];

        // bracketing snapshots
        const std::pair<double, KineticFunction>* before = nullptr;
        const std::pair<double, KineticFunction>* after = nullptr;
        for (const auto& snap : f_snapshots) {
            if (snap.first <= atom.t_lo && (!before || snap.first > before->first))
                before = &snap;
            if (snap.first >= atom.t_hi && (!after || snap.first < after->first))
                after = &snap;
        }
        if (before && after) {
            for (const TestFunction& phi : tests) {
                const KineticFunction& fm = before->second;
                const KineticFunction& fp = after->second;
                double lhs = 0.0;
                for (std::size_t x = 0; x < fm.nx(); ++x) {
                    const auto xy = fm.grid.coords(x);
                    double inner = 0.0;
                    for (int j = 0; j < fm.xi.bins; ++j)
                        inner += (fp.at(x, j) - fm.at(x, j)) * phi.gamma(fm.xi.center(j));
                    lhs += phi.alpha(xy[0], xy[1]) * inner * fm.xi.dxi * cell;
                }
                double rhs = 0.0;  // -m({t})(d_xi phi) over the flagged bin
                for (std::size_t x = 0; x < m.grid().size(); ++x) {
                    const auto xy = m.grid().coords(x);
                    for (int j = 0; j < m.xi().bins; ++j) {
                        const double w = m.weight(x, tb, j);
                        if (w != 0.0)
                            rhs -= w * phi.alpha(xy[0], xy[1]) * phi.dgamma(m.xi().center(j));
                    }
                }
                atom.defect = std::max(atom.defect, std::abs(lhs - rhs));
            }
        }
        atoms.push_back(atom);
    }
    return atoms;
}

}  // namespace sscl
