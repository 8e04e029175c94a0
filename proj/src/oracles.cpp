#include "sscl/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sscl {

StepKineticFunction StepKineticFunction::from_heavisides(
    std::vector<std::pair<double, double>> wu) {
    if (wu.empty()) throw std::invalid_argument("from_heavisides: empty mixture");
    double total = 0.0;
    for (auto& [w, u] : wu) {
        if (w < 0.0) throw std::invalid_argument("from_heavisides: negative weight");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw std::invalid_argument("from_heavisides: weights must sum to 1");
    std::sort(wu.begin(), wu.end(),
              [](const auto& a, const auto& b) { return a.second < b.second; });
    StepKineticFunction f;
    double level = 1.0;
    for (std::size_t i = 0; i < wu.size(); ++i) {
        // merge coincident jump locations
        if (!f.breaks.empty() && wu[i].second == f.breaks.back()) {
            level -= wu[i].first;
            f.levels.back() = level;
            continue;
        }
        f.breaks.push_back(wu[i].second);
        level -= wu[i].first;
        f.levels.push_back(level);
    }
    f.levels.insert(f.levels.begin(), 1.0);
    f.levels.back() = 0.0;  // clamp rounding
    return f;
}

double StepKineticFunction::eval(double xi) const {
    std::size_t piece = 0;
    while (piece < breaks.size() && xi >= breaks[piece]) ++piece;
    return levels[piece];
}

double StepKineticFunction::state() const {
    // integral of chi = f - 1_{0>xi}; chi vanishes outside [min(b,0), max(b,0)]
    double u = 0.0;
    const double lo = std::min(breaks.front(), 0.0), hi = std::max(breaks.back(), 0.0);
    std::vector<double> cuts = breaks;
    cuts.push_back(0.0);
    cuts.push_back(lo);
    cuts.push_back(hi);
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double a = cuts[i], b = cuts[i + 1];
        if (b <= a) continue;
        const double mid = 0.5 * (a + b);
        u += (eval(mid) - (mid < 0.0 ? 1.0 : 0.0)) * (b - a);
    }
    return u;
}

double StepKineticFunction::lower_integral_against(double u0, double xi) const {
    // int_{-infty}^{xi} (1_{u0>zeta} - f(zeta)) dzeta; the integrand vanishes
    // below min(breaks, u0) where both terms equal 1.
    const double lo = std::min(breaks.front(), u0);
    if (xi <= lo) return 0.0;
    std::vector<double> cuts = breaks;
    cuts.push_back(u0);
    cuts.push_back(lo);
    cuts.push_back(xi);
    std::sort(cuts.begin(), cuts.end());
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double a = std::max(cuts[i], lo), b = std::min(cuts[i + 1], xi);
        if (b <= a) continue;
        const double mid = 0.5 * (a + b);
        acc += ((u0 > mid ? 1.0 : 0.0) - eval(mid)) * (b - a);
    }
    return acc;
}

bool StepKineticFunction::is_indicator(double tol) const {
    for (double l : levels)
        if (std::min(std::abs(l), std::abs(l - 1.0)) > tol) return false;
    return true;
}

std::vector<double> StepKineticFunction::sample(const XiGrid& xi) const {
    std::vector<double> v(xi.bins);
    for (int j = 0; j < xi.bins; ++j) v[j] = eval(xi.center(j));
    return v;
}

StepKineticFunction mix(double a, const StepKineticFunction& f,
                        const StepKineticFunction& g) {
    StepKineticFunction out;
    out.breaks = f.breaks;
    out.breaks.insert(out.breaks.end(), g.breaks.begin(), g.breaks.end());
    std::sort(out.breaks.begin(), out.breaks.end());
    out.breaks.erase(std::unique(out.breaks.begin(), out.breaks.end()), out.breaks.end());
    out.levels.resize(out.breaks.size() + 1);
    for (std::size_t i = 0; i <= out.breaks.size(); ++i) {
        const double probe = i == 0 ? out.breaks.front() - 1.0
                             : i == out.breaks.size()
                                 ? out.breaks.back() + 1.0
                                 : 0.5 * (out.breaks[i - 1] + out.breaks[i]);
        out.levels[i] = a * f.eval(probe) + (1.0 - a) * g.eval(probe);
    }
    return out;
}

StepKineticFunction collapse_exact(const StepKineticFunction& f0, double t) {
    const double u0 = f0.state();
    const StepKineticFunction target = StepKineticFunction::from_heavisides({{1.0, u0}});
    return mix(std::exp(-t), f0, target);
}

std::vector<double> collapse_numeric(const StepKineticFunction& f0, const XiGrid& xi,
                                     double t, double dt) {
    std::vector<double> f = f0.sample(xi);
    const auto steps = static_cast<std::size_t>(std::llround(t / dt));
    for (std::size_t n = 0; n < steps; ++n) {
        double u = 0.0;
        for (int j = 0; j < xi.bins; ++j)
            u += (f[j] - (xi.center(j) < 0.0 ? 1.0 : 0.0)) * xi.dxi;
        for (int j = 0; j < xi.bins; ++j)
            f[j] += dt * ((u > xi.center(j) ? 1.0 : 0.0) - f[j]);
    }
    return f;
}

double collapse_measure(const StepKineticFunction& f0, double t, double xi) {
    const StepKineticFunction ft = collapse_exact(f0, t);
    return ft.lower_integral_against(f0.state(), xi);
}

StepKineticFunction ErasedIntervalTrajectory::at(double t) const {
    return collapse_exact(f0, t <= t1 ? t : t + (t2 - t1));
}

double ErasedIntervalTrajectory::atom_cumulative(double xi) const {
    // int_{-infty}^{xi} (f(t2) - f(t1)) dzeta
    //   = (e^{-t1} - e^{-t2}) int_{-infty}^{xi} (1_{u0>z} - f0) dzeta  >= 0
    const double shrink = std::exp(-t1) - std::exp(-t2);
    return shrink * f0.lower_integral_against(f0.state(), xi);
}

double ErasedIntervalTrajectory::atom_mass() const {
    const double u0 = f0.state();
    const double lo = std::min(f0.breaks.front(), u0) - 1.0;
    const double hi = std::max(f0.breaks.back(), u0) + 1.0;
    const int nq = 4000;
    double acc = 0.0;
    const double h = (hi - lo) / nq;
    for (int i = 0; i < nq; ++i) acc += atom_cumulative(lo + (i + 0.5) * h) * h;
    return acc;
}

KineticMeasure ErasedIntervalTrajectory::bake_measure(const TorusGrid& grid, int t_bins,
                                                      const XiGrid& xi) const {
    KineticMeasure m(grid, t_bins, horizon, xi);
    const double dtb = horizon / t_bins;
    const double cell = std::pow(grid.dx, grid.dim);
    const double u0 = f0.state();
    // Continuous dissipation density m(t,xi) deposited at cell midpoints on
    // the spliced clock, then the time atom carried by t1's bin.
    for (int tb = 0; tb < t_bins; ++tb) {
        const double tc = (tb + 0.5) * dtb;
        const StepKineticFunction ft = at(tc);
        for (int j = 0; j < xi.bins; ++j) {
            const double density = ft.lower_integral_against(u0, xi.center(j));
            if (density <= 0.0) continue;
            const double w = density * dtb * xi.dxi * cell;
            for (std::size_t x = 0; x < grid.size(); ++x)
                m.deposit(x, tc, xi.center(j), w);
        }
    }
    for (int j = 0; j < xi.bins; ++j) {
        const double density = atom_cumulative(xi.center(j));
        if (density <= 0.0) continue;
        const double w = density * xi.dxi * cell;
        for (std::size_t x = 0; x < grid.size(); ++x) m.deposit(x, t1, xi.center(j), w);
    }
    return m;
}

std::vector<std::pair<double, KineticFunction>> ErasedIntervalTrajectory::snapshots(
    const TorusGrid& grid, const XiGrid& xi, int count) const {
    std::vector<std::pair<double, KineticFunction>> out;
    for (int i = 0; i < count; ++i) {
        const double t = horizon * i / (count - 1);
        out.emplace_back(t, broadcast(at(t), grid, xi));
    }
    return out;
}

ErasedIntervalTrajectory erased_interval_example(const StepKineticFunction& f0, double t1,
                                                 double t2, double horizon) {
    if (t2 < t1) throw std::invalid_argument("erased_interval_example: t2 < t1");
    ErasedIntervalTrajectory traj;
    traj.f0 = f0;
    traj.t1 = t1;
    traj.t2 = t2;
    traj.horizon = horizon;
    return traj;
}

double burgers_riemann(double uL, double uR, double x, double t) {
    if (uL == uR) return uL;
    if (t <= 0.0) return x < 0.0 ? uL : uR;
    if (uL > uR) {  // shock, Rankine-Hugoniot speed
        const double s = 0.5 * (uL + uR);
        return x < s * t ? uL : uR;
    }
    // rarefaction fan
    return std::clamp(x / t, uL, uR);
}

KineticFunction broadcast(const StepKineticFunction& f, const TorusGrid& grid,
                          const XiGrid& xi) {
    KineticFunction out;
    out.grid = grid;
    out.xi = xi;
    out.values.resize(grid.size() * xi.bins);
    const std::vector<double> fiber = f.sample(xi);
    for (std::size_t x = 0; x < grid.size(); ++x)
        for (int j = 0; j < xi.bins; ++j) out.at(x, j) = fiber[j];
    return out;
}

}  // namespace sscl
