#include "sscl/reference.hpp"

#include <cmath>
#include <stdexcept>

namespace sscl::serial {

std::vector<double> modulus_table(const GridField& u) {
    const TorusGrid& g = u.grid;
    const double cell = std::pow(g.dx, g.dim);
    std::vector<double> table(g.size(), 0.0);
    if (g.dim == 1) {
        for (int k = 0; k < g.n; ++k) {
            double s = 0.0;
            for (int i = 0; i < g.n; ++i) s += std::abs(u(i) - u(i + k));
            table[k] = s * cell;
        }
    } else {
        for (int k1 = 0; k1 < g.n; ++k1)
            for (int k2 = 0; k2 < g.n; ++k2) {
                double s = 0.0;
                for (int i = 0; i < g.n; ++i)
                    for (int j = 0; j < g.n; ++j)
                        s += std::abs(u(i, j) - u(i + k1, j + k2));
                table[g.index(k1, k2)] = s * cell;
            }
    }
    return table;
}

double seminorm_p_sigma(const GridField& u, double sigma) {
    if (sigma <= 0.0 || sigma >= 1.0)
        throw std::invalid_argument("serial::seminorm_p_sigma: sigma outside (0,1)");
    const TorusGrid& g = u.grid;
    const double cell2 = std::pow(g.dx, 2 * g.dim);
    double acc = 0.0;
    const int n = g.n;
    if (g.dim == 1) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                if (i == j) continue;
                const double d = offset_distance(g, i - j);
                acc += std::abs(u(i) - u(j)) * std::pow(d, -(1.0 + sigma)) * cell2;
            }
    } else {
        for (int i1 = 0; i1 < n; ++i1)
            for (int i2 = 0; i2 < n; ++i2)
                for (int j1 = 0; j1 < n; ++j1)
                    for (int j2 = 0; j2 < n; ++j2) {
                        if (i1 == j1 && i2 == j2) continue;
                        const double d = offset_distance(g, i1 - j1, i2 - j2);
                        acc += std::abs(u(i1, i2) - u(j1, j2)) *
                               std::pow(d, -(2.0 + sigma)) * cell2;
                    }
    }
    return acc;
}

double doubled_integral(const KineticFunction& f1, const KineticFunction& f2,
                        const DiscreteKernel& rho, const PsiPair& psi) {
    if (!(f1.grid == f2.grid) || !(f1.xi == f2.xi))
        throw std::invalid_argument("serial::doubled_integral: incompatible grids");
    const TorusGrid& g = f1.grid;
    const XiGrid& xi = f1.xi;
    const double cell2 = std::pow(g.dx, 2 * g.dim);
    const double lo = xi.lo, hi = xi.hi();
    double acc = 0.0;
    for (std::size_t x = 0; x < g.size(); ++x)
        for (std::size_t y = 0; y < g.size(); ++y) {
            std::size_t off;
            if (g.dim == 1) {
                off = g.index(static_cast<int>(x) - static_cast<int>(y));
            } else {
                const int x1 = static_cast<int>(x) / g.n, x2 = static_cast<int>(x) % g.n;
                const int y1 = static_cast<int>(y) / g.n, y2 = static_cast<int>(y) % g.n;
                off = g.index(x1 - y1, x2 - y2);
            }
            const double r = rho.rho[off];
            if (r == 0.0) continue;
            double inner = 0.0;
            for (int i = 0; i < xi.bins; ++i) {
                if (f1.at(x, i) == 0.0) continue;
                for (int j = 0; j < xi.bins; ++j) {
                    const double fb = 1.0 - f2.at(y, j);
                    if (fb == 0.0) continue;
                    // exact integral of psi(xi - zeta) over bin_i x bin_j
                    const double w = psi.psi2(xi.edge(i + 1) - xi.edge(j)) -
                                     psi.psi2(xi.edge(i) - xi.edge(j)) -
                                     psi.psi2(xi.edge(i + 1) - xi.edge(j + 1)) +
                                     psi.psi2(xi.edge(i) - xi.edge(j + 1));
                    inner += f1.at(x, i) * fb * w;
                }
            }
            // off-grid tails where f1 = 1 (below) and 1 - f2 = 1 (above)
            for (int j = 0; j < xi.bins; ++j) {
                const double fb = 1.0 - f2.at(y, j);
                if (fb != 0.0)
                    inner += fb * (psi.psi2(lo - xi.edge(j)) - psi.psi2(lo - xi.edge(j + 1)));
            }
            for (int i = 0; i < xi.bins; ++i)
                if (f1.at(x, i) != 0.0)
                    inner += f1.at(x, i) *
                             (psi.psi2(xi.edge(i + 1) - hi) - psi.psi2(xi.edge(i) - hi));
            inner += psi.psi2(lo - hi);
            acc += r * inner * cell2;
        }
    return acc;
}

EstimateWithBound I_psi_estimate(const std::vector<YoungSlice>& traj,
                                 const DiscreteKernel& rho, const PsiPair& psi,
                                 const NoiseModel& noise) {
    // same contract as the parallel version; plain loops, atoms only
    const TorusGrid& g = rho.grid;
    const double cell2 = std::pow(g.dx, 2 * g.dim);
    double value = 0.0, t = 0.0;
    for (const auto& slice : traj) {
        t += slice.weight;
        if (!slice.nu1.atomic || !slice.nu2.atomic)
            throw std::invalid_argument("serial::I_psi_estimate: atoms only");
        double sv = 0.0;
        for (std::size_t x = 0; x < g.size(); ++x) {
            const auto xc = g.coords(x);
            for (std::size_t y = 0; y < g.size(); ++y) {
                std::size_t off;
                if (g.dim == 1) {
                    off = g.index(static_cast<int>(x) - static_cast<int>(y));
                } else {
                    const int x1 = static_cast<int>(x) / g.n, x2 = static_cast<int>(x) % g.n;
                    const int y1 = static_cast<int>(y) / g.n, y2 = static_cast<int>(y) % g.n;
                    off = g.index(x1 - y1, x2 - y2);
                }
                if (rho.rho[off] == 0.0) continue;
                const auto yc = g.coords(y);
                const double xi = slice.nu1.atoms[x], zeta = slice.nu2.atoms[y];
                const double p = psi.psi(xi - zeta);
                if (p == 0.0) continue;
                double modes = 0.0;
                for (int k = 1; k <= noise.K(); ++k) {
                    const double d =
                        noise.g(k, xc[0], xc[1], xi) - noise.g(k, yc[0], yc[1], zeta);
                    modes += d * d;
                }
                sv += rho.rho[off] * p * modes;
            }
        }
        value += 0.5 * sv * cell2 * slice.weight;
    }
    EstimateWithBound out;
    out.value = value;
    out.bound = 0.5 * t * noise.D1() * rho.epsilon * rho.epsilon / psi.delta;
    if (noise.multiplicative())
        out.bound += 0.5 * t * noise.D1() * psi.C_psi * noise.h(psi.delta);
    out.pass = out.value <= out.bound * (1.0 + 1e-12);
    return out;
}

}  // namespace sscl::serial
