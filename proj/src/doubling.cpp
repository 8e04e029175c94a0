#include "sscl/doubling.hpp"

#include <cmath>
#include <stdexcept>

#include "sscl/quadrature.hpp"

namespace sscl {

namespace {

// Triangular base on (-1,1) and its antiderivatives.
double tri(double s) { return std::abs(s) < 1.0 ? 1.0 - std::abs(s) : 0.0; }
double tri1(double s) {
    if (s <= -1.0) return 0.0;
    if (s <= 0.0) return 0.5 * (1.0 + s) * (1.0 + s);
    if (s <= 1.0) return 0.5 + s - 0.5 * s * s;
    return 1.0;
}
double tri2(double s) {
    if (s <= -1.0) return 0.0;
    if (s <= 0.0) return std::pow(1.0 + s, 3) / 6.0;
    if (s <= 1.0) return 1.0 / 6.0 + 0.5 * s + 0.5 * s * s - s * s * s / 6.0;
    return s;
}

// Quartic bump base (15/16)(1-s^2)^2 on (-1,1).
double quart(double s) {
    if (std::abs(s) >= 1.0) return 0.0;
    const double q = 1.0 - s * s;
    return 15.0 / 16.0 * q * q;
}
double quart1(double s) {
    if (s <= -1.0) return 0.0;
    if (s >= 1.0) return 1.0;
    return 15.0 / 16.0 * (s - 2.0 * s * s * s / 3.0 + std::pow(s, 5) / 5.0) + 0.5;
}
double quart2(double s) {
    if (s <= -1.0) return 0.0;
    if (s >= 1.0) return s;
    return 15.0 / 16.0 * (0.5 * s * s - std::pow(s, 4) / 6.0 + std::pow(s, 6) / 30.0) +
           0.5 * s + 5.0 / 32.0;
}

}  // namespace

double PsiPair::psi(double r) const {
    const double s = r / delta;
    return (base == PsiBase::triangular ? tri(s) : quart(s)) / delta;
}

double PsiPair::psi1(double r) const {
    const double s = r / delta;
    return base == PsiBase::triangular ? tri1(s) : quart1(s);
}

double PsiPair::psi2(double r) const {
    const double s = r / delta;
    return delta * (base == PsiBase::triangular ? tri2(s) : quart2(s));
}

double PsiPair::sup_base() const { return base == PsiBase::triangular ? 1.0 : 15.0 / 16.0; }

PsiPair build_psi(double delta, PsiBase base) {
    if (delta <= 0.0) throw std::invalid_argument("build_psi: delta must be positive");
    PsiPair p;
    p.base = base;
    p.delta = delta;
    p.C_psi = base == PsiBase::triangular ? 0.25 : 3.0 / (5.0 * std::sqrt(5.0));
    return p;
}

double doubled_integral(const KineticFunction& f1, const KineticFunction& f2,
                        const DiscreteKernel& rho, const PsiPair& psi) {
    if (!(f1.grid == f2.grid) || !(f1.xi == f2.xi))
        throw std::invalid_argument("doubled_integral: incompatible grids");
    if (!(rho.grid == f1.grid))
        throw std::invalid_argument("doubled_integral: kernel grid mismatch");
    const XiGrid& xi = f1.xi;
    const TorusGrid& g = f1.grid;
    const int m = xi.bins;
    const std::size_t nx = g.size();
    const double cell2 = std::pow(g.dx, 2 * g.dim);

    // Double-bin weights depend only on the bin offset on the uniform grid:
    // W(k) = psi2((k+1)dxi) - 2 psi2(k dxi) + psi2((k-1)dxi).
    const int kmax = static_cast<int>(std::ceil(psi.delta / xi.dxi)) + 1;
    std::vector<double> W(2 * kmax + 1);
    for (int k = -kmax; k <= kmax; ++k)
        W[k + kmax] = psi.psi2((k + 1) * xi.dxi) - 2.0 * psi.psi2(k * xi.dxi) +
                      psi.psi2((k - 1) * xi.dxi);

    // Single-bin cross terms, one per fiber.
    std::vector<double> chi1(nx * m), chi2(nx * m), s2(nx, 0.0), s3(nx, 0.0);
    for (std::size_t x = 0; x < nx; ++x)
        for (int j = 0; j < m; ++j) {
            chi1[x * m + j] = chi_value(f1, x, j);
            chi2[x * m + j] = chi_value(f2, x, j);
            s2[x] += chi1[x * m + j] * (psi.psi2(xi.edge(j + 1)) - psi.psi2(xi.edge(j)));
            s3[x] += chi2[x * m + j] * (psi.psi2(-xi.edge(j)) - psi.psi2(-xi.edge(j + 1)));
        }
    const double p20 = psi.psi2(0.0);

    double total = 0.0;
#pragma omp parallel for schedule(static) reduction(+ : total)
    for (std::size_t x = 0; x < nx; ++x) {
        double row = 0.0;
        for (std::size_t y = 0; y < nx; ++y) {
            // offset index of (x - y) in the kernel table
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
            double s1 = 0.0;
            for (int k = -kmax; k <= kmax; ++k) {
                const double w = W[k + kmax];
                if (w == 0.0) continue;
                double corr = 0.0;
                const int jlo = std::max(0, k), jhi = std::min(m, m + k);
                for (int j = jlo; j < jhi; ++j)
                    corr += chi1[x * m + j] * chi2[y * m + j - k];
                s1 += w * corr;
            }
            row += r * (-s1 + s2[x] - s3[y] + p20);
        }
        total += row * cell2;
    }
    return total;
}

double positive_part_l1(const GridField& u1, const GridField& u2) {
    if (!(u1.grid == u2.grid))
        throw std::invalid_argument("positive_part_l1: grid mismatch");
    const double cell = std::pow(u1.grid.dx, u1.grid.dim);
    double s = 0.0;
    for (std::size_t i = 0; i < u1.size(); ++i)
        s += std::max(0.0, u1.values[i] - u2.values[i]) * cell;
    return s;
}

ContractionValue contraction_functional(const std::vector<GridField>& u1_ensemble,
                                        const std::vector<GridField>& u2_ensemble) {
    if (u1_ensemble.size() != u2_ensemble.size() || u1_ensemble.empty())
        throw std::invalid_argument("contraction_functional: ensemble size mismatch");
    double sum = 0.0, sumsq = 0.0;
    for (std::size_t i = 0; i < u1_ensemble.size(); ++i) {
        const double v = positive_part_l1(u1_ensemble[i], u2_ensemble[i]);
        sum += v;
        sumsq += v * v;
    }
    const double n = static_cast<double>(u1_ensemble.size());
    ContractionValue out;
    out.mean = sum / n;
    out.stderr_ = std::sqrt(std::max(0.0, sumsq / n - out.mean * out.mean) / n);
    return out;
}

namespace {

// Iterates over the support of a Young-measure fiber.
template <typename F>
void for_fiber(const EmpiricalYoungMeasure& nu, std::size_t x, F&& body) {
    if (nu.atomic) {
        body(nu.atoms[x], 1.0);
    } else {
        for (int j = 0; j < nu.hist_xi.bins; ++j) {
            const double w = nu.hist[x * nu.hist_xi.bins + j];
            if (w != 0.0) body(nu.hist_xi.center(j), w);
        }
    }
}

double traj_time(const std::vector<YoungSlice>& traj) {
    double t = 0.0;
    for (const auto& s : traj) t += s.weight;
    return t;
}

double traj_moment(const std::vector<YoungSlice>& traj, bool first, double p) {
    // time-averaged p-moment
    double t = 0.0, acc = 0.0;
    for (const auto& s : traj) {
        acc += s.weight * young_moment(first ? s.nu1 : s.nu2, p);
        t += s.weight;
    }
    return t > 0.0 ? acc / t : 0.0;
}

}  // namespace

EstimateWithBound I_psi_estimate(const std::vector<YoungSlice>& traj,
                                 const DiscreteKernel& rho, const PsiPair& psi,
                                 const NoiseModel& noise) {
    const TorusGrid& g = rho.grid;
    const double cell2 = std::pow(g.dx, 2 * g.dim);
    const std::size_t nx = g.size();
    double value = 0.0;
    for (const auto& slice : traj) {
        double slice_val = 0.0;
#pragma omp parallel for schedule(static) reduction(+ : slice_val)
        for (std::size_t x = 0; x < nx; ++x) {
            const auto xc = g.coords(x);
            double row = 0.0;
            for (std::size_t y = 0; y < nx; ++y) {
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
                const auto yc = g.coords(y);
                double pair_sum = 0.0;
                for_fiber(slice.nu1, x, [&](double xi, double w1) {
                    for_fiber(slice.nu2, y, [&](double zeta, double w2) {
                        const double p = psi.psi(xi - zeta);
                        if (p == 0.0) return;
                        double modes = 0.0;
                        for (int k = 1; k <= noise.K(); ++k) {
                            const double d = noise.g(k, xc[0], xc[1], xi) -
                                             noise.g(k, yc[0], yc[1], zeta);
                            modes += d * d;
                        }
                        pair_sum += w1 * w2 * p * modes;
                    });
                });
                row += r * pair_sum;
            }
            slice_val += row;
        }
        value += 0.5 * slice_val * cell2 * slice.weight;
    }
    EstimateWithBound out;
    out.value = value;
    const double t = traj_time(traj);
    out.bound = 0.5 * t * noise.D1() * rho.epsilon * rho.epsilon / psi.delta;
    if (noise.multiplicative())
        out.bound += 0.5 * t * noise.D1() * psi.C_psi * noise.h(psi.delta);
    out.pass = out.value <= out.bound * (1.0 + 1e-12);
    return out;
}

namespace {

// signed antiderivative of |s|^{p-1}
double abs_power_prim(double x, int p) { return std::copysign(std::pow(std::abs(x), p), x) / p; }

}  // namespace

double upsilon(double xi, double zeta, const PsiPair& psi, const FluxModel& flux) {
    const double d = psi.delta;
    if (zeta >= xi + d) return 0.0;
    const int p = flux.growth_p;
    const double C = flux.growth_C;
    // inner(r) = int_zeta^{xi-r} Gamma(z+r, z) dz, in closed form via the
    // signed primitive of |s|^{p-1}.
    auto inner = [&](double r) {
        const double hi = xi - r;
        if (hi <= zeta) return 0.0;
        return C * ((hi - zeta) + abs_power_prim(xi, p) - abs_power_prim(zeta + r, p) +
                    abs_power_prim(hi, p) - abs_power_prim(zeta, p));
    };
    auto integrand = [&](double r) { return psi.psi(r) * std::abs(r) * inner(r); };
    // kinks: psi at 0, the primitives at r = -zeta and r = xi
    return piecewise_gauss(integrand, -d, std::min(d, xi - zeta), {0.0, -zeta, xi});
}

UpsilonCheck upsilon_check(double xi, double zeta, const PsiPair& psi,
                           const FluxModel& flux) {
    UpsilonCheck out;
    out.value = upsilon(xi, zeta, psi, flux);
    out.bound = flux.ffp_C *
                (1.0 + std::pow(std::abs(xi), flux.growth_p) +
                 std::pow(std::abs(zeta), flux.growth_p)) *
                psi.delta;
    out.pass = out.value <= out.bound * (1.0 + 1e-12);
    return out;
}

double irho_inner(double v, double w, const PsiPair& psi, const FluxModel& flux) {
    const double d = psi.delta;
    if (w >= v + d) return 0.0;
    // int_w^{v-r} (a(z+r) - a(z)) dz = A(v) - A(v-r) - A(w+r) + A(w)
    auto f = [&](double r) {
        const double hi = v - r;
        if (hi <= w) return 0.0;
        return psi.psi(r) * (flux.A(v) - flux.A(hi) - flux.A(w + r) + flux.A(w));
    };
    return piecewise_gauss(f, -d, std::min(d, v - w), {0.0});
}

EstimateWithBound I_rho_estimate(const std::vector<YoungSlice>& traj,
                                 const DiscreteKernel& rho, const PsiPair& psi,
                                 const FluxModel& flux) {
    const TorusGrid& g = rho.grid;
    const double cell2 = std::pow(g.dx, 2 * g.dim);
    const std::size_t nx = g.size();
    double value = 0.0;
    double l1_grad_proj = 0.0;
    {
        const double cell = std::pow(g.dx, g.dim);
        for (std::size_t off = 0; off < nx; ++off)
            l1_grad_proj += std::abs(rho.grad_dot(off, flux.direction)) * cell;
    }
    for (const auto& slice : traj) {
        double slice_val = 0.0;
#pragma omp parallel for schedule(static) reduction(+ : slice_val)
        for (std::size_t x = 0; x < nx; ++x) {
            double row = 0.0;
            for (std::size_t y = 0; y < nx; ++y) {
                std::size_t off;
                if (g.dim == 1) {
                    off = g.index(static_cast<int>(x) - static_cast<int>(y));
                } else {
                    const int x1 = static_cast<int>(x) / g.n, x2 = static_cast<int>(x) % g.n;
                    const int y1 = static_cast<int>(y) / g.n, y2 = static_cast<int>(y) % g.n;
                    off = g.index(x1 - y1, x2 - y2);
                }
                const double gd = rho.grad_dot(off, flux.direction);
                if (gd == 0.0) continue;
                double pair_sum = 0.0;
                for_fiber(slice.nu1, x, [&](double v, double w1) {
                    for_fiber(slice.nu2, y, [&](double w, double w2) {
                        pair_sum += w1 * w2 * irho_inner(v, w, psi, flux);
                    });
                });
                row += gd * pair_sum;
            }
            slice_val += row;
        }
        value += slice_val * cell2 * slice.weight;
    }
    EstimateWithBound out;
    out.value = value;
    const double t = traj_time(traj);
    const double m1 = traj_moment(traj, true, flux.growth_p);
    const double m2 = traj_moment(traj, false, flux.growth_p);
    out.bound = t * flux.ffp_C * psi.delta * l1_grad_proj * (1.0 + m1 + m2);
    out.pass = std::abs(out.value) <= out.bound * (1.0 + 1e-12);
    return out;
}

double combined_remainder(double t, double eps, double delta, const TorusGrid& grid,
                          MollifierKind kind, PsiBase base, const NoiseModel& noise,
                          const FluxModel& flux, double moment1, double moment2) {
    const DiscreteKernel rho = bake_kernel(grid, Mollifier{kind, eps});
    const PsiPair psi = build_psi(delta, base);
    double l1_grad_proj = 0.0;
    const double cell = std::pow(grid.dx, grid.dim);
    for (std::size_t off = 0; off < grid.size(); ++off)
        l1_grad_proj += std::abs(rho.grad_dot(off, flux.direction)) * cell;
    double r = t * flux.ffp_C * delta * l1_grad_proj * (1.0 + moment1 + moment2) +
               0.5 * t * noise.D1() * eps * eps / delta;
    if (noise.multiplicative()) r += 0.5 * t * noise.D1() * psi.C_psi * noise.h(delta);
    return r;
}

std::vector<SweepRow> bound_sweep(const std::vector<YoungSlice>& traj,
                                  const TorusGrid& grid, MollifierKind kind, PsiBase base,
                                  const NoiseModel& noise, const FluxModel& flux,
                                  const std::vector<double>& eps_ladder,
                                  const std::vector<double>& delta_ladder) {
    std::vector<SweepRow> rows;
    for (double eps : eps_ladder) {
        const DiscreteKernel rho = bake_kernel(grid, Mollifier{kind, eps});
        for (double delta : delta_ladder) {
            const PsiPair psi = build_psi(delta, base);
            SweepRow row;
            row.epsilon = eps;
            row.delta = delta;
            const EstimateWithBound ip = I_psi_estimate(traj, rho, psi, noise);
            const EstimateWithBound ir = I_rho_estimate(traj, rho, psi, flux);
            row.ipsi_value = ip.value;
            row.ipsi_bound = ip.bound;
            row.irho_value = ir.value;
            row.irho_bound = ir.bound;
            row.pass = ip.pass && ir.pass;
            rows.push_back(row);
        }
    }
    return rows;
}

}  // namespace sscl
