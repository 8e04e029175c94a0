#include "sscl/kinetic.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "sscl/quadrature.hpp"

namespace sscl {

XiGrid make_xi_grid(double lo, double hi, int bins) {
    if (bins < 4) throw std::invalid_argument("make_xi_grid: need at least 4 bins");
    if (!(lo < 0.0 && hi > 0.0))
        throw std::invalid_argument("make_xi_grid: range must strictly bracket 0");
    const double dxi = (hi - lo) / bins;
    // Snap so the origin lands on an edge; keeps at least the requested span.
    const int below = std::max(1, static_cast<int>(std::ceil(-lo / dxi - 1e-12)));
    const int above = std::max(1, static_cast<int>(std::ceil(hi / dxi - 1e-12)));
    XiGrid g;
    g.dxi = dxi;
    g.lo = -below * dxi;
    g.bins = below + above;
    return g;
}

XiGrid xi_grid_for_range(double u_min, double u_max, int bins, double margin_frac) {
    const double lo0 = std::min(u_min, 0.0), hi0 = std::max(u_max, 0.0);
    const double span = std::max(hi0 - lo0, 1e-6);
    const double pad = std::max(margin_frac * span, 2.5 * span / bins);
    return make_xi_grid(lo0 - pad, hi0 + pad, bins);
}

KineticFunction kinetic_function(const GridField& u, const XiGrid& xi) {
    KineticFunction f;
    f.grid = u.grid;
    f.xi = xi;
    f.values.assign(u.size() * xi.bins, 0.0);
    for (std::size_t x = 0; x < u.size(); ++x)
        for (int j = 0; j < xi.bins; ++j)
            f.at(x, j) = u.values[x] > xi.center(j) ? 1.0 : 0.0;
    return f;
}

double chi_value(const KineticFunction& f, std::size_t x, int j) {
    return f.at(x, j) - (f.xi.center(j) < 0.0 ? 1.0 : 0.0);
}

std::vector<double> chi(const KineticFunction& f) {
    std::vector<double> c(f.values.size());
    for (std::size_t x = 0; x < f.nx(); ++x)
        for (int j = 0; j < f.xi.bins; ++j)
            c[x * f.xi.bins + j] = chi_value(f, x, j);
    return c;
}

GridField reconstruct_u(const KineticFunction& f) {
    GridField u(f.grid);
    for (std::size_t x = 0; x < f.nx(); ++x) {
        double s = 0.0;
        for (int j = 0; j < f.xi.bins; ++j) s += chi_value(f, x, j);
        u.values[x] = s * f.xi.dxi;
    }
    return u;
}

KineticFunctionCheck check_kinetic_function(const KineticFunction& f) {
    KineticFunctionCheck out;
    for (std::size_t x = 0; x < f.nx(); ++x) {
        double mass = 0.0;
        for (int j = 0; j < f.xi.bins; ++j) {
            const double v = f.at(x, j);
            if (v < -1e-12 || v > 1.0 + 1e-12) out.range_ok = false;
            if (j > 0 && f.at(x, j) > f.at(x, j - 1) + 1e-12) out.monotone = false;
        }
        if (f.at(x, 0) < 1.0 - 1e-12 || f.at(x, f.xi.bins - 1) > 1e-12) out.saturated = false;
        // fiber of -d_xi f: differences across bins plus the boundary values
        mass = f.at(x, 0) - f.at(x, f.xi.bins - 1);
        out.max_fiber_mass_error = std::max(out.max_fiber_mass_error, std::abs(mass - 1.0));
    }
    return out;
}

KineticMeasure::KineticMeasure(const TorusGrid& grid, int t_bins, double t_end,
                               const XiGrid& xi)
    : grid_(grid), t_bins_(t_bins), t_end_(t_end), xi_(xi) {
    if (t_bins < 1 || t_end <= 0.0)
        throw std::invalid_argument("KineticMeasure: bad time geometry");
    w_.assign(grid.size() * t_bins * xi.bins, 0.0);
}

void KineticMeasure::widen_to(double xi) {
    // Extend by whole bins on the escaping side, preserving dxi.
    int extra_lo = 0, extra_hi = 0;
    if (xi < xi_.lo) extra_lo = static_cast<int>(std::ceil((xi_.lo - xi) / xi_.dxi)) + 1;
    if (xi >= xi_.hi()) extra_hi = static_cast<int>(std::ceil((xi - xi_.hi()) / xi_.dxi)) + 1;
    XiGrid wider = xi_;
    wider.lo = xi_.lo - extra_lo * xi_.dxi;
    wider.bins = xi_.bins + extra_lo + extra_hi;
    std::vector<double> nw(grid_.size() * t_bins_ * wider.bins, 0.0);
    for (std::size_t x = 0; x < grid_.size(); ++x)
        for (int tb = 0; tb < t_bins_; ++tb)
            for (int j = 0; j < xi_.bins; ++j)
                nw[(x * t_bins_ + tb) * wider.bins + j + extra_lo] =
                    w_[(x * t_bins_ + tb) * xi_.bins + j];
    if (!widened_) {
        std::fprintf(stderr,
                     "kinetic measure: state escaped the xi range, widening to [%g,%g)\n",
                     wider.lo, wider.edge(wider.bins));
        widened_ = true;
    }
    xi_ = wider;
    w_.swap(nw);
}

void KineticMeasure::deposit(std::size_t x_cell, double t, double xi, double weight) {
    if (weight == 0.0) return;
    if (weight < 0.0) throw std::invalid_argument("KineticMeasure: negative weight");
    if (!xi_.contains(xi)) widen_to(xi);
    int tb = static_cast<int>(std::floor(t / t_end_ * t_bins_));
    tb = tb < 0 ? 0 : (tb >= t_bins_ ? t_bins_ - 1 : tb);
    w_[(x_cell * t_bins_ + tb) * xi_.bins + xi_.bin_of(xi)] += weight;
}

void KineticMeasure::merge(const KineticMeasure& other) {
    if (other.grid_.size() != grid_.size() || other.t_bins_ != t_bins_)
        throw std::invalid_argument("KineticMeasure::merge: incompatible geometry");
    // Align xi grids by widening both ways.
    if (other.xi_.lo < xi_.lo) widen_to(other.xi_.lo + 0.5 * xi_.dxi);
    if (other.xi_.hi() > xi_.hi()) widen_to(other.xi_.hi() - 0.5 * xi_.dxi);
    const int shift = static_cast<int>(std::llround((other.xi_.lo - xi_.lo) / xi_.dxi));
    for (std::size_t x = 0; x < grid_.size(); ++x)
        for (int tb = 0; tb < t_bins_; ++tb)
            for (int j = 0; j < other.xi_.bins; ++j)
                w_[(x * t_bins_ + tb) * xi_.bins + j + shift] +=
                    other.w_[(x * t_bins_ + tb) * other.xi_.bins + j];
}

double KineticMeasure::total_mass() const {
    double s = 0.0;
    for (double v : w_) s += v;
    return s;
}

double KineticMeasure::moment(double p) const {
    double s = 0.0;
    for (std::size_t x = 0; x < grid_.size(); ++x)
        for (int tb = 0; tb < t_bins_; ++tb)
            for (int j = 0; j < xi_.bins; ++j)
                s += std::pow(std::abs(xi_.center(j)), p) *
                     w_[(x * t_bins_ + tb) * xi_.bins + j];
    return s;
}

double KineticMeasure::tail_mass(double R) const {
    double s = 0.0;
    for (std::size_t x = 0; x < grid_.size(); ++x)
        for (int tb = 0; tb < t_bins_; ++tb)
            for (int j = 0; j < xi_.bins; ++j)
                if (std::abs(xi_.center(j)) >= R)
                    s += w_[(x * t_bins_ + tb) * xi_.bins + j];
    return s;
}

std::vector<double> KineticMeasure::mass_per_t_bin() const {
    std::vector<double> out(t_bins_, 0.0);
    for (std::size_t x = 0; x < grid_.size(); ++x)
        for (int tb = 0; tb < t_bins_; ++tb)
            for (int j = 0; j < xi_.bins; ++j)
                out[tb] += w_[(x * t_bins_ + tb) * xi_.bins + j];
    return out;
}

double KineticMeasure::pair_with(
    const std::function<double(double, double, double, double)>& phi) const {
    double s = 0.0;
    for (std::size_t x = 0; x < grid_.size(); ++x) {
        const auto xy = grid_.coords(x);
        for (int tb = 0; tb < t_bins_; ++tb)
            for (int j = 0; j < xi_.bins; ++j) {
                const double w = w_[(x * t_bins_ + tb) * xi_.bins + j];
                if (w != 0.0) s += w * phi(xy[0], xy[1], t_center(tb), xi_.center(j));
            }
    }
    return s;
}

TailReport measure_tail(const KineticMeasure& m, double R, double p) {
    return {m.tail_mass(R), m.moment(p)};
}

EmpiricalYoungMeasure EmpiricalYoungMeasure::from_field(const GridField& u) {
    EmpiricalYoungMeasure nu;
    nu.grid = u.grid;
    nu.atomic = true;
    nu.atoms = u.values;
    return nu;
}

EmpiricalYoungMeasure EmpiricalYoungMeasure::from_histogram(const TorusGrid& g,
                                                            const XiGrid& xi,
                                                            std::vector<double> fibers) {
    if (fibers.size() != g.size() * static_cast<std::size_t>(xi.bins))
        throw std::invalid_argument("EmpiricalYoungMeasure: fiber size mismatch");
    EmpiricalYoungMeasure nu;
    nu.grid = g;
    nu.atomic = false;
    nu.hist_xi = xi;
    nu.hist = std::move(fibers);
    return nu;
}

double EmpiricalYoungMeasure::fiber_mass_error() const {
    if (atomic) return 0.0;
    double worst = 0.0;
    for (std::size_t x = 0; x < grid.size(); ++x) {
        double m = 0.0;
        for (int j = 0; j < hist_xi.bins; ++j) m += hist[x * hist_xi.bins + j];
        worst = std::max(worst, std::abs(m - 1.0));
    }
    return worst;
}

double young_moment(const EmpiricalYoungMeasure& nu, double p) {
    const double cell = std::pow(nu.grid.dx, nu.grid.dim);
    double s = 0.0;
    if (nu.atomic) {
        for (double a : nu.atoms) s += std::pow(std::abs(a), p) * cell;
    } else {
        for (std::size_t x = 0; x < nu.grid.size(); ++x)
            for (int j = 0; j < nu.hist_xi.bins; ++j)
                s += std::pow(std::abs(nu.hist_xi.center(j)), p) *
                     nu.hist[x * nu.hist_xi.bins + j] * cell;
    }
    return s;
}

double pair_kinetic(const KineticFunction& f, const SeparableObservable& H) {
    const double cell = std::pow(f.grid.dx, f.grid.dim);
    double s = 0.0;
    for (std::size_t x = 0; x < f.nx(); ++x) {
        const auto xy = f.grid.coords(x);
        double inner = 0.0;
        for (int j = 0; j < f.xi.bins; ++j) inner += f.at(x, j) * H.g(f.xi.center(j));
        s += H.h(xy[0], xy[1]) * inner * f.xi.dxi * cell;
    }
    return s;
}

ConvergenceReport weak_convergence_check(const std::vector<KineticFunction>& seq,
                                         const KineticFunction& candidate,
                                         const std::vector<SeparableObservable>& tests) {
    ConvergenceReport rep;
    rep.gaps.resize(tests.size());
    for (std::size_t t = 0; t < tests.size(); ++t) {
        const double target = pair_kinetic(candidate, tests[t]);
        for (const auto& f : seq)
            rep.gaps[t].push_back(std::abs(pair_kinetic(f, tests[t]) - target));
        if (!rep.gaps[t].empty())
            rep.final_max_gap = std::max(rep.final_max_gap, rep.gaps[t].back());
    }
    return rep;
}

// --------------------------------------------------------------------------
// Separable test functions

double TestFunction::alpha(double x1, double x2) const {
    if (wave[0] == 0 && wave[1] == 0) return 1.0;
    const double phase = 2.0 * M_PI * (wave[0] * x1 + wave[1] * x2);
    return sine ? std::sin(phase) : std::cos(phase);
}

std::array<double, 2> TestFunction::grad_alpha(double x1, double x2) const {
    if (wave[0] == 0 && wave[1] == 0) return {0.0, 0.0};
    const double phase = 2.0 * M_PI * (wave[0] * x1 + wave[1] * x2);
    const double d = sine ? std::cos(phase) : -std::sin(phase);
    return {2.0 * M_PI * wave[0] * d, 2.0 * M_PI * wave[1] * d};
}

double TestFunction::lap_alpha(double x1, double x2) const {
    if (wave[0] == 0 && wave[1] == 0) return 0.0;
    const double k2 = 4.0 * M_PI * M_PI *
                      (wave[0] * wave[0] + wave[1] * wave[1]);
    return -k2 * alpha(x1, x2);
}

double TestFunction::beta(double t) const {
    const double r = 1.0 - t / horizon;
    return r * r;
}

double TestFunction::dbeta(double t) const { return -2.0 * (1.0 - t / horizon) / horizon; }

double TestFunction::gamma(double xi) const {
    if (xi_constant) return 1.0;
    const double s = (xi - bump_center) / bump_width;
    if (std::abs(s) >= 1.0) return 0.0;
    const double q = 1.0 - s * s;
    return q * q;
}

double TestFunction::dgamma(double xi) const {
    if (xi_constant) return 0.0;
    const double s = (xi - bump_center) / bump_width;
    if (std::abs(s) >= 1.0) return 0.0;
    return -4.0 * s * (1.0 - s * s) / bump_width;
}

double TestFunction::gamma_cum(double u) const {
    if (xi_constant) return u;
    auto prim = [&](double xi) {  // antiderivative of the bump in s-units
        double s = (xi - bump_center) / bump_width;
        s = std::clamp(s, -1.0, 1.0);
        return bump_width * (s - 2.0 * s * s * s / 3.0 + std::pow(s, 5) / 5.0);
    };
    return prim(u) - prim(0.0);
}

double TestFunction::flux_cum(const FluxModel& flux, double u) const {
    if (xi_constant) return flux.A(u) - flux.A(0.0);
    if (u == 0.0) return 0.0;
    // integrand a(xi) gamma(xi) is polynomial on the bump support
    const double lo = std::min(0.0, u), hi = std::max(0.0, u);
    const double slo = std::max(lo, bump_center - bump_width);
    const double shi = std::min(hi, bump_center + bump_width);
    if (shi <= slo) return 0.0;
    auto integrand = [&](double xi) { return flux.a(xi) * gamma(xi); };
    const double v = gauss_legendre(integrand, slo, shi);
    return u < 0.0 ? -v : v;
}

}  // namespace sscl
