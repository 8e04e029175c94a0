#include "sscl/noise.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

#include "sscl/rng.hpp"

namespace sscl {

namespace {

// sup |s| and Lipschitz constant of each state shape.
void shape_constants(const NoiseSpec& spec, double& sup, double& lip) {
    switch (spec.shape) {
        case NoiseShape::unit:     sup = 1.0; lip = 0.0; return;
        case NoiseShape::sine:     sup = 1.0; lip = 1.0; return;
        case NoiseShape::rational: sup = 0.5; lip = 1.0; return;
        case NoiseShape::clamp:    sup = spec.clamp_M; lip = 1.0; return;
    }
    sup = 0.0;
    lip = 0.0;
}

}  // namespace

NoiseModel::NoiseModel(const NoiseSpec& spec) : spec_(spec) {
    if (spec.K < 0) throw std::invalid_argument("NoiseModel: K must be >= 0");
    if (spec.K > 0 && spec.decay_q < 1.0)
        throw std::invalid_argument("NoiseModel: decay_q must be >= 1");
    if (spec.alpha <= 0.0 || spec.alpha > 1.0)
        throw std::invalid_argument("NoiseModel: alpha must lie in (0,1]");
    double sup = 1.0;
    shape_constants(spec_, sup, lip_u_);
    if (spec_.kind == NoiseKind::additive) {
        lip_u_ = 0.0;
        sup = 1.0;
    }
    double sum_a2 = 0.0, sum_a2k2 = 0.0;
    for (int k = 1; k <= spec_.K; ++k) {
        const double ak = mode_amplitude(k);
        const auto kv = wavevector(k);
        sum_a2 += ak * ak;
        sum_a2k2 += ak * ak * (kv[0] * kv[0] + kv[1] * kv[1]);
    }
    if (spec_.kind == NoiseKind::none || spec_.K == 0) {
        D0_ = 0.0;
        D1_ = 0.0;
        return;
    }
    if (spec_.kind == NoiseKind::additive) {
        D0_ = sum_a2;
        D1_ = 4.0 * M_PI * M_PI * sum_a2k2;
    } else {
        D0_ = sum_a2 * sup * sup;
        const double spatial = 8.0 * M_PI * M_PI * sum_a2k2 * sup * sup;
        const double state = 2.0 * sum_a2 * std::max(lip_u_ * lip_u_, 4.0 * sup * sup);
        D1_ = std::max(spatial, state);
    }
}

double NoiseModel::h(double r) const { return std::pow(std::abs(r), spec_.alpha); }

std::array<double, 2> NoiseModel::wavevector(int k) const {
    if (spec_.mean_mode) --k;  // mode 1 becomes the spatially uniform mode
    if (spec_.dim == 1) return {static_cast<double>(k), 0.0};
    // Round-robin over the axes in 2D.
    if (k % 2 == 1) return {static_cast<double>((k + 1) / 2), 0.0};
    return {0.0, static_cast<double>(k / 2)};
}

double NoiseModel::mode_amplitude(int k) const {
    return spec_.amplitude * std::pow(static_cast<double>(k), -spec_.decay_q);
}

double NoiseModel::shape_value(double u) const {
    if (spec_.kind != NoiseKind::multiplicative) return 1.0;
    switch (spec_.shape) {
        case NoiseShape::unit:     return 1.0;
        case NoiseShape::sine:     return std::sin(u);
        case NoiseShape::rational: return u / (1.0 + u * u);
        case NoiseShape::clamp:    return std::clamp(u, -spec_.clamp_M, spec_.clamp_M);
    }
    return 0.0;
}

double NoiseModel::g(int k, double x1, double x2, double u) const {
    const std::array<double, 2> kv = wavevector(k);
    const double phase = kv[0] * x1 + kv[1] * x2;
    return mode_amplitude(k) * std::cos(2.0 * M_PI * phase) * shape_value(u);
}

double NoiseModel::G2(double x1, double x2, double u) const {
    double s = 0.0;
    for (int k = 1; k <= spec_.K; ++k) {
        const double v = g(k, x1, x2, u);
        s += v * v;
    }
    assert(s <= D0_ * (1.0 + u * u) * (1.0 + 1e-12) + 1e-300);
    return s;
}

BoundReport verify_D0(const NoiseModel& m, double u_range, int n_samples) {
    BoundReport rep;
    const int nx = 64;
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < nx; j += 8)
            for (int s = 0; s < n_samples; ++s) {
                const double x1 = static_cast<double>(i) / nx;
                const double x2 = static_cast<double>(j) / nx;
                const double u = -u_range + 2.0 * u_range * s / std::max(1, n_samples - 1);
                double g2 = 0.0;
                for (int k = 1; k <= m.K(); ++k) {
                    const double v = m.g(k, x1, x2, u);
                    g2 += v * v;
                }
                rep.max_ratio = std::max(rep.max_ratio, g2 / (1.0 + u * u));
            }
    rep.pass = rep.max_ratio <= m.D0() * (1.0 + 1e-12);
    return rep;
}

std::vector<std::pair<SamplePoint, SamplePoint>> default_d1_lattice(int dim) {
    std::vector<SamplePoint> pts;
    const int nx = 17, nu = 17;
    for (int i = 0; i < nx; ++i)
        for (int s = 0; s < nu; ++s) {
            SamplePoint p;
            p.x1 = static_cast<double>(i) / nx;
            p.x2 = dim == 2 ? std::fmod(0.37 * i, 1.0) : 0.0;
            p.u = -3.0 + 6.0 * s / (nu - 1);
            pts.push_back(p);
        }
    std::vector<std::pair<SamplePoint, SamplePoint>> pairs;
    for (std::size_t a = 0; a < pts.size(); a += 3)
        for (std::size_t b = a + 1; b < pts.size(); b += 5)
            pairs.emplace_back(pts[a], pts[b]);
    return pairs;
}

BoundReport verify_D1(const NoiseModel& m,
                      const std::vector<std::pair<SamplePoint, SamplePoint>>& pairs) {
    BoundReport rep;
    auto torus_d2 = [](const SamplePoint& p, const SamplePoint& q) {
        auto wrap = [](double d) {
            d = std::abs(d);
            d -= std::floor(d);
            return std::min(d, 1.0 - d);
        };
        const double d1 = wrap(p.x1 - q.x1), d2 = wrap(p.x2 - q.x2);
        return d1 * d1 + d2 * d2;
    };
    for (const auto& [p, q] : pairs) {
        const double dx2 = torus_d2(p, q);
        const double du = std::abs(p.u - q.u);
        const double denom = dx2 + du * m.h(du);
        if (denom == 0.0) continue;  // degenerate pair, skipped by convention
        double num = 0.0;
        for (int k = 1; k <= m.K(); ++k) {
            const double d = m.g(k, p.x1, p.x2, p.u) - m.g(k, q.x1, q.x2, q.u);
            num += d * d;
        }
        rep.max_ratio = std::max(rep.max_ratio, num / denom);
    }
    rep.pass = rep.max_ratio <= m.D1() * (1.0 + 1e-12);
    return rep;
}

NoiseModel build_noise_model(const NoiseSpec& spec) {
    NoiseModel m(spec);
    if (m.K() == 0) return m;
    const BoundReport d0 = verify_D0(m, 6.0, 41);
    if (!d0.pass)
        throw std::runtime_error("build_noise_model: declared D0 fails verification");
    const BoundReport d1 = verify_D1(m, default_d1_lattice(spec.dim));
    if (!d1.pass)
        throw std::runtime_error("build_noise_model: declared D1 fails verification");
    return m;
}

IncrementBatch sample_increments(const NoiseModel& m, double dt,
                                 std::uint64_t path_seed, std::uint64_t step_index) {
    if (dt <= 0.0) throw std::invalid_argument("sample_increments: dt must be positive");
    IncrementBatch b;
    b.dt = dt;
    b.path_seed = path_seed;
    b.step_index = step_index;
    b.dbeta.resize(m.K());
    const double root_dt = std::sqrt(dt);
    for (int k = 0; k < m.K(); ++k)
        b.dbeta[k] = root_dt * gaussian(path_seed, step_index, static_cast<std::uint64_t>(k));
    return b;
}

std::vector<GridField> diffusion_apply(const NoiseModel& m, const GridField& u) {
    std::vector<GridField> out;
    out.reserve(m.K());
    for (int k = 1; k <= m.K(); ++k) {
        GridField f(u.grid);
        for (std::size_t s = 0; s < u.size(); ++s) {
            const auto xy = u.grid.coords(s);
            f.values[s] = m.g(k, xy[0], xy[1], u.values[s]);
        }
        out.push_back(std::move(f));
    }
    return out;
}

double g2_l2(const NoiseModel& m, const GridField& u) {
    const double cell = std::pow(u.grid.dx, u.grid.dim);
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const auto xy = u.grid.coords(i);
        s += m.G2(xy[0], xy[1], u.values[i]) * cell;
    }
    return s;
}

}  // namespace sscl
