#ifndef SSCL_NOISE_HPP
#define SSCL_NOISE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "sscl/grid.hpp"

namespace sscl {

enum class NoiseKind { none, additive, multiplicative };
enum class NoiseShape { unit, sine, rational, clamp };

struct NoiseSpec {
    NoiseKind kind = NoiseKind::none;
    int dim = 1;                   // spatial dimension the modes live on
    int K = 0;
    double amplitude = 0.0;
    double decay_q = 1.0;          // a_k = amplitude * k^{-q}, q >= 1
    NoiseShape shape = NoiseShape::sine;
    double alpha = 1.0;            // h(r) = r^alpha, alpha in (0,1]
    double clamp_M = 1.0;
    bool mean_mode = false;        // shift wavevectors so mode 1 is constant in x
};

// Finite family of forcing modes g_k(x,u) = a_k cos(2 pi k.x) s(u), with the
// structural constants D0, D1 and modulus h(r) = r^alpha attached. Modes are
// Lipschitz in u by construction, so no extra mollification of the forcing is
// needed anywhere downstream.
class NoiseModel {
  public:
    NoiseModel() = default;
    explicit NoiseModel(const NoiseSpec& spec);

    int K() const { return spec_.K; }
    bool multiplicative() const { return spec_.kind == NoiseKind::multiplicative; }
    double alpha() const { return spec_.alpha; }
    double D0() const { return D0_; }
    double D1() const { return D1_; }
    double h(double r) const;
    double lipschitz_u() const { return lip_u_; }
    const NoiseSpec& spec() const { return spec_; }

    // Mode k (1-based), evaluated at position (x1,x2) and state u.
    double g(int k, double x1, double x2, double u) const;
    double G2(double x1, double x2, double u) const;
    // Integer wavevector of mode k.
    std::array<double, 2> wavevector(int k) const;
    double mode_amplitude(int k) const;

  private:
    NoiseSpec spec_;
    double D0_ = 0.0;
    double D1_ = 0.0;
    double lip_u_ = 0.0;
    double shape_value(double u) const;
};

struct IncrementBatch {
    double dt = 0.0;
    std::uint64_t path_seed = 0;
    std::uint64_t step_index = 0;
    std::vector<double> dbeta;
};

struct BoundReport {
    double max_ratio = 0.0;
    bool pass = false;
};

// Verifies G^2(x,u) <= D0 (1+u^2) over a position/state sample sweep.
BoundReport verify_D0(const NoiseModel& m, double u_range, int n_samples);

// Verifies sum_k |g_k(x,u)-g_k(y,v)|^2 <= D1 (|x-y|^2 + |u-v| h(|u-v|)) on
// sample pairs; coincident pairs are skipped.
struct SamplePoint {
    double x1 = 0.0, x2 = 0.0, u = 0.0;
};
BoundReport verify_D1(const NoiseModel& m,
                      const std::vector<std::pair<SamplePoint, SamplePoint>>& pairs);
// Documented default verification lattice (17 positions x 17 states each side).
std::vector<std::pair<SamplePoint, SamplePoint>> default_d1_lattice(int dim);

// Builds and verifies; throws if the declared constants fail verification.
NoiseModel build_noise_model(const NoiseSpec& spec);

// K independent N(0,dt) draws from the counter-based stream keyed by
// (path_seed, step_index, k). Same key, same batch.
IncrementBatch sample_increments(const NoiseModel& m, double dt,
                                 std::uint64_t path_seed, std::uint64_t step_index);

// Fields g_k(x, u(x)) for k = 1..K.
std::vector<GridField> diffusion_apply(const NoiseModel& m, const GridField& u);

// Integral of G^2(x, u(x)) dx over the grid.
double g2_l2(const NoiseModel& m, const GridField& u);

}  // namespace sscl

#endif
