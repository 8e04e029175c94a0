#ifndef SSCL_GRID_HPP
#define SSCL_GRID_HPP

#include <array>
#include <cstddef>
#include <vector>

namespace sscl {

// Uniform periodic lattice on the unit torus, dim 1 or 2, spacing 1/n.
struct TorusGrid {
    int dim = 1;
    int n = 0;
    double dx = 0.0;
    double diameter = 0.0;  // sqrt(dim), diameter of the unit cell

    std::size_t size() const {
        std::size_t s = 1;
        for (int d = 0; d < dim; ++d) s *= static_cast<std::size_t>(n);
        return s;
    }
    int wrap(int i) const {
        int r = i % n;
        return r < 0 ? r + n : r;
    }
    // Row-major flat index from wrapped per-dimension indices.
    std::size_t index(int i, int j = 0) const {
        return dim == 1 ? static_cast<std::size_t>(wrap(i))
                        : static_cast<std::size_t>(wrap(i)) * n + wrap(j);
    }
    // Coordinates of a lattice point (cell corner convention x_i = i*dx).
    std::array<double, 2> coords(std::size_t flat) const {
        if (dim == 1) return {static_cast<double>(flat) * dx, 0.0};
        return {static_cast<double>(flat / n) * dx, static_cast<double>(flat % n) * dx};
    }
    bool operator==(const TorusGrid&) const = default;
};

TorusGrid build_grid(int dim, int n);

// Wrapped distance of a per-dimension index offset, in physical units.
double offset_distance(const TorusGrid& grid, int k1, int k2 = 0);

// Real-valued lattice function; values laid out row-major over wrapped indices.
struct GridField {
    TorusGrid grid;
    std::vector<double> values;

    GridField() = default;
    explicit GridField(const TorusGrid& g, double fill = 0.0)
        : grid(g), values(g.size(), fill) {}

    double& operator()(int i, int j = 0) { return values[grid.index(i, j)]; }
    double operator()(int i, int j = 0) const { return values[grid.index(i, j)]; }
    std::size_t size() const { return values.size(); }
};

// Throws if the field contains NaN/Inf.
void validate(const GridField& u, const char* where);

GridField make_field(const TorusGrid& grid, double (*fn)(double, double));

// Central differences, one component per dimension.
std::vector<GridField> gradient(const GridField& u);
// Pointwise |grad u|^2 without materializing the components.
GridField gradient_squared(const GridField& u);
GridField laplacian(const GridField& u);

double lp_norm(const GridField& u, double p);
double field_min(const GridField& u);
double field_max(const GridField& u);
double field_mean(const GridField& u);

// Integral of |u(x) - u(x+z)| dx for every index offset z; the common kernel
// behind both W^{sigma,1} semi-norms. OpenMP-parallel over offsets.
std::vector<double> modulus_table(const GridField& u);

enum class MollifierKind { triangular, smooth_bump };

// Regularizing kernel profile supported in the unit ball; normalized on the
// grid so its discrete mass is exactly 1.
struct Mollifier {
    MollifierKind kind = MollifierKind::triangular;
    double epsilon = 0.0;

    double shape(double r) const;        // raw profile at r = |z|/epsilon
    double shape_derivative(double r) const;
};

// Kernel baked onto a grid: rho[z] >= 0, sum rho dx^N = 1. Gradient uses the
// analytic profile derivative along the wrapped offset representative.
struct DiscreteKernel {
    TorusGrid grid;
    double epsilon = 0.0;
    std::vector<double> rho;     // per offset
    std::vector<double> grad1;   // signed d/dz_1 component
    std::vector<double> grad2;   // signed d/dz_2 component (dim 2)
    double sup = 0.0;
    double l1_grad = 0.0;        // sum |grad rho| dx^N

    double grad_dot(std::size_t offset, const std::array<double, 2>& dir) const {
        return grad1[offset] * dir[0] + (grid.dim == 2 ? grad2[offset] * dir[1] : 0.0);
    }
};

DiscreteKernel bake_kernel(const TorusGrid& grid, const Mollifier& m);

// p^sigma(u): double integral of |u(x)-u(y)| / d(x,y)^{N+sigma}, diagonal
// excluded, wrapped Euclidean distance.
double seminorm_p_sigma(const GridField& u, double sigma);
double seminorm_p_sigma(const std::vector<double>& table, const TorusGrid& grid, double sigma);

// p^sigma_rho(u): sup over a geometric epsilon ladder of
// eps^{-sigma} * integral |u(x)-u(y)| rho_eps(x-y).
struct SupLadderResult {
    double value = 0.0;
    double arg_epsilon = 0.0;
};
std::vector<double> epsilon_ladder(const TorusGrid& grid);
SupLadderResult seminorm_p_sigma_rho(const GridField& u, double sigma, MollifierKind kind);
SupLadderResult seminorm_p_sigma_rho(const std::vector<double>& table, const TorusGrid& grid,
                                     double sigma, MollifierKind kind,
                                     const std::vector<double>& ladder);

}  // namespace sscl

#endif
