#pragma once

#include <span>
#include <vector>

#include "fraclab/grid.hpp"

namespace fraclab {

/// Kernel c_{1,a} |x-y|^{-1-2a} of the fractional Laplacian on the line.
struct KernelSpec {
    double order = 0.5;          // a in (0,1)
    int dim = 1;
    double normalization = 0.0;  // c_{1,a}
};

/// c_{1,a} = 4^a a Gamma(a+1/2) / (sqrt(pi) Gamma(1-a)): the constant that
/// matches the singular integral to the Fourier symbol |xi|^{2a}.
double normalization_constant(double a);

KernelSpec make_kernel(double a);

/// w_i = (c_{1,a}/2a) * ((x_i-left)^{-2a} + (right-x_i)^{-2a}), the kernel
/// mass of the two exterior rays. Diverges at the boundary, so nodes must be
/// strictly interior.
std::vector<double> exterior_mass(const Grid& grid, const KernelSpec& kernel);

/// Dense symmetric collocation matrix for the restricted fractional
/// Laplacian r+ (-Delta)^a e+ on the grid, plus the exterior-mass vector.
struct RestrictedOperator {
    std::vector<double> matrix;     // N x N, row-major, symmetric
    std::vector<double> w;          // exterior mass per node
    KernelSpec kernel;
    Grid grid;

    int size() const { return grid.size(); }
    std::vector<double> apply(std::span<const double> u) const;
};

/// P0 = K - diag(w): the regional operator generated by the form over
/// Omega x Omega. Annihilates constants.
struct RegionalOperator {
    std::vector<double> matrix;
    KernelSpec kernel;
    Grid grid;

    int size() const { return grid.size(); }
    std::vector<double> apply(std::span<const double> u) const;
};

/// Collocation on the piecewise-linear interpolant of (u, zero-extended):
/// closed-form cell integrals of the kernel against hat functions, the
/// near-singularity |y - x_i| < h handled through the symmetric second
/// difference 2u_i - u(x_i+z) - u(x_i-z) with a quadratic-in-z model (finite
/// for every a in (0,1)), boundary cells carried at their sharp constant
/// extension, and the exterior mass on the diagonal. The matrix is
/// symmetrized and then corrected on the diagonal so that K.1 = w holds
/// exactly, which makes K = P0 + diag(w) with P0 annihilating constants an
/// identity of the discrete scheme, not just of the continuum.
RestrictedOperator assemble_restricted(const Grid& grid, const KernelSpec& kernel);

RegionalOperator regional_from_restricted(const RestrictedOperator& r);

/// Independent oracle for the form
///   p0(u,v) = (c/2) * int int_{Omega x Omega} (u(x)-u(y))(v(x)-v(y)) / |x-y|^{1+2a}
/// by midpoint tensor quadrature on piecewise-linear interpolants, cells that
/// touch the diagonal refined by 4-level dyadic subdivision, and the deepest
/// diagonal squares (where both interpolants are single linear pieces)
/// integrated in closed form. Interpolants use constant extension on the two
/// boundary cells, so constants are exactly annihilated.
double p0_bruteforce(std::span<const double> u, std::span<const double> v, const Grid& grid,
                     const KernelSpec& kernel);

inline constexpr int kBruteforceMaxN = 256;
inline constexpr int kDenseMaxN = 2048;

} // namespace fraclab
