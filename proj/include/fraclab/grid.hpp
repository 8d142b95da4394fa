#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace fraclab {

enum class GridLayout { NodeCentered, CellCentered };
enum class BcKind { Dirichlet, Neumann };

/// Uniform 1D grid on an open interval (left, right).
///
/// Node-centered grids place x_i = left + i*h, i = 1..n, h = (right-left)/(n+1)
/// (both endpoints are off-grid; natural for Dirichlet problems).
/// Cell-centered grids place x_i = left + (i-1/2)*h, h = (right-left)/n
/// (natural for zero-flux Neumann problems).
struct Grid {
    double left = 0.0;
    double right = 1.0;
    GridLayout layout = GridLayout::NodeCentered;
    double h = 0.0;
    std::vector<double> x;

    int size() const { return static_cast<int>(x.size()); }
    double length() const { return right - left; }
};

Grid build_uniform_grid(double left, double right, int n, GridLayout layout);

/// Coefficients and boundary condition defining the elliptic operator
/// A u = -(a(x) u')' + c(x) u with either the Dirichlet trace or the
/// homogeneous conormal (zero-flux) condition.
struct EllipticSpec {
    std::function<double(double)> diffusion;        // a(x) >= ellipticity_floor
    std::function<double(double)> potential;        // c(x) >= 0
    BcKind bc = BcKind::Dirichlet;
    double ellipticity_floor = 1e-10;

    static EllipticSpec laplacian(BcKind bc);       // a = 1, c = 0
};

/// Symmetric tridiagonal realization of the elliptic operator on a grid.
/// Off-diagonal entries are nonpositive and the matrix is an M-matrix by
/// construction of the flux scheme. The discrete inner product is
/// <u,v>_h = h * sum u_i v_i.
struct DiscreteOperator {
    std::vector<double> diag;   // length N
    std::vector<double> off;    // length N-1
    Grid grid;
    EllipticSpec spec;
    double h = 0.0;

    int size() const { return static_cast<int>(diag.size()); }
    BcKind bc() const { return spec.bc; }
};

/// Flux-form assembly: row i carries (a_{i-1/2} + a_{i+1/2})/h^2 + c(x_i) on
/// the diagonal and -a_{i+1/2}/h^2 on the off-diagonal, with coefficients
/// evaluated at cell midpoints. Dirichlet drops the boundary couplings;
/// Neumann omits the exterior flux terms.
DiscreteOperator assemble_elliptic(const EllipticSpec& spec, const Grid& grid);

std::vector<double> apply_operator(const DiscreteOperator& op, std::span<const double> u);

/// <u,v>_h = h * sum u_i v_i, the inner product every orthonormality and
/// coefficient statement in this project uses.
double inner_h(const DiscreteOperator& op, std::span<const double> u, std::span<const double> v);

} // namespace fraclab
