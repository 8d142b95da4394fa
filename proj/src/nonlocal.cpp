#include "fraclab/nonlocal.hpp"

#include <cmath>
#include <stdexcept>

#include "fraclab/errors.hpp"
#include "fraclab/numeric.hpp"

namespace fraclab {

double normalization_constant(double a) {
    if (!(a > 0.0 && a < 1.0))
        throw std::invalid_argument("normalization_constant: order must lie in (0,1)");
    return std::pow(4.0, a) * a * gamma_lanczos(a + 0.5) /
           (std::sqrt(M_PI) * gamma_lanczos(1.0 - a));
}

KernelSpec make_kernel(double a) {
    KernelSpec k;
    k.order = a;
    k.dim = 1;
    k.normalization = normalization_constant(a);
    return k;
}

std::vector<double> exterior_mass(const Grid& grid, const KernelSpec& kernel) {
    const double a = kernel.order;
    const double c = kernel.normalization;
    std::vector<double> w(grid.size());
    for (int i = 0; i < grid.size(); ++i) {
        const double dl = grid.x[i] - grid.left;
        const double dr = grid.right - grid.x[i];
        if (!(dl > 0.0) || !(dr > 0.0))
            throw std::invalid_argument("exterior_mass: node on the boundary, w diverges");
        w[i] = (c / (2.0 * a)) * (std::pow(dl, -2.0 * a) + std::pow(dr, -2.0 * a));
    }
    return w;
}

namespace {

/// integral over [t1, t2], 0 < t1 < t2, of t^{-1-2a}
double kernel_mass(double t1, double t2, double a) {
    return (std::pow(t1, -2.0 * a) - std::pow(t2, -2.0 * a)) / (2.0 * a);
}

/// integral over [t1, t2], 0 < t1 < t2, of (A + B t) t^{-1-2a}
double segment_integral(double A, double B, double t1, double t2, double a) {
    const double twoa = 2.0 * a;
    const double i0 = (std::pow(t1, -twoa) - std::pow(t2, -twoa)) / twoa;
    double i1;
    if (std::fabs(twoa - 1.0) < 1e-13)
        i1 = std::log(t2 / t1);
    else
        i1 = (std::pow(t2, 1.0 - twoa) - std::pow(t1, 1.0 - twoa)) / (1.0 - twoa);
    return A * i0 + B * i1;
}

} // namespace

std::vector<double> RestrictedOperator::apply(std::span<const double> u) const {
    const int n = size();
    if (static_cast<int>(u.size()) != n)
        throw std::invalid_argument("RestrictedOperator::apply: length mismatch");
    std::vector<double> out(n, 0.0);
    for (int i = 0; i < n; ++i) {
        const double* row = matrix.data() + static_cast<std::size_t>(i) * n;
        double s = 0.0;
        for (int j = 0; j < n; ++j) s += row[j] * u[j];
        out[i] = s;
    }
    return out;
}

std::vector<double> RegionalOperator::apply(std::span<const double> u) const {
    const int n = size();
    if (static_cast<int>(u.size()) != n)
        throw std::invalid_argument("RegionalOperator::apply: length mismatch");
    std::vector<double> out(n, 0.0);
    for (int i = 0; i < n; ++i) {
        const double* row = matrix.data() + static_cast<std::size_t>(i) * n;
        double s = 0.0;
        for (int j = 0; j < n; ++j) s += row[j] * u[j];
        out[i] = s;
    }
    return out;
}

RestrictedOperator assemble_restricted(const Grid& grid, const KernelSpec& kernel) {
    if (grid.layout != GridLayout::NodeCentered)
        throw std::invalid_argument("assemble_restricted: needs a node-centered grid");
    const int n = grid.size();
    if (n > kDenseMaxN)
        throw std::invalid_argument("assemble_restricted: dense storage capped at N = " +
                                    std::to_string(kDenseMaxN));
    const double a = kernel.order;
    const double c = kernel.normalization;
    const double h = grid.h;

    RestrictedOperator op;
    op.kernel = kernel;
    op.grid = grid;
    op.w = exterior_mass(grid, kernel);
    op.matrix.assign(static_cast<std::size_t>(n) * n, 0.0);

    auto K = [&](int i, int j) -> double& {
        return op.matrix[static_cast<std::size_t>(i) * n + j];
    };

    // cell C_m = [x_m, x_{m+1}] for m = 0..n with x_0 = left, x_{n+1} = right;
    // C_0 and C_n carry the boundary plateau (values u_1 resp. u_N).
    const double sing = c * std::pow(h, -2.0 * a) / (2.0 - 2.0 * a);

    for (int i = 1; i <= n; ++i) {
        const int r = i - 1;
        // |y - x_i| < h: quadratic model of the symmetric second difference.
        // Plateau neighbors make the missing ghost value collapse onto u_i.
        if (i == 1) {
            K(r, r) += sing;
            if (n >= 2) K(r, 1) -= sing;
        } else if (i == n) {
            K(r, r) += sing;
            K(r, n - 2) -= sing;
        } else {
            K(r, r) += 2.0 * sing;
            K(r, i - 2) -= sing;
            K(r, i) -= sing;
        }

        for (int m = 0; m <= n; ++m) {
            if (m == i - 1 || m == i) continue;  // inside the singular zone
            const double p = (m - i) * h;        // t-range of the cell, t = y - x_i
            const double q = (m + 1 - i) * h;
            if (m == 0) {
                // plateau cell, constant u_1 (cell is left of x_i since i >= 2)
                const double mass = c * kernel_mass(-q, -p, a);
                K(r, r) += mass;
                K(r, 0) -= mass;
            } else if (m == n) {
                const double mass = c * kernel_mass(p, q, a);
                K(r, r) += mass;
                K(r, n - 1) -= mass;
            } else {
                // hats: phi_m(y) = (x_{m+1}-y)/h, phi_{m+1}(y) = (y-x_m)/h
                double im, im1;
                if (p >= 0.0) {
                    im = c * segment_integral(double(m + 1 - i), -1.0 / h, p, q, a);
                    im1 = c * segment_integral(double(i - m), 1.0 / h, p, q, a);
                } else {
                    im = c * segment_integral(double(m + 1 - i), 1.0 / h, -q, -p, a);
                    im1 = c * segment_integral(double(i - m), -1.0 / h, -q, -p, a);
                }
                K(r, r) += im + im1;
                K(r, m - 1) -= im;
                K(r, m) -= im1;
            }
        }
        K(r, r) += op.w[r];
    }

    // symmetrize, then restore K.1 = w exactly with a diagonal correction.
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double s = 0.5 * (K(i, j) + K(j, i));
            K(i, j) = s;
            K(j, i) = s;
        }
    for (int i = 0; i < n; ++i) {
        double rowsum = 0.0;
        for (int j = 0; j < n; ++j) rowsum += K(i, j);
        K(i, i) += op.w[i] - rowsum;
    }
    return op;
}

RegionalOperator regional_from_restricted(const RestrictedOperator& r) {
    RegionalOperator reg;
    reg.kernel = r.kernel;
    reg.grid = r.grid;
    reg.matrix = r.matrix;
    const int n = r.size();
    for (int i = 0; i < n; ++i)
        reg.matrix[static_cast<std::size_t>(i) * n + i] -= r.w[i];
    return reg;
}

namespace {

struct Interpolant {
    const Grid* grid;
    std::span<const double> values;

    // piecewise linear through the nodes, constant on the boundary cells
    double operator()(double t) const {
        const double h = grid->h;
        const int n = grid->size();
        const double s = (t - grid->left) / h;
        int cell = static_cast<int>(std::floor(s));
        if (cell <= 0) return values[0];
        if (cell >= n) return values[n - 1];
        const double frac = s - cell;
        return (1.0 - frac) * values[cell - 1] + frac * values[cell];
    }
};

struct P0Accumulator {
    double a;
    Interpolant u, v;
    double total = 0.0;
    double cell_slope_u = 0.0;   // slopes on the current diagonal cell
    double cell_slope_v = 0.0;
    static constexpr int kQuad = 8;
    static constexpr int kDepth = 4;

    void midpoint(double ax, double bx, double ay, double by) {
        const double wx = (bx - ax) / kQuad;
        const double wy = (by - ay) / kQuad;
        double s = 0.0;
        for (int i = 0; i < kQuad; ++i) {
            const double x = ax + (i + 0.5) * wx;
            const double ux = u(x), vx = v(x);
            for (int j = 0; j < kQuad; ++j) {
                const double y = ay + (j + 0.5) * wy;
                const double d = std::fabs(x - y);
                if (d < 1e-15) continue;  // on the diagonal the difference vanishes
                s += (ux - u(y)) * (vx - v(y)) * std::pow(d, -1.0 - 2.0 * a);
            }
        }
        total += s * wx * wy;
    }

    // exact integral of s_u s_v (x-y)^2 |x-y|^{-1-2a} over an axis square
    // [ax,bx]^2 lying within single linear pieces of u and v
    void exact_diagonal_square(double ax, double bx) {
        const double d = bx - ax;
        const double val = 2.0 * std::pow(d, 3.0 - 2.0 * a) / ((2.0 - 2.0 * a) * (3.0 - 2.0 * a));
        total += cell_slope_u * cell_slope_v * val;
    }

    void square(double ax, double bx, double ay, double by, int level, bool single_cell_pair) {
        const bool touches = !(bx <= ay || by <= ax);
        if (!touches) {
            midpoint(ax, bx, ay, by);
            return;
        }
        if (level >= kDepth) {
            if (single_cell_pair && ax == ay && bx == by) {
                exact_diagonal_square(ax, bx);
            } else {
                midpoint(ax, bx, ay, by);
            }
            return;
        }
        const double mx = 0.5 * (ax + bx);
        const double my = 0.5 * (ay + by);
        square(ax, mx, ay, my, level + 1, single_cell_pair);
        square(ax, mx, my, by, level + 1, single_cell_pair);
        square(mx, bx, ay, my, level + 1, single_cell_pair);
        square(mx, bx, my, by, level + 1, single_cell_pair);
    }
};

} // namespace

double p0_bruteforce(std::span<const double> u, std::span<const double> v, const Grid& grid,
                     const KernelSpec& kernel) {
    const int n = grid.size();
    if (n > kBruteforceMaxN)
        throw std::invalid_argument("p0_bruteforce: N capped at " + std::to_string(kBruteforceMaxN) +
                                    " (cost grows like N^2 q^2)");
    if (static_cast<int>(u.size()) != n || static_cast<int>(v.size()) != n)
        throw std::invalid_argument("p0_bruteforce: length mismatch");

    P0Accumulator acc{kernel.order, Interpolant{&grid, u}, Interpolant{&grid, v}};
    const double h = grid.h;
    auto slope_on_cell = [&](std::span<const double> vals, int m) {
        if (m == 0 || m == n) return 0.0;  // plateau
        return (vals[m] - vals[m - 1]) / h;
    };
    for (int mi = 0; mi <= n; ++mi) {
        const double ax = grid.left + mi * h;
        const double bx = ax + h;
        for (int mj = 0; mj <= n; ++mj) {
            const double ay = grid.left + mj * h;
            const double by = ay + h;
            if (mi == mj) {
                acc.cell_slope_u = slope_on_cell(u, mi);
                acc.cell_slope_v = slope_on_cell(v, mi);
            }
            acc.square(ax, bx, ay, by, 0, mi == mj);
        }
    }
    return 0.5 * kernel.normalization * acc.total;
}

} // namespace fraclab
