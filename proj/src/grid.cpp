#include "fraclab/grid.hpp"

#include <cmath>
#include <stdexcept>

#include "fraclab/errors.hpp"
#include "fraclab/numeric.hpp"

namespace fraclab {

Grid build_uniform_grid(double left, double right, int n, GridLayout layout) {
    if (!(right > left))
        throw std::invalid_argument("build_uniform_grid: right endpoint must exceed left");
    if (n < 2)
        throw std::invalid_argument("build_uniform_grid: need at least 2 points");

    Grid g;
    g.left = left;
    g.right = right;
    g.layout = layout;
    g.x.resize(n);
    if (layout == GridLayout::NodeCentered) {
        g.h = (right - left) / double(n + 1);
        for (int i = 1; i <= n; ++i) g.x[i - 1] = left + i * g.h;
    } else {
        g.h = (right - left) / double(n);
        for (int i = 1; i <= n; ++i) g.x[i - 1] = left + (i - 0.5) * g.h;
    }
    return g;
}

EllipticSpec EllipticSpec::laplacian(BcKind bc) {
    EllipticSpec s;
    s.diffusion = [](double) { return 1.0; };
    s.potential = [](double) { return 0.0; };
    s.bc = bc;
    s.ellipticity_floor = 0.5;
    return s;
}

DiscreteOperator assemble_elliptic(const EllipticSpec& spec, const Grid& grid) {
    const bool node = grid.layout == GridLayout::NodeCentered;
    if (spec.bc == BcKind::Dirichlet && !node)
        throw std::invalid_argument("assemble_elliptic: Dirichlet needs a node-centered grid");
    if (spec.bc == BcKind::Neumann && node)
        throw std::invalid_argument("assemble_elliptic: Neumann needs a cell-centered grid");

    const int n = grid.size();
    const double h = grid.h;
    const double h2 = h * h;

    DiscreteOperator op;
    op.grid = grid;
    op.spec = spec;
    op.h = h;
    op.diag.assign(n, 0.0);
    op.off.assign(n - 1, 0.0);

    auto a_at = [&](double x) {
        const double v = spec.diffusion(x);
        if (v < spec.ellipticity_floor)
            throw AssemblyError("assemble_elliptic: diffusion coefficient " + std::to_string(v) +
                                " below ellipticity floor at x = " + std::to_string(x));
        return v;
    };

    for (int i = 0; i < n; ++i) {
        const double xi = grid.x[i];
        const double c = spec.potential(xi);
        if (c < 0.0)
            throw AssemblyError("assemble_elliptic: negative potential at x = " + std::to_string(xi));

        const double al = a_at(xi - h / 2.0);
        const double ar = a_at(xi + h / 2.0);

        if (spec.bc == BcKind::Dirichlet) {
            op.diag[i] = (al + ar) / h2 + c;
        } else {
            // zero-flux: exterior faces carry no flux term
            double d = c;
            if (i > 0) d += al / h2;
            if (i < n - 1) d += ar / h2;
            op.diag[i] = d;
        }
        if (i < n - 1) op.off[i] = -ar / h2;
    }
    return op;
}

std::vector<double> apply_operator(const DiscreteOperator& op, std::span<const double> u) {
    const int n = op.size();
    if (static_cast<int>(u.size()) != n)
        throw std::invalid_argument("apply_operator: vector length does not match operator size");
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) {
        double v = op.diag[i] * u[i];
        if (i > 0) v += op.off[i - 1] * u[i - 1];
        if (i < n - 1) v += op.off[i] * u[i + 1];
        out[i] = v;
    }
    return out;
}

double inner_h(const DiscreteOperator& op, std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size())
        throw std::invalid_argument("inner_h: length mismatch");
    return op.h * pairwise_dot(u, v);
}

} // namespace fraclab
