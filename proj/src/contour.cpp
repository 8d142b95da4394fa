#include "fraclab/contour.hpp"

#include <cmath>
#include <stdexcept>

#include "fraclab/errors.hpp"
#include "fraclab/numeric.hpp"

namespace fraclab {

double balanced_step(double a, int q) {
    const double rho = std::min(a, 1.0 - a);
    return std::sqrt(2.0 * M_PI * M_PI / (rho * q));
}

QuadratureRule build_rule(double a, int q, double step) {
    if (a <= 0.01 || a >= 0.99)
        throw std::invalid_argument("build_rule: exponent must lie in (0.01, 0.99)");
    if (q < 4)
        throw std::invalid_argument("build_rule: need Q >= 4");
    if (!(step > 0.0))
        throw std::invalid_argument("build_rule: step must be positive");

    QuadratureRule rule;
    rule.a = a;
    rule.q_points = q;
    rule.step = step;
    rule.shifts.resize(2 * q + 1);
    rule.weights.resize(2 * q + 1);
    const double front = std::sin(M_PI * a) / M_PI;
    for (int j = -q; j <= q; ++j) {
        const double t = j * step;
        rule.shifts[j + q] = std::exp(t);
        rule.weights[j + q] = front * step * std::exp((1.0 - a) * t);
    }
    return rule;
}

QuadratureRule build_rule(double a, int q) {
    if (a <= 0.01 || a >= 0.99)
        throw std::invalid_argument("build_rule: exponent must lie in (0.01, 0.99)");
    if (q < 4)
        throw std::invalid_argument("build_rule: need Q >= 4");
    return build_rule(a, q, balanced_step(a, q));
}

namespace {

/// Thomas solve of (A + shift I) x = b. A is a symmetric M-matrix, so the
/// shifted system is strictly diagonally dominant for shift > 0 and no
/// pivoting is needed.
void thomas_solve(const DiscreteOperator& op, double shift, std::span<const double> b,
                  std::vector<double>& x) {
    const int n = op.size();
    static thread_local std::vector<double> c_work, d_work;
    c_work.assign(n, 0.0);
    d_work.assign(n, 0.0);

    double piv = op.diag[0] + shift;
    if (piv <= 0.0) throw NumericalError("ShiftedSolver: nonpositive pivot");
    c_work[0] = (n > 1) ? op.off[0] / piv : 0.0;
    d_work[0] = b[0] / piv;
    for (int i = 1; i < n; ++i) {
        const double sub = op.off[i - 1];
        piv = op.diag[i] + shift - sub * c_work[i - 1];
        if (piv <= 0.0) throw NumericalError("ShiftedSolver: nonpositive pivot");
        if (i < n - 1) c_work[i] = op.off[i] / piv;
        d_work[i] = (b[i] - sub * d_work[i - 1]) / piv;
    }
    x.assign(n, 0.0);
    x[n - 1] = d_work[n - 1];
    for (int i = n - 2; i >= 0; --i) x[i] = d_work[i] - c_work[i] * x[i + 1];
}

} // namespace

ShiftedSolver::ShiftedSolver(const DiscreteOperator& op, bool augment_mean)
    : op_(&op), augment_mean_(augment_mean) {
    if (!augment_mean && op.bc() == BcKind::Neumann) {
        // zero-flux with zero potential is singular
        double min_c = 0.0;
        bool first = true;
        for (double xi : op.grid.x) {
            const double c = op.spec.potential(xi);
            min_c = first ? c : std::min(min_c, c);
            first = false;
        }
        if (min_c <= 0.0)
            throw DomainError("ShiftedSolver: zero-potential Neumann operator is singular; "
                              "augment with the mean projector");
    }
}

std::vector<double> ShiftedSolver::solve(double shift, std::span<const double> b) const {
    const int n = op_->size();
    if (static_cast<int>(b.size()) != n)
        throw std::invalid_argument("ShiftedSolver::solve: length mismatch");

    std::vector<double> x;
    thomas_solve(*op_, shift, b, x);
    if (!augment_mean_) return x;

    // E0 = sigma * ones ones^T with sigma = h / vol; Sherman-Morrison:
    // (M + sigma 1 1^T)^{-1} b = y - sigma (1^T y) / (1 + sigma 1^T z) z,
    // with y = M^{-1} b, z = M^{-1} 1.
    const double sigma = op_->h / op_->grid.length();
    std::vector<double> ones(n, 1.0), z;
    thomas_solve(*op_, shift, ones, z);
    const double denom = 1.0 + sigma * pairwise_sum(z);
    const double factor = sigma * pairwise_sum(x) / denom;
    for (int i = 0; i < n; ++i) x[i] -= factor * z[i];
    return x;
}

std::vector<double> apply_inverse_power_contour(const DiscreteOperator& op, const QuadratureRule& rule,
                                                std::span<const double> f, bool augment_mean) {
    const int n = op.size();
    if (static_cast<int>(f.size()) != n)
        throw std::invalid_argument("apply_inverse_power_contour: length mismatch");

    ShiftedSolver solver(op, augment_mean);
    // weighted pairwise reduction over shifts, fixed order
    const int m = static_cast<int>(rule.shifts.size());
    std::vector<std::vector<double>> terms;
    terms.reserve(m);
    for (int q = 0; q < m; ++q) {
        std::vector<double> xq = solver.solve(rule.shifts[q], f);
        const double w = rule.weights[q];
        for (double& v : xq) v *= w;
        terms.push_back(std::move(xq));
    }
    // pairwise tree sum across terms
    while (terms.size() > 1) {
        std::vector<std::vector<double>> next;
        next.reserve((terms.size() + 1) / 2);
        for (std::size_t i = 0; i + 1 < terms.size(); i += 2) {
            for (int j = 0; j < n; ++j) terms[i][j] += terms[i + 1][j];
            next.push_back(std::move(terms[i]));
        }
        if (terms.size() % 2) next.push_back(std::move(terms.back()));
        terms = std::move(next);
    }
    return std::move(terms.front());
}

std::vector<double> solve_fractional_contour(const DiscreteOperator& op, double a, int q,
                                             std::span<const double> f, bool augment_mean) {
    if (a == 1.0) {
        if (augment_mean)
            throw DomainError("solve_fractional_contour: a = 1 on the augmented Neumann operator "
                              "has no positive-definite tridiagonal factor; use the spectral path");
        ShiftedSolver solver(op, false);
        return solver.solve(0.0, f);
    }
    return apply_inverse_power_contour(op, build_rule(a, q), f, augment_mean);
}

} // namespace fraclab
