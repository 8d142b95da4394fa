#pragma once

#include <span>
#include <vector>

#include "fraclab/grid.hpp"

namespace fraclab {

/// Sinc quadrature for the real-axis representation of the inverse
/// fractional power,
///   A^{-a} = (sin(pi a)/pi) * int_0^inf lambda^{-a} (A + lambda)^{-1} dlambda,
/// after the substitution lambda = e^t: nodes t_q = q*step for q = -Q..Q,
/// shifts lambda_q = e^{t_q}, weights w_q = (sin(pi a)/pi) * step * e^{(1-a) t_q}.
struct QuadratureRule {
    double a = 0.5;
    int q_points = 0;        // Q; node count is 2Q+1
    double step = 0.0;       // kappa
    std::vector<double> shifts;
    std::vector<double> weights;
};

/// Default step balances the truncation decay rates (a on the right tail,
/// 1-a on the left) against the trapezoid discretization error of a strip of
/// half-width pi: step = sqrt(2 pi^2 / (min(a, 1-a) * Q)).
double balanced_step(double a, int q);

QuadratureRule build_rule(double a, int q);
QuadratureRule build_rule(double a, int q, double step);

/// Direct solve of (A [+ E0]) x = b for a symmetric positive definite
/// tridiagonal A, optionally augmented by the mean projector (handled by
/// Sherman-Morrison around the tridiagonal factorization).
class ShiftedSolver {
public:
    explicit ShiftedSolver(const DiscreteOperator& op, bool augment_mean = false);

    /// x = (A + shift I [+ E0])^{-1} b
    std::vector<double> solve(double shift, std::span<const double> b) const;

private:
    const DiscreteOperator* op_;
    bool augment_mean_;
};

/// u = sum_q w_q (A + lambda_q I)^{-1} f, one tridiagonal factor-and-solve
/// per shift. Requires a positive definite operator; zero-potential Neumann
/// callers must set augment_mean, which applies the same mean-projector
/// repair the spectral path uses.
std::vector<double> apply_inverse_power_contour(const DiscreteOperator& op, const QuadratureRule& rule,
                                                std::span<const double> f, bool augment_mean = false);

/// Dispatch helper: a = 1 is an exact single tridiagonal solve, anything in
/// (0,1) goes through the quadrature rule.
std::vector<double> solve_fractional_contour(const DiscreteOperator& op, double a, int q,
                                             std::span<const double> f, bool augment_mean = false);

} // namespace fraclab
