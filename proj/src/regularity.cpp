#include "fraclab/regularity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fraclab/dense_eigen.hpp"
#include "fraclab/errors.hpp"
#include "fraclab/nonlocal.hpp"
#include "fraclab/numeric.hpp"

namespace fraclab {

std::string to_string(SubsequenceMask mask) {
    switch (mask) {
        case SubsequenceMask::All: return "all";
        case SubsequenceMask::Odd: return "odd";
        case SubsequenceMask::Even: return "even";
        case SubsequenceMask::NonZero: return "nonzero";
    }
    return "?";
}

DecayFit fit_power_decay(std::span<const double> coeffs, SubsequenceMask mask, int window_lo,
                         int window_hi) {
    const int n = static_cast<int>(coeffs.size());
    if (window_lo < 1 || window_hi > n || window_lo >= window_hi)
        throw std::invalid_argument("fit_power_decay: window outside the coefficient array");

    double cmax = 0.0;
    for (int k = window_lo; k <= window_hi; ++k) cmax = std::max(cmax, std::fabs(coeffs[k - 1]));

    std::vector<double> t, y;
    for (int k = window_lo; k <= window_hi; ++k) {
        if (mask == SubsequenceMask::Odd && k % 2 == 0) continue;
        if (mask == SubsequenceMask::Even && k % 2 == 1) continue;
        const double c = std::fabs(coeffs[k - 1]);
        if (c < 1e-14) continue;
        if (mask == SubsequenceMask::NonZero && c < 1e-8 * cmax) continue;
        t.push_back(std::log(double(k)));
        y.push_back(std::log(c));
    }
    if (t.size() < 8)
        throw InsufficientData("fit_power_decay: only " + std::to_string(t.size()) +
                               " usable points in the window");

    const LineFit line = fit_line(t, y);
    DecayFit fit;
    fit.exponent = -line.slope;
    fit.intercept = line.intercept;
    fit.r_squared = line.r_squared;
    fit.window_lo = window_lo;
    fit.window_hi = window_hi;
    fit.mask = mask;
    fit.points_used = static_cast<int>(t.size());
    return fit;
}

double sobolev_threshold(const DecayFit& fit) { return fit.exponent - 0.5; }

namespace {

/// A f for closed-form f with affine diffusion p + q x and constant
/// potential: A f = -(a f')' + c f = -a f'' - q f' + c f, all symbolic.
SmoothFunction apply_elliptic_symbolic(const CoefficientSpec& coef, double potential,
                                       const SmoothFunction& f) {
    const SmoothFunction f1 = f.derivative();
    const SmoothFunction f2 = f1.derivative();
    SmoothFunction out = f2.times_affine(-coef.p, -coef.q);
    out = out.plus(f1.scaled(-coef.q));
    if (potential != 0.0) out = out.plus(f.scaled(potential));
    return out;
}

double boundary_trace(const SmoothFunction& g, const CoefficientSpec& coef, BcKind bc, double x,
                      bool left_end) {
    if (bc == BcKind::Dirichlet) return g(x);
    const double nu = left_end ? -1.0 : 1.0;
    return nu * coef(x) * g.derivative()(x);
}

/// Fornberg weights: derivative of order m at 0 from samples at offsets z[].
std::vector<double> fornberg_weights(std::span<const double> z, int m) {
    const int nd = static_cast<int>(z.size()) - 1;
    std::vector<double> c((nd + 1) * (m + 1), 0.0);
    auto at = [&](int i, int j) -> double& { return c[i * (m + 1) + j]; };
    double c1 = 1.0;
    double c4 = z[0];
    at(0, 0) = 1.0;
    for (int i = 1; i <= nd; ++i) {
        const int mn = std::min(i, m);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = z[i];
        for (int j = 0; j < i; ++j) {
            const double c3 = z[i] - z[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    at(i, k) = c1 * (k * at(i - 1, k - 1) - c5 * at(i - 1, k)) / c2;
                at(i, 0) = -c1 * c5 * at(i - 1, 0) / c2;
            }
            for (int k = mn; k >= 1; --k)
                at(j, k) = (c4 * at(j, k) - k * at(j, k - 1)) / c3;
            at(j, 0) = c4 * at(j, 0) / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(nd + 1);
    for (int i = 0; i <= nd; ++i) w[i] = at(i, m);
    return w;
}

/// Operator A^m written as sum_j P_j(x) d^j/dx^j with polynomial P_j;
/// starting from the identity and composing A = -(p+qx) d^2 - q d + c.
std::vector<std::vector<double>> compose_elliptic_power(const CoefficientSpec& coef,
                                                        double potential, int m) {
    std::vector<std::vector<double>> rep(1, std::vector<double>{1.0});
    auto times_affine = [](const std::vector<double>& poly, double p, double q) {
        std::vector<double> out(poly.size() + 1, 0.0);
        for (std::size_t k = 0; k < poly.size(); ++k) {
            out[k] += p * poly[k];
            out[k + 1] += q * poly[k];
        }
        return out;
    };
    auto deriv = [](const std::vector<double>& poly) {
        std::vector<double> d;
        for (std::size_t k = 1; k < poly.size(); ++k) d.push_back(poly[k] * double(k));
        return d;
    };
    auto add_into = [](std::vector<std::vector<double>>& dst, int j, const std::vector<double>& poly,
                       double scale) {
        if (poly.empty()) return;
        if (static_cast<int>(dst.size()) <= j) dst.resize(j + 1);
        if (dst[j].size() < poly.size()) dst[j].resize(poly.size(), 0.0);
        for (std::size_t k = 0; k < poly.size(); ++k) dst[j][k] += scale * poly[k];
    };
    for (int step = 0; step < m; ++step) {
        std::vector<std::vector<double>> next;
        for (int j = 0; j < static_cast<int>(rep.size()); ++j) {
            const std::vector<double>& pj = rep[j];
            if (pj.empty()) continue;
            const std::vector<double> pj1 = deriv(pj);
            const std::vector<double> pj2 = deriv(pj1);
            // -a (P'' d^j + 2 P' d^{j+1} + P d^{j+2})
            add_into(next, j, times_affine(pj2, coef.p, coef.q), -1.0);
            add_into(next, j + 1, times_affine(pj1, coef.p, coef.q), -2.0);
            add_into(next, j + 2, times_affine(pj, coef.p, coef.q), -1.0);
            // -a' (P' d^j + P d^{j+1})
            add_into(next, j, pj1, -coef.q);
            add_into(next, j + 1, pj, -coef.q);
            // + c P d^j
            if (potential != 0.0) add_into(next, j, pj, potential);
        }
        rep = std::move(next);
    }
    return rep;
}

double poly_eval(const std::vector<double>& p, double x) {
    double v = 0.0;
    for (std::size_t k = p.size(); k-- > 0;) v = v * x + p[k];
    return v;
}

/// Endpoint derivative estimates f^(j) from grid samples via one-sided
/// Fornberg stencils. Higher orders use strided nodes so the rounding noise
/// eps/sigma^j stays below the trace tolerance.
double endpoint_derivative(std::span<const double> samples, const Grid& grid, bool left_end, int j) {
    const int n = grid.size();
    const int pts = j + 5;
    const double target_span = std::min(0.4 * grid.length(), std::max(4.0, double(j)) * 0.04 * grid.length());
    int stride = std::max(1, static_cast<int>(std::lround(target_span / (pts * grid.h))));
    stride = std::min(stride, std::max(1, (n - 1) / (pts - 1)));

    std::vector<double> offsets(pts), vals(pts);
    const double x0 = left_end ? grid.left : grid.right;
    for (int t = 0; t < pts; ++t) {
        const int idx = left_end ? t * stride : (n - 1) - t * stride;
        offsets[t] = grid.x[idx] - x0;
        vals[t] = samples[idx];
    }
    const std::vector<double> w = fornberg_weights(offsets, j);
    double est = 0.0;
    for (int t = 0; t < pts; ++t) est += w[t] * vals[t];
    return est;
}

constexpr int kProbeDepth = 3;

} // namespace

std::optional<int> first_violation_index(const CoefficientSpec& coef, double potential, BcKind bc,
                                         const RhsEntry& rhs, const Grid& grid,
                                         double trace_tol_rel) {
    if (rhs.eigen_index) {
        // Eigenfunctions satisfy every layer: gamma B A^l v = lambda^l gamma B v = 0.
        return std::nullopt;
    }

    if (rhs.closed_form) {
        const double fmax = rhs.closed_form->sup_norm(grid.left, grid.right);
        const double tol = trace_tol_rel * std::max(fmax, 1e-300);
        SmoothFunction g = *rhs.closed_form;
        for (int m = 0; m <= kProbeDepth; ++m) {
            const double tl = boundary_trace(g, coef, bc, grid.left, true);
            const double tr = boundary_trace(g, coef, bc, grid.right, false);
            if (std::fabs(tl) > tol || std::fabs(tr) > tol) return m;
            if (m < kProbeDepth) g = apply_elliptic_symbolic(coef, potential, g);
        }
        return std::nullopt;
    }

    // sampled data: traces through one-sided finite differences
    const std::vector<double> f = sample_rhs(rhs, grid, nullptr);
    double fmax = 0.0;
    for (double v : f) fmax = std::max(fmax, std::fabs(v));
    const double tol = trace_tol_rel * std::max(fmax, 1e-300);

    for (int m = 0; m <= kProbeDepth; ++m) {
        const auto rep = compose_elliptic_power(coef, potential, m);
        for (bool left_end : {true, false}) {
            const double x0 = left_end ? grid.left : grid.right;
            double value = 0.0, deriv = 0.0;
            for (int j = 0; j < static_cast<int>(rep.size()); ++j) {
                if (rep[j].empty()) continue;
                const double pj = poly_eval(rep[j], x0);
                if (pj != 0.0) value += pj * endpoint_derivative(f, grid, left_end, j);
            }
            if (bc == BcKind::Dirichlet) {
                if (std::fabs(value) > tol) return m;
            } else {
                // conormal trace of A^m f: differentiate the operator image once
                for (int j = 0; j < static_cast<int>(rep.size()); ++j) {
                    if (rep[j].empty()) continue;
                    const auto dp = [&] {
                        std::vector<double> d;
                        for (std::size_t k = 1; k < rep[j].size(); ++k)
                            d.push_back(rep[j][k] * double(k));
                        return d;
                    }();
                    deriv += poly_eval(dp, x0) * endpoint_derivative(f, grid, left_end, j);
                    deriv += poly_eval(rep[j], x0) * endpoint_derivative(f, grid, left_end, j + 1);
                }
                const double nu = left_end ? -1.0 : 1.0;
                if (std::fabs(nu * coef(x0) * deriv) > tol) return m;
            }
        }
    }
    return std::nullopt;
}

namespace {

SubsequenceMask choose_mask(std::span<const double> coeffs, int lo, int hi) {
    double odd = 0.0, even = 0.0;
    int n_odd = 0, n_even = 0;
    for (int k = lo; k <= hi; ++k) {
        const double c = std::fabs(coeffs[k - 1]);
        if (k % 2 == 1) { odd += c; ++n_odd; }
        else { even += c; ++n_even; }
    }
    if (n_odd == 0 || n_even == 0) return SubsequenceMask::All;
    odd /= n_odd;
    even /= n_even;
    if (odd > 1e3 * even) return SubsequenceMask::Odd;
    if (even > 1e3 * odd) return SubsequenceMask::Even;
    return SubsequenceMask::All;
}

} // namespace

CompatibilityReport compatibility_experiment(const SpectralDecomposition& dec,
                                             const CoefficientSpec& coef, double potential,
                                             double a, const RhsEntry& rhs,
                                             const CompatibilityOptions& opt) {
    const int n = dec.size();
    CompatibilityReport rep;
    rep.bc = dec.bc();
    rep.a = a;
    rep.rhs = rhs.name;
    rep.tolerance = opt.tol_beta;

    rep.violation_index = first_violation_index(coef, potential, dec.bc(), rhs, dec.grid(),
                                                opt.trace_tol_rel);

    const std::vector<double> f = sample_rhs(rhs, dec.grid(), &dec);
    const std::vector<double> cf = forward_coefficients(dec, f);
    std::vector<double> cu(n);
    for (int k = 0; k < n; ++k) cu[k] = std::pow(dec.eigenvalue(k), -a) * cf[k];

    // Neumann: drop the constant mode so index == cosine frequency
    std::span<const double> fit_coeffs(cu);
    if (dec.bc() == BcKind::Neumann) fit_coeffs = fit_coeffs.subspan(1);

    if (!rep.violation_index) {
        rep.superpolynomial = true;
        rep.pass = true;
        rep.theory_tag = dec.bc() == BcKind::Dirichlet ? "Cor3.3" : "Cor4.2";
        return rep;
    }

    const int m = *rep.violation_index;
    if (dec.bc() == BcKind::Dirichlet) {
        rep.predicted_beta = 2.0 * m + 1.0 + 2.0 * a;
        rep.theory_tag = m == 0 ? "Thm3.1-2" : "Thm3.2";
    } else {
        rep.predicted_beta = 2.0 * m + 2.0 + 2.0 * a;
        rep.theory_tag = "Thm4.1-" + std::to_string(m == 0 ? 1 : 2);
    }
    rep.predicted_s_max = rep.predicted_beta - 0.5;

    const int hi = opt.window_hi > 0 ? opt.window_hi
                                     : std::max(opt.window_lo + 8, static_cast<int>(fit_coeffs.size()) / 8);
    const SubsequenceMask mask = choose_mask(fit_coeffs, opt.window_lo, hi);
    const DecayFit fit = fit_power_decay(fit_coeffs, mask, opt.window_lo, hi);
    rep.measured_beta = fit.exponent;
    rep.measured_s_max = sobolev_threshold(fit);
    rep.r_squared = fit.r_squared;
    rep.pass = std::fabs(rep.measured_beta - rep.predicted_beta) <= opt.tol_beta;
    return rep;
}

CompatibilityReport compatibility_experiment(BcKind bc, double a, const std::string& rhs_name,
                                             int n, const CompatibilityOptions& opt) {
    if (a < 0.05 || a > 0.95)
        throw std::invalid_argument("compatibility_experiment: exponent outside [0.05, 0.95]");
    if (n < 1024)
        throw std::invalid_argument("compatibility_experiment: need N >= 1024 for a stable fit");

    const Grid grid = build_uniform_grid(0.0, M_PI, n,
                                         bc == BcKind::Dirichlet ? GridLayout::NodeCentered
                                                                 : GridLayout::CellCentered);
    const CoefficientSpec coef;  // unit diffusion
    EllipticSpec spec = EllipticSpec::laplacian(bc);
    const DiscreteOperator op = assemble_elliptic(spec, grid);
    SpectralDecomposition dec = decompose(op);
    if (bc == BcKind::Neumann) dec = neumann_augment(dec);
    const RhsEntry rhs = parse_rhs(rhs_name, grid);
    return compatibility_experiment(dec, coef, 0.0, a, rhs, opt);
}

BoundaryFit fit_boundary_exponent(const SpectralDecomposition& dec, double a, const RhsEntry& rhs,
                                  int k_modes, const BoundaryFitOptions& opt) {
    if (dec.bc() != BcKind::Dirichlet)
        throw std::invalid_argument("fit_boundary_exponent: Dirichlet case only");
    const int n = dec.size();
    if (k_modes < 1 || k_modes > n / 4)
        throw std::invalid_argument("fit_boundary_exponent: K_modes must lie in [1, N/4]");

    const std::vector<double> f = sample_rhs(rhs, dec.grid(), &dec);
    const std::vector<double> cf = forward_coefficients(dec, f);

    const Grid& grid = dec.grid();
    const double h = grid.h;
    const double d_lo = opt.lower_factor * h;
    const double d_hi = grid.length() / opt.span_divisor;
    if (!(d_hi > d_lo))
        throw std::invalid_argument("fit_boundary_exponent: window is empty at this resolution");

    // linear interpolation of eigenvector samples, ghost zero at the endpoint
    auto mode_at = [&](int k, double x) {
        const double s = (x - grid.left) / h;
        const int cell = static_cast<int>(std::floor(s));
        const double frac = s - cell;
        auto v = dec.eigenvector(k);
        const double vl = (cell >= 1 && cell <= n) ? v[cell - 1] : 0.0;
        const double vr = (cell + 1 >= 1 && cell + 1 <= n) ? v[cell] : 0.0;
        return (1.0 - frac) * vl + frac * vr;
    };

    BoundaryFit fit;
    fit.d_lo = d_lo;
    fit.d_hi = d_hi;
    fit.modes = k_modes;

    std::vector<double> t(opt.points), y(opt.points);
    const double ratio = std::pow(d_hi / d_lo, 1.0 / double(opt.points - 1));
    double sign = 0.0;
    for (int j = 0; j < opt.points; ++j) {
        const double d = d_lo * std::pow(ratio, j);
        double u = 0.0;
        for (int k = 0; k < k_modes; ++k)
            u += std::pow(dec.eigenvalue(k), -a) * cf[k] * mode_at(k, grid.left + d);
        if (u == 0.0 || (sign != 0.0 && sign * u < 0.0)) {
            fit.defined = false;
            return fit;
        }
        sign = u > 0.0 ? 1.0 : -1.0;
        t[j] = std::log(d);
        y[j] = std::log(std::fabs(u));
    }
    const LineFit line = fit_line(t, y);
    fit.exponent = line.slope;
    fit.r_squared = line.r_squared;
    return fit;
}

EigenvalueComparison compare_first_eigenvalues(double a, int n) {
    if (n > kDenseMaxN)
        throw std::invalid_argument("compare_first_eigenvalues: N capped at " +
                                    std::to_string(kDenseMaxN));
    const Grid grid = build_uniform_grid(0.0, M_PI, n, GridLayout::NodeCentered);
    const DiscreteOperator op = assemble_elliptic(EllipticSpec::laplacian(BcKind::Dirichlet), grid);
    const SpectralDecomposition dec = decompose(op);

    const RestrictedOperator restricted = assemble_restricted(grid, make_kernel(a));
    const DenseEigenResult dense = jacobi_eigensystem(restricted.matrix, n);

    EigenvalueComparison cmp;
    cmp.spectral = std::pow(dec.eigenvalue(0), a);
    cmp.restricted = dense.values.front();
    cmp.gap = cmp.spectral - cmp.restricted;
    return cmp;
}

} // namespace fraclab
