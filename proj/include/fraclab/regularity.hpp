#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fraclab/catalog.hpp"
#include "fraclab/grid.hpp"
#include "fraclab/spectral.hpp"

namespace fraclab {

enum class SubsequenceMask { All, Odd, Even, NonZero };

std::string to_string(SubsequenceMask mask);

/// Least-squares fit of |c_k| ~ k^{-beta} on a masked index window.
struct DecayFit {
    double exponent = 0.0;       // beta
    double intercept = 0.0;
    double r_squared = 0.0;
    int window_lo = 0;
    int window_hi = 0;
    SubsequenceMask mask = SubsequenceMask::All;
    int points_used = 0;
};

/// OLS slope of log|c_k| against log k over 1-based indices in
/// [window_lo, window_hi] restricted to the mask; coefficients below 1e-14
/// are excluded. Throws InsufficientData with fewer than 8 usable points.
DecayFit fit_power_decay(std::span<const double> coeffs, SubsequenceMask mask, int window_lo,
                         int window_hi);

/// L2 square-summability threshold: sum k^{2s} c_k^2 < inf iff s < beta - 1/2.
double sobolev_threshold(const DecayFit& fit);

/// Smallest m <= 3 with a nonzero boundary trace of A^m f (Dirichlet: the
/// endpoint value; Neumann: the conormal derivative nu a f'), or nullopt when
/// none of the probed layers is violated. Catalog entries with closed forms
/// are differentiated symbolically; sampled data falls back to one-sided
/// finite-difference stencils (reliable for the first two layers).
std::optional<int> first_violation_index(const CoefficientSpec& coef, double potential,
                                         BcKind bc, const RhsEntry& rhs, const Grid& grid,
                                         double trace_tol_rel = 1e-6);

struct CompatibilityReport {
    BcKind bc = BcKind::Dirichlet;
    double a = 0.5;
    std::string rhs;
    std::optional<int> violation_index;      // nullopt = no violation up to probe depth
    bool superpolynomial = false;            // no power-law fit applies
    double measured_beta = 0.0;
    double predicted_beta = 0.0;
    double measured_s_max = 0.0;
    double predicted_s_max = 0.0;
    double r_squared = 0.0;
    bool pass = false;
    double tolerance = 0.0;
    std::string theory_tag;                  // which statement the prediction instantiates
};

struct CompatibilityOptions {
    double tol_beta = 0.15;
    int window_lo = 8;
    int window_hi = 0;        // 0: N/8
    double trace_tol_rel = 1e-6;
};

/// Solve (A_B)^a u = f, fit the eigencoefficient decay of u, and compare the
/// exponent with the compatibility-layer prediction
///   beta = 2m + 1 + 2a (Dirichlet), beta = 2m + 2 + 2a (Neumann),
/// where m is the first violated boundary layer of f. The decomposition must
/// already be augmented for zero-potential Neumann problems. For Neumann the
/// constant mode is dropped so that the coefficient index equals the cosine
/// frequency.
CompatibilityReport compatibility_experiment(const SpectralDecomposition& dec,
                                             const CoefficientSpec& coef, double potential,
                                             double a, const RhsEntry& rhs,
                                             const CompatibilityOptions& opt = {});

/// Convenience overload building the operator on (0, pi) with unit diffusion.
CompatibilityReport compatibility_experiment(BcKind bc, double a, const std::string& rhs_name,
                                             int n, const CompatibilityOptions& opt = {});

struct BoundaryFit {
    double exponent = 0.0;    // theta
    double r_squared = 0.0;
    double d_lo = 0.0;
    double d_hi = 0.0;
    bool defined = true;      // false when u changes sign inside the window
    int modes = 0;
};

struct BoundaryFitOptions {
    int points = 40;
    double lower_factor = 10.0;     // d_lo = lower_factor * h
    double span_divisor = 128.0;    // d_hi = (right-left)/span_divisor
};

/// Synthesize u = (A_Dir)^{-a} f from the first K modes and fit
/// log u against log d on geometrically spaced distances from the left
/// endpoint. The window cap defaults to (right-left)/128; much wider windows
/// pick up the next boundary term and bias the slope low.
BoundaryFit fit_boundary_exponent(const SpectralDecomposition& dec, double a, const RhsEntry& rhs,
                                  int k_modes, const BoundaryFitOptions& opt = {});

struct EigenvalueComparison {
    double spectral = 0.0;     // lambda_1(A_Dir)^a
    double restricted = 0.0;   // smallest eigenvalue of the dense kernel matrix
    double gap = 0.0;
};

/// First-eigenvalue comparison of the spectral and restricted Dirichlet
/// fractional Laplacians on (0, pi): tridiagonal decomposition on one side,
/// dense Jacobi eigensolve on the other.
EigenvalueComparison compare_first_eigenvalues(double a, int n);

} // namespace fraclab
