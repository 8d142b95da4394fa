#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fraclab/grid.hpp"

namespace fraclab {

class SpectralDecomposition;

/// Closed-form functions of the shape sum_j P_j(x) * {1 | sin(w_j x) | cos(w_j x)}
/// with polynomial P_j. The class is closed under differentiation and under
/// multiplication by affine functions, which is exactly what evaluating
/// boundary traces of A^m f = (-(a u')' + c u)^m f needs when the diffusion
/// coefficient is affine and the potential constant.
class SmoothFunction {
public:
    struct Term {
        std::vector<double> poly;   // coefficients, poly[k] * x^k
        double omega = 0.0;         // 0 for pure polynomials
        int trig = 0;               // 0: none, 1: sin(omega x), 2: cos(omega x)
    };

    SmoothFunction() = default;

    static SmoothFunction polynomial(std::vector<double> coeffs);
    static SmoothFunction sine(double omega, double amplitude = 1.0);
    static SmoothFunction cosine(double omega, double amplitude = 1.0);

    double operator()(double x) const;
    SmoothFunction derivative() const;
    SmoothFunction scaled(double s) const;
    SmoothFunction plus(const SmoothFunction& other) const;
    /// multiply by (p + q x)
    SmoothFunction times_affine(double p, double q) const;

    double sup_norm(double lo, double hi, int samples = 512) const;

    const std::vector<Term>& terms() const { return terms_; }

private:
    void add_term(Term t);
    std::vector<Term> terms_;
};

/// Diffusion coefficient catalog: "const:v" or "affine:p,q" meaning p + q x.
struct CoefficientSpec {
    double p = 1.0;
    double q = 0.0;

    double operator()(double x) const { return p + q * x; }
    bool constant() const { return q == 0.0; }
    std::string describe() const;
};

CoefficientSpec parse_coefficient(const std::string& text);

/// Right-hand sides: const (f = 1), poly2 ((x-left)(right-x)), linear (f = x),
/// sin:k (k-th Dirichlet sine mode of the interval), eigen:k (k-th discrete
/// eigenvector, 1-based), custom:path (one sample per grid node, one value
/// per line, '#' comments allowed).
struct RhsEntry {
    std::string name;
    std::optional<SmoothFunction> closed_form;  // absent for eigen:k / custom
    std::optional<int> eigen_index;             // 1-based
    std::optional<std::string> csv_path;
};

RhsEntry parse_rhs(const std::string& text, const Grid& grid);

/// Grid samples of an RHS entry; eigen:k needs the decomposition.
std::vector<double> sample_rhs(const RhsEntry& rhs, const Grid& grid,
                               const SpectralDecomposition* dec = nullptr);

} // namespace fraclab
