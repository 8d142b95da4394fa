#pragma once

#include <complex>
#include <span>
#include <vector>

#include "fraclab/grid.hpp"

namespace fraclab {

enum class Augmentation { None, MeanProjector };

/// Full eigensystem of a DiscreteOperator. Eigenvalues ascend; eigenvector
/// columns are orthonormal in <.,.>_h and carry a deterministic sign
/// (first nonzero component positive), so decompositions are bit-stable
/// across runs and safe to cache.
class SpectralDecomposition {
public:
    SpectralDecomposition() = default;
    SpectralDecomposition(Grid grid, BcKind bc, std::vector<double> eigenvalues,
                          std::vector<double> vectors, Augmentation aug);

    int size() const { return static_cast<int>(eigenvalues_.size()); }
    double h() const { return grid_.h; }
    const Grid& grid() const { return grid_; }
    BcKind bc() const { return bc_; }
    Augmentation augmentation() const { return aug_; }

    const std::vector<double>& eigenvalues() const { return eigenvalues_; }
    double eigenvalue(int k) const { return eigenvalues_[k]; }

    /// k-th eigenvector (column k), h-normalized.
    std::span<const double> eigenvector(int k) const {
        return {vectors_.data() + static_cast<std::size_t>(k) * size(), static_cast<std::size_t>(size())};
    }
    const std::vector<double>& raw_vectors() const { return vectors_; }

    bool positive() const;  // all eigenvalues > 0

private:
    Grid grid_;
    BcKind bc_ = BcKind::Dirichlet;
    std::vector<double> eigenvalues_;       // ascending
    std::vector<double> vectors_;           // N x N, column-major
    Augmentation aug_ = Augmentation::None;
};

/// Complete eigendecomposition of a symmetric tridiagonal operator.
/// Eigenvalues by implicit-shift QL (iteration cap 50 per eigenvalue),
/// eigenvectors by shifted inverse iteration with reorthogonalization
/// inside eigenvalue clusters, eigenvalues polished by a final Rayleigh
/// quotient. Throws NumericalError if the QL iteration cap is hit.
SpectralDecomposition decompose(const DiscreteOperator& op);

/// c_k = <f, v_k>_h for every k. Parseval holds: sum c_k^2 = ||f||_h^2.
std::vector<double> forward_coefficients(const SpectralDecomposition& dec, std::span<const double> f);

/// (A_B)^z f = sum_k lambda_k^z <f, v_k>_h v_k, principal branch.
/// Requires a positive spectrum; Neumann operators with a nullspace must be
/// augmented first (see neumann_augment).
std::vector<double> apply_power(const SpectralDecomposition& dec, double z, std::span<const double> f);

std::vector<std::complex<double>> apply_power(const SpectralDecomposition& dec, std::complex<double> z,
                                              std::span<const std::complex<double>> f);

/// Solve (A_B)^a u = f, a in [0.01, 1], through the spectral representation.
std::vector<double> solve_power(const SpectralDecomposition& dec, double a, std::span<const double> f);

/// Nullspace repair for the zero-potential Neumann operator: adds the mean
/// projector E0 u = (1/vol) * h * sum u_i, which replaces the zero eigenvalue
/// by 1 and leaves every mean-zero eigenpair untouched.
SpectralDecomposition neumann_augment(const SpectralDecomposition& dec);

/// Bounds on the exponent argument accepted by apply_power.
inline constexpr double kMaxRealExponent = 2.0;
inline constexpr double kMaxImagExponent = 8.0;
inline constexpr double kMinSolveExponent = 0.01;

} // namespace fraclab
