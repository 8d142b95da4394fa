#pragma once

#include <vector>

namespace fraclab {

struct DenseEigenResult {
    std::vector<double> values;    // ascending
    std::vector<double> vectors;   // n x n column-major, Euclidean-orthonormal
};

/// Cyclic Jacobi eigenvalue iteration for a dense symmetric matrix
/// (row-major n x n input). Sweeps until the off-diagonal Frobenius mass
/// falls below tol * ||A||_F; throws NumericalError after max_sweeps.
DenseEigenResult jacobi_eigensystem(std::vector<double> a, int n, double tol = 1e-13,
                                    int max_sweeps = 30);

} // namespace fraclab
