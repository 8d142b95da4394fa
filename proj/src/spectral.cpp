#include "fraclab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "fraclab/errors.hpp"
#include "fraclab/numeric.hpp"

namespace fraclab {

namespace {

constexpr int kQlIterationCap = 50;

/// Implicit-shift QL for a symmetric tridiagonal matrix, eigenvalues only.
/// d: diagonal (in/out), e: off-diagonal of length n (e[n-1] scratch).
void ql_eigenvalues(std::vector<double>& d, std::vector<double>& e) {
    const int n = static_cast<int>(d.size());
    const double eps = std::numeric_limits<double>::epsilon();
    for (int l = 0; l < n; ++l) {
        int iter = 0;
        while (true) {
            int m = l;
            while (m < n - 1) {
                const double dd = std::fabs(d[m]) + std::fabs(d[m + 1]);
                if (std::fabs(e[m]) <= eps * dd) break;
                ++m;
            }
            if (m == l) break;
            if (++iter > kQlIterationCap)
                throw NumericalError("decompose: QL iteration cap exceeded at eigenvalue " +
                                     std::to_string(l));
            double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            double r = std::hypot(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + (g >= 0.0 ? r : -r));
            double s = 1.0, c = 1.0, p = 0.0;
            bool underflow = false;
            for (int i = m - 1; i >= l; --i) {
                double f = s * e[i];
                const double b = c * e[i];
                r = std::hypot(f, g);
                e[i + 1] = r;
                if (r == 0.0) {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if (underflow) continue;
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
}

/// Solve (T - mu I) x = b in place with a partial-pivoting tridiagonal LU.
/// Works for nearly singular shifts, which is exactly what inverse iteration
/// feeds it.
class ShiftedTridiagSolver {
public:
    ShiftedTridiagSolver(const std::vector<double>& diag, const std::vector<double>& off, double mu)
        : n_(static_cast<int>(diag.size())), sub_(n_), d_(n_), sup_(n_, 0.0), fill_(n_, 0.0),
          swap_(n_, 0) {
        for (int i = 0; i < n_; ++i) d_[i] = diag[i] - mu;
        for (int i = 0; i + 1 < n_; ++i) {
            sub_[i + 1] = off[i];
            sup_[i] = off[i];
        }
        for (int i = 0; i + 1 < n_; ++i) {
            if (std::fabs(sub_[i + 1]) > std::fabs(d_[i])) {
                std::swap(d_[i], sub_[i + 1]);
                std::swap(sup_[i], d_[i + 1]);
                std::swap(fill_[i], sup_[i + 1]);
                swap_[i] = 1;
            }
            if (d_[i] == 0.0) d_[i] = 1e-300;
            const double m = sub_[i + 1] / d_[i];
            sub_[i + 1] = m;  // store the multiplier in place
            d_[i + 1] -= m * sup_[i];
            sup_[i + 1] -= m * fill_[i];
        }
        if (d_[n_ - 1] == 0.0) d_[n_ - 1] = 1e-300;
    }

    void solve(std::vector<double>& x) const {
        for (int i = 0; i + 1 < n_; ++i) {
            if (swap_[i]) std::swap(x[i], x[i + 1]);
            x[i + 1] -= sub_[i + 1] * x[i];
        }
        x[n_ - 1] /= d_[n_ - 1];
        if (n_ >= 2) x[n_ - 2] = (x[n_ - 2] - sup_[n_ - 2] * x[n_ - 1]) / d_[n_ - 2];
        for (int i = n_ - 3; i >= 0; --i)
            x[i] = (x[i] - sup_[i] * x[i + 1] - fill_[i] * x[i + 2]) / d_[i];
    }

private:
    int n_;
    std::vector<double> sub_, d_, sup_, fill_;
    std::vector<int> swap_;
};

void apply_tridiag(const std::vector<double>& diag, const std::vector<double>& off,
                   const double* u, double* out) {
    const int n = static_cast<int>(diag.size());
    for (int i = 0; i < n; ++i) {
        double v = diag[i] * u[i];
        if (i > 0) v += off[i - 1] * u[i - 1];
        if (i < n - 1) v += off[i] * u[i + 1];
        out[i] = v;
    }
}

void fix_sign(double* v, int n) {
    for (int i = 0; i < n; ++i) {
        if (v[i] != 0.0) {
            if (v[i] < 0.0)
                for (int j = 0; j < n; ++j) v[j] = -v[j];
            return;
        }
    }
}

} // namespace

SpectralDecomposition::SpectralDecomposition(Grid grid, BcKind bc, std::vector<double> eigenvalues,
                                             std::vector<double> vectors, Augmentation aug)
    : grid_(std::move(grid)), bc_(bc), eigenvalues_(std::move(eigenvalues)),
      vectors_(std::move(vectors)), aug_(aug) {}

bool SpectralDecomposition::positive() const {
    return !eigenvalues_.empty() && eigenvalues_.front() > 0.0;
}

SpectralDecomposition decompose(const DiscreteOperator& op) {
    const int n = op.size();
    const double h = op.h;

    std::vector<double> lam = op.diag;
    {
        std::vector<double> e = op.off;
        e.resize(n, 0.0);
        ql_eigenvalues(lam, e);
    }
    std::sort(lam.begin(), lam.end());

    double norm_t = 0.0;
    for (int i = 0; i < n; ++i) {
        double row = std::fabs(op.diag[i]);
        if (i > 0) row += std::fabs(op.off[i - 1]);
        if (i < n - 1) row += std::fabs(op.off[i]);
        norm_t = std::max(norm_t, row);
    }

    // Inverse iteration per eigenvalue. Vectors inside a cluster (adjacent
    // eigenvalues closer than cluster_gap) are orthogonalized against each
    // other; eigenvalues further apart are orthogonal automatically.
    const double cluster_gap = 1e-5 * norm_t;
    std::vector<double> vectors(static_cast<std::size_t>(n) * n);
    std::mt19937_64 rng(0x5eed5eedULL);  // fixed seed: decompositions are deterministic
    std::uniform_real_distribution<double> unif(-1.0, 1.0);

    std::vector<double> x(n);
    int cluster_start = 0;
    for (int k = 0; k < n; ++k) {
        if (k > 0 && lam[k] - lam[k - 1] > cluster_gap) cluster_start = k;
        for (int i = 0; i < n; ++i) x[i] = unif(rng);
        const double mu = lam[k] + std::fabs(lam[k]) * 1e-14 + 1e-300;
        ShiftedTridiagSolver solver(op.diag, op.off, mu);
        for (int pass = 0; pass < 3; ++pass) {
            solver.solve(x);
            for (int j = cluster_start; j < k; ++j) {
                const double* vj = vectors.data() + static_cast<std::size_t>(j) * n;
                double dot = pairwise_dot({x.data(), static_cast<std::size_t>(n)},
                                          {vj, static_cast<std::size_t>(n)});
                for (int i = 0; i < n; ++i) x[i] -= dot * vj[i];
            }
            const double nx = norm2({x.data(), static_cast<std::size_t>(n)});
            if (!(nx > 0.0) || !std::isfinite(nx))
                throw NumericalError("decompose: inverse iteration broke down at eigenvalue " +
                                     std::to_string(k));
            for (int i = 0; i < n; ++i) x[i] /= nx;
        }
        std::copy(x.begin(), x.end(), vectors.begin() + static_cast<std::size_t>(k) * n);
    }

    // Rayleigh polish: lambda_k <- <A v, v> / <v, v>. The quotient is accurate
    // to residual^2 / gap, which sharpens the low end of the spectrum well
    // below the QL absolute accuracy eps*||T||.
    std::vector<double> av(n);
    for (int k = 0; k < n; ++k) {
        double* v = vectors.data() + static_cast<std::size_t>(k) * n;
        apply_tridiag(op.diag, op.off, v, av.data());
        const double num = pairwise_dot({av.data(), static_cast<std::size_t>(n)},
                                        {v, static_cast<std::size_t>(n)});
        const double den = pairwise_dot({v, static_cast<std::size_t>(n)},
                                        {v, static_cast<std::size_t>(n)});
        lam[k] = num / den;
    }

    // Re-sort by polished eigenvalue (stable in the original order), then
    // h-normalize and apply the sign convention.
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int i, int j) { return lam[i] < lam[j]; });

    std::vector<double> lam_sorted(n);
    std::vector<double> vec_sorted(static_cast<std::size_t>(n) * n);
    const double scale = 1.0 / std::sqrt(h);
    for (int k = 0; k < n; ++k) {
        lam_sorted[k] = lam[order[k]];
        const double* src = vectors.data() + static_cast<std::size_t>(order[k]) * n;
        double* dst = vec_sorted.data() + static_cast<std::size_t>(k) * n;
        for (int i = 0; i < n; ++i) dst[i] = src[i] * scale;
        fix_sign(dst, n);
    }

    return SpectralDecomposition(op.grid, op.bc(), std::move(lam_sorted), std::move(vec_sorted),
                                 Augmentation::None);
}

std::vector<double> forward_coefficients(const SpectralDecomposition& dec, std::span<const double> f) {
    const int n = dec.size();
    if (static_cast<int>(f.size()) != n)
        throw std::invalid_argument("forward_coefficients: vector length mismatch");
    std::vector<double> c(n);
    const double h = dec.h();
    for (int k = 0; k < n; ++k)
        c[k] = h * pairwise_dot(f, dec.eigenvector(k));
    return c;
}

namespace {

void require_positive_spectrum(const SpectralDecomposition& dec) {
    if (!dec.positive())
        throw DomainError("apply_power: nonpositive eigenvalue present; augment the Neumann "
                          "operator first (neumann_augment)");
}

} // namespace

std::vector<double> apply_power(const SpectralDecomposition& dec, double z, std::span<const double> f) {
    if (std::fabs(z) > kMaxRealExponent)
        throw DomainError("apply_power: |Re z| exceeds " + std::to_string(kMaxRealExponent));
    require_positive_spectrum(dec);
    const int n = dec.size();
    if (static_cast<int>(f.size()) != n)
        throw std::invalid_argument("apply_power: vector length mismatch");

    const std::vector<double> c = forward_coefficients(dec, f);
    std::vector<double> out(n, 0.0);
    for (int k = 0; k < n; ++k) {
        const double w = std::pow(dec.eigenvalue(k), z) * c[k];
        const double* v = dec.eigenvector(k).data();
        for (int i = 0; i < n; ++i) out[i] += w * v[i];
    }
    return out;
}

std::vector<std::complex<double>> apply_power(const SpectralDecomposition& dec, std::complex<double> z,
                                              std::span<const std::complex<double>> f) {
    if (std::fabs(z.real()) > kMaxRealExponent)
        throw DomainError("apply_power: |Re z| exceeds " + std::to_string(kMaxRealExponent));
    if (std::fabs(z.imag()) > kMaxImagExponent)
        throw DomainError("apply_power: |Im z| exceeds " + std::to_string(kMaxImagExponent));
    require_positive_spectrum(dec);
    const int n = dec.size();
    if (static_cast<int>(f.size()) != n)
        throw std::invalid_argument("apply_power: vector length mismatch");

    const double h = dec.h();
    std::vector<std::complex<double>> out(n, 0.0);
    for (int k = 0; k < n; ++k) {
        const double* v = dec.eigenvector(k).data();
        std::complex<double> ck = 0.0;
        for (int i = 0; i < n; ++i) ck += f[i] * v[i];
        ck *= h;
        // principal branch of lambda^z for lambda > 0
        const std::complex<double> w = std::exp(z * std::log(dec.eigenvalue(k))) * ck;
        for (int i = 0; i < n; ++i) out[i] += w * v[i];
    }
    return out;
}

std::vector<double> solve_power(const SpectralDecomposition& dec, double a, std::span<const double> f) {
    if (a < kMinSolveExponent || a > 1.0)
        throw DomainError("solve_power: exponent must lie in [0.01, 1]");
    return apply_power(dec, -a, f);
}

SpectralDecomposition neumann_augment(const SpectralDecomposition& dec) {
    if (dec.bc() != BcKind::Neumann)
        throw InvalidState("neumann_augment: source decomposition is not a Neumann realization");
    const int n = dec.size();
    if (n < 2 || std::fabs(dec.eigenvalue(0)) > 1e-8 * dec.eigenvalue(1))
        throw InvalidState("neumann_augment: no numerically zero eigenvalue to replace");

    std::vector<double> lam = dec.eigenvalues();
    std::vector<double> vec = dec.raw_vectors();
    lam[0] = 1.0;
    // The mean projector's unit eigenvector is exactly the constant; store it
    // exactly rather than the computed nullvector.
    const double vol = dec.grid().length();
    const double cval = 1.0 / std::sqrt(vol);
    for (int i = 0; i < n; ++i) vec[i] = cval;

    return SpectralDecomposition(dec.grid(), dec.bc(), std::move(lam), std::move(vec),
                                 Augmentation::MeanProjector);
}

} // namespace fraclab
