#include "fraclab/dense_eigen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fraclab/errors.hpp"

namespace fraclab {

DenseEigenResult jacobi_eigensystem(std::vector<double> a, int n, double tol, int max_sweeps) {
    std::vector<double> v(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i) * n + i] = 1.0;

    auto at = [&](int i, int j) -> double& { return a[static_cast<std::size_t>(i) * n + j]; };

    double fro = 0.0;
    for (double x : a) fro += x * x;
    fro = std::sqrt(fro);
    const double stop = tol * fro;

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += 2.0 * at(i, j) * at(i, j);
        off = std::sqrt(off);
        if (off <= stop) {
            // collect and sort
            DenseEigenResult res;
            res.values.resize(n);
            for (int i = 0; i < n; ++i) res.values[i] = at(i, i);
            std::vector<int> order(n);
            std::iota(order.begin(), order.end(), 0);
            std::stable_sort(order.begin(), order.end(),
                             [&](int p, int q) { return res.values[p] < res.values[q]; });
            std::vector<double> values(n), vectors(static_cast<std::size_t>(n) * n);
            for (int k = 0; k < n; ++k) {
                values[k] = res.values[order[k]];
                for (int i = 0; i < n; ++i)
                    vectors[static_cast<std::size_t>(k) * n + i] =
                        v[static_cast<std::size_t>(i) * n + order[k]];
            }
            res.values = std::move(values);
            res.vectors = std::move(vectors);
            return res;
        }

        const double thresh = (sweep < 3) ? 0.2 * off * off / (n * n) : 0.0;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = at(p, q);
                if (apq * apq <= thresh) continue;
                const double app = at(p, p), aqq = at(q, q);
                const double theta = 0.5 * (aqq - app) / apq;
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                const double tau = s / (1.0 + c);

                at(p, p) = app - t * apq;
                at(q, q) = aqq + t * apq;
                at(p, q) = 0.0;
                at(q, p) = 0.0;
                for (int i = 0; i < n; ++i) {
                    if (i == p || i == q) continue;
                    const double aip = at(i, p), aiq = at(i, q);
                    at(i, p) = aip - s * (aiq + tau * aip);
                    at(p, i) = at(i, p);
                    at(i, q) = aiq + s * (aip - tau * aiq);
                    at(q, i) = at(i, q);
                }
                for (int i = 0; i < n; ++i) {
                    double* vp = &v[static_cast<std::size_t>(i) * n + p];
                    double* vq = &v[static_cast<std::size_t>(i) * n + q];
                    const double vip = *vp, viq = *vq;
                    *vp = vip - s * (viq + tau * vip);
                    *vq = viq + s * (vip - tau * viq);
                }
            }
        }
    }
    throw NumericalError("jacobi_eigensystem: no convergence within sweep cap");
}

} // namespace fraclab
