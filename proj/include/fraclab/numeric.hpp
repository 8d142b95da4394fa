#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace fraclab {

/// Pairwise (cascade) summation. Fixed reduction order, so results are
/// reproducible bit-for-bit regardless of how callers schedule work, and
/// the rounding error grows like O(log n) instead of O(n).
inline double pairwise_sum(std::span<const double> v) {
    const std::size_t n = v.size();
    if (n <= 8) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(v.subspan(0, half)) + pairwise_sum(v.subspan(half));
}

/// Dot product with pairwise reduction.
inline double pairwise_dot(std::span<const double> u, std::span<const double> v) {
    const std::size_t n = u.size();
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += u[i] * v[i];
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_dot(u.subspan(0, half), v.subspan(0, half)) +
           pairwise_dot(u.subspan(half), v.subspan(half));
}

inline double norm2(std::span<const double> v) {
    return std::sqrt(pairwise_dot(v, v));
}

/// Gamma function, Lanczos approximation (g = 7, 9 coefficients).
/// Relative error below 1e-13 on the positive real axis.
inline double gamma_lanczos(double x) {
    static const double coef[9] = {
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    };
    if (x < 0.5) {
        // reflection for the left half plane
        return M_PI / (std::sin(M_PI * x) * gamma_lanczos(1.0 - x));
    }
    x -= 1.0;
    double acc = coef[0];
    for (int i = 1; i < 9; ++i) acc += coef[i] / (x + i);
    const double t = x + 7.5;
    return std::sqrt(2.0 * M_PI) * std::pow(t, x + 0.5) * std::exp(-t) * acc;
}

/// Ordinary least squares y = slope * t + intercept.
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 1.0;
};

inline LineFit fit_line(std::span<const double> t, std::span<const double> y) {
    const std::size_t n = t.size();
    double tm = pairwise_sum(t) / double(n);
    double ym = pairwise_sum(y) / double(n);
    double stt = 0.0, sty = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dt = t[i] - tm;
        const double dy = y[i] - ym;
        stt += dt * dt;
        sty += dt * dy;
        syy += dy * dy;
    }
    LineFit f;
    f.slope = sty / stt;
    f.intercept = ym - f.slope * tm;
    f.r_squared = syy > 0.0 ? (sty * sty) / (stt * syy) : 1.0;
    return f;
}

} // namespace fraclab
