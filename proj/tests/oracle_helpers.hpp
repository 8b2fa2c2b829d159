// Independent oracles for the test suites: routines here must not share code
// paths with the library implementations they check.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

/// Adaptive Simpson quadrature (independent of the library's Gauss panels).
inline double simpson_adaptive(const std::function<double(double)>& f, double a, double b,
                               double tol = 1e-12, int depth = 0) {
    const double m = 0.5 * (a + b);
    const double fa = f(a), fb = f(b), fm = f(m);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double left = (m - a) / 6.0 * (fa + 4.0 * f(lm) + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * f(rm) + fb);
    if (depth > 48 || std::abs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return simpson_adaptive(f, a, m, tol / 2, depth + 1) + simpson_adaptive(f, m, b, tol / 2, depth + 1);
}

/// Perimeter of the ellipse (a cos t, b sin t).
inline double ellipse_perimeter(double a, double b) {
    return simpson_adaptive(
        [=](double t) {
            return std::sqrt(a * a * std::sin(t) * std::sin(t) + b * b * std::cos(t) * std::cos(t));
        },
        0.0, 2.0 * M_PI, 1e-13);
}

/// Unsigned curvature of the ellipse (a cos t, b sin t) at parameter t.
inline double ellipse_curvature(double a, double b, double t) {
    const double w = a * a * std::sin(t) * std::sin(t) + b * b * std::cos(t) * std::cos(t);
    return a * b / std::pow(w, 1.5);
}

/// Eigenvalues of the free periodic Laplacian -d^2/ds^2 on (0, L].
inline std::vector<double> free_periodic_laplacian(double L, int count) {
    std::vector<double> v;
    v.push_back(0.0);
    for (int k = 1; static_cast<int>(v.size()) < count; ++k) {
        const double e = std::pow(2.0 * M_PI * k / L, 2);
        v.push_back(e);
        v.push_back(e);
    }
    v.resize(static_cast<std::size_t>(count));
    return v;
}

/// Brute-force tensor merge: all pairwise sums, sorted ascending.
inline std::vector<double> brute_tensor_sums(const std::vector<double>& xs,
                                             const std::vector<double>& ys, int n) {
    std::vector<double> all;
    for (double x : xs)
        for (double y : ys) all.push_back(x + y);
    std::sort(all.begin(), all.end());
    all.resize(static_cast<std::size_t>(n));
    return all;
}

/// AB + Landau closed form: levels B(2 n' + 1 + |m - c0| - (m - c0)).
inline double ab_landau_level(int m, int nprime, double c0, double B) {
    const double d = m - c0;
    return B * (2.0 * nprime + 1.0 + std::abs(d) - d);
}

}  // namespace oracle
