// Gauss-Legendre panel quadrature with adaptive bisection.
#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace loopspec {

/// Nodes/weights of the n-point Gauss-Legendre rule on [-1,1], computed once
/// by Newton iteration on the Legendre polynomial.
template <int N>
struct GaussLegendre {
    std::array<double, N> node{};
    std::array<double, N> weight{};

    GaussLegendre() {
        for (int i = 0; i < N; ++i) {
            double x = std::cos(M_PI * (i + 0.75) / (N + 0.5));
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = x;
                for (int k = 2; k <= N; ++k) {
                    const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                const double dp = N * (x * p1 - p0) / (x * x - 1.0);
                const double dx = p1 / dp;
                x -= dx;
                if (std::abs(dx) < 1e-16) break;
            }
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= N; ++k) {
                const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            const double dp = N * (x * p1 - p0) / (x * x - 1.0);
            node[static_cast<std::size_t>(i)] = x;
            weight[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
    }

    double integrate(const std::function<double(double)>& f, double a, double b) const {
        const double c = 0.5 * (a + b), h = 0.5 * (b - a);
        double s = 0.0;
        for (int i = 0; i < N; ++i)
            s += weight[static_cast<std::size_t>(i)] * f(c + h * node[static_cast<std::size_t>(i)]);
        return s * h;
    }
};

inline const GaussLegendre<5>& gl5() {
    static const GaussLegendre<5> rule;
    return rule;
}

inline const GaussLegendre<16>& gl16() {
    static const GaussLegendre<16> rule;
    return rule;
}

/// Adaptive Gauss-Legendre integration to absolute/relative tolerance.
inline double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                 double tol = 1e-12, int max_depth = 40) {
    std::function<double(double, double, double, int)> rec =
        [&](double lo, double hi, double whole, int depth) -> double {
        const double mid = 0.5 * (lo + hi);
        const double left = gl16().integrate(f, lo, mid);
        const double right = gl16().integrate(f, mid, hi);
        const double err = std::abs(left + right - whole);
        if (err < tol * std::max(1.0, std::abs(left + right)) || depth >= max_depth)
            return left + right;
        return rec(lo, mid, left, depth + 1) + rec(mid, hi, right, depth + 1);
    };
    return rec(a, b, gl16().integrate(f, a, b), 0);
}

}  // namespace loopspec
