// Periodic 1D Schrodinger eigensolver by trigonometric collocation: the
// comparison operator S = -d^2/ds^2 - gamma^2/4 and the bracket operators U+-.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "loopspec/curve.hpp"
#include "loopspec/params.hpp"
#include "loopspec/strip_fields.hpp"

namespace loopspec {

/// -p d^2/ds^2 + q(s) on [0,L] with fully periodic boundary conditions
/// (values and first derivatives matching at the seam).
struct Periodic1DOperator {
    double L = 0.0;
    double p = 1.0;
    std::function<double(double)> q;
};

/// Ascending finite list of eigenvalues with per-value truncation estimates.
struct Spectrum {
    std::vector<double> values;
    std::vector<double> error_estimate;
    int grid = 0;

    /// Multiplicity groups under a relative clustering threshold.
    std::vector<int> multiplicities(double rel_tol = 1e-8) const {
        std::vector<int> mult;
        for (std::size_t i = 0; i < values.size();) {
            std::size_t j = i + 1;
            while (j < values.size() &&
                   std::abs(values[j] - values[i]) <= rel_tol * std::max(1.0, std::abs(values[i])))
                ++j;
            mult.push_back(static_cast<int>(j - i));
            i = j;
        }
        return mult;
    }
};

namespace detail {

/// Second-derivative trigonometric collocation matrix on N uniform periodic
/// points with period L (symmetric; exact on the resolved trig modes).
inline Eigen::MatrixXd periodic_d2(int n, double L) {
    Eigen::MatrixXd D(n, n);
    const double h = 2.0 * M_PI / n;
    const double scale = std::pow(2.0 * M_PI / L, 2);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) {
                D(i, j) = scale * (-M_PI * M_PI / (3.0 * h * h) - 1.0 / 6.0);
            } else {
                const int k = i - j;
                const double s = std::sin(0.5 * h * k);
                D(i, j) = scale * (-(k % 2 == 0 ? 1.0 : -1.0) * 0.5 / (s * s));
            }
        }
    return D;
}

inline std::vector<double> lowest_eigenvalues(const Periodic1DOperator& op, int n, int grid) {
    Eigen::MatrixXd A = -op.p * periodic_d2(grid, op.L);
    for (int i = 0; i < grid; ++i) A(i, i) += op.q(op.L * i / grid);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A, Eigen::EigenvaluesOnly);
    std::vector<double> vals(es.eigenvalues().data(), es.eigenvalues().data() + grid);
    std::sort(vals.begin(), vals.end());
    vals.resize(static_cast<std::size_t>(std::min(n, grid)));
    return vals;
}

}  // namespace detail

/// Lowest n eigenvalues with an error estimate from grid halving; the
/// operator's symmetry is verified at assembly.
inline Spectrum solve_periodic(const Periodic1DOperator& op, int n, int grid) {
    if (n < 1) throw std::invalid_argument("solve_periodic: need n >= 1");
    if (grid < std::max(64, 8 * n)) throw std::invalid_argument("solve_periodic: grid too small for requested count");
    if (!(op.p > 0.0)) throw std::domain_error("solve_periodic: kinetic coefficient must be positive");
    Spectrum out;
    out.grid = grid;
    out.values = detail::lowest_eigenvalues(op, n, grid);
    const std::vector<double> coarse = detail::lowest_eigenvalues(op, n, grid / 2);
    // dense-solver round-off grows with the operator norm ~ p (pi grid / L)^2
    const double opnorm = op.p * std::pow(M_PI * grid / op.L, 2);
    out.error_estimate.resize(out.values.size());
    for (std::size_t i = 0; i < out.values.size(); ++i) {
        const double diff = std::abs(out.values[i] - coarse[i]);
        out.error_estimate[i] = std::max(2.0 * diff, 1e-14 * opnorm + 1e-12 * std::max(1.0, std::abs(out.values[i])));
    }
    return out;
}

/// Spectrum of S = -d^2/ds^2 - gamma(s)^2/4 on the loop.
inline Spectrum effective_spectrum(const LoopCurve& curve, int n, int grid = 256) {
    Periodic1DOperator op;
    op.L = curve.length();
    op.p = 1.0;
    op.q = [&curve](double s) {
        const double g = curve.signed_curvature(s);
        return -0.25 * g * g;
    };
    return solve_periodic(op, n, grid);
}

enum class BracketSide { plus, minus };

/// Constant worst-case kinetic coefficient of U+-.
inline double bracket_kinetic_coefficient(BracketSide side, double a, double gamma_plus,
                                          const SupNorms& norms) {
    const double base = (side == BracketSide::plus) ? 1.0 / std::pow(1.0 - a * gamma_plus, 2)
                                                    : 1.0 / std::pow(1.0 + a * gamma_plus, 2);
    return base + (side == BracketSide::plus ? 0.5 : -0.5) * norms.N;
}

/// U+- = -[(1 -+ a gamma_+)^-2 +- N/2] d^2/ds^2 - gamma^2/4 +- (N/2 + M),
/// periodic on [0,L]. Throws if the resulting kinetic coefficient is not
/// positive (the minus side loses ellipticity once N(a) is large).
inline Spectrum bracket_operator_spectrum(const LoopCurve& curve, double a, BracketSide side,
                                          const SupNorms& norms, int n, int grid = 256) {
    if (!(a > 0.0) || !(a < 0.5 / curve.gamma_plus()))
        throw std::invalid_argument("bracket_operator_spectrum: a out of range");
    const double p = bracket_kinetic_coefficient(side, a, curve.gamma_plus(), norms);
    const double shift = (side == BracketSide::plus ? 1.0 : -1.0) * (0.5 * norms.N + norms.M);
    Periodic1DOperator op;
    op.L = curve.length();
    op.p = p;
    op.q = [&curve, shift](double s) {
        const double g = curve.signed_curvature(s);
        return -0.25 * g * g + shift;
    };
    return solve_periodic(op, n, grid);
}

/// Scaling report for the bracket eigenvalues: gaps to the zero-width limit
/// operator (linear in a), and the measured offset of that limit from the
/// comparison eigenvalues mu_j (reported, not asserted).
struct Est1Report {
    int j = 0;
    std::vector<double> a;
    std::vector<double> mu_plus, mu_minus;
    std::vector<bool> minus_valid;  // the minus operator is elliptic at this width
    std::vector<double> gap_plus, gap_minus;          // |mu_j(a) - mu_j(0+)|
    std::vector<double> gap_to_mu_plus, gap_to_mu_minus;  // |mu_j(a) - mu_j|
    double mu_limit_plus = 0.0, mu_limit_minus = 0.0;  // zero-width operator values
    double mu = 0.0;                                   // comparison eigenvalue
    double offset_plus = 0.0, offset_minus = 0.0;      // |limit - mu|
    std::vector<double> ratio_plus, ratio_minus;       // per-step gap ratios (NaN when invalid)
    double fitted_slope_plus = 0.0, fitted_slope_minus = 0.0;
    bool linear_pass = false;  // per-step gap ratio tracks the width ratio within 20%
};

inline Est1Report est1_check(const LoopCurve& curve, const ModelParams& params, int j,
                             const std::vector<double>& a_sequence, int grid = 256) {
    if (j < 1) throw std::invalid_argument("est1_check: index must be >= 1");
    if (a_sequence.size() < 2) throw std::invalid_argument("est1_check: need at least two widths");
    Est1Report rep;
    rep.j = j;
    rep.mu = effective_spectrum(curve, j, grid).values[static_cast<std::size_t>(j - 1)];

    // zero-width limit operator: kinetic 1 +- N0/2, shift +-(N0/2 + M0)
    const SupNorms n0 = sup_norms_zero_width(curve, params);
    for (BracketSide side : {BracketSide::plus, BracketSide::minus}) {
        Periodic1DOperator op;
        op.L = curve.length();
        op.p = 1.0 + (side == BracketSide::plus ? 0.5 : -0.5) * n0.N;
        const double shift = (side == BracketSide::plus ? 1.0 : -1.0) * (0.5 * n0.N + n0.M);
        op.q = [&curve, shift](double s) {
            const double g = curve.signed_curvature(s);
            return -0.25 * g * g + shift;
        };
        const double v = solve_periodic(op, j, grid).values[static_cast<std::size_t>(j - 1)];
        (side == BracketSide::plus ? rep.mu_limit_plus : rep.mu_limit_minus) = v;
    }
    rep.offset_plus = std::abs(rep.mu_limit_plus - rep.mu);
    rep.offset_minus = std::abs(rep.mu_limit_minus - rep.mu);

    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (double a : a_sequence) {
        const SupNorms norms = sup_norms(curve, params, a);
        const double mp =
            bracket_operator_spectrum(curve, a, BracketSide::plus, norms, j, grid).values[static_cast<std::size_t>(j - 1)];
        rep.a.push_back(a);
        rep.mu_plus.push_back(mp);
        rep.gap_plus.push_back(std::abs(mp - rep.mu_limit_plus));
        rep.gap_to_mu_plus.push_back(std::abs(mp - rep.mu));
        // The minus operator loses ellipticity once N(a)/2 exceeds the
        // kinetic floor; such widths are reported as invalid, not solved.
        if (bracket_kinetic_coefficient(BracketSide::minus, a, curve.gamma_plus(), norms) > 0.0) {
            const double mm = bracket_operator_spectrum(curve, a, BracketSide::minus, norms, j, grid)
                                  .values[static_cast<std::size_t>(j - 1)];
            rep.minus_valid.push_back(true);
            rep.mu_minus.push_back(mm);
            rep.gap_minus.push_back(std::abs(mm - rep.mu_limit_minus));
            rep.gap_to_mu_minus.push_back(std::abs(mm - rep.mu));
        } else {
            rep.minus_valid.push_back(false);
            rep.mu_minus.push_back(nan);
            rep.gap_minus.push_back(nan);
            rep.gap_to_mu_minus.push_back(nan);
        }
    }

    rep.linear_pass = true;
    int ratios_checked = 0;
    for (std::size_t i = 0; i + 1 < rep.a.size(); ++i) {
        const double width_ratio = rep.a[i + 1] / rep.a[i];
        const double rp = rep.gap_plus[i + 1] / rep.gap_plus[i];
        rep.ratio_plus.push_back(rp);
        if (rp < 0.8 * width_ratio || rp > 1.2 * width_ratio) rep.linear_pass = false;
        ++ratios_checked;
        if (rep.minus_valid[i] && rep.minus_valid[i + 1]) {
            const double rm = rep.gap_minus[i + 1] / rep.gap_minus[i];
            rep.ratio_minus.push_back(rm);
            if (rm < 0.8 * width_ratio || rm > 1.2 * width_ratio) rep.linear_pass = false;
            ++ratios_checked;
        } else {
            rep.ratio_minus.push_back(nan);
        }
    }
    if (ratios_checked == 0) rep.linear_pass = false;

    auto fit_origin = [](const std::vector<double>& x, const std::vector<double>& y) {
        double sxx = 0.0, sxy = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (!std::isfinite(y[i])) continue;
            sxx += x[i] * x[i];
            sxy += x[i] * y[i];
        }
        return sxx > 0.0 ? sxy / sxx : 0.0;
    };
    rep.fitted_slope_plus = fit_origin(rep.a, rep.gap_plus);
    rep.fitted_slope_minus = fit_origin(rep.a, rep.gap_minus);
    return rep;
}

}  // namespace loopspec
