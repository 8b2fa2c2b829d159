// Scalar coefficient fields of the curvilinear quadratic forms on the strip
// [0,L) x [-a,a]: theta, alpha_1..3, Omega_1, Omega_2, the gauge phase K with
// its derivatives, the curvature potential V, the assembled W, and the
// sup-norm quantities N(a), M(a) with their small-width scaling probe.
#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "loopspec/curve.hpp"
#include "loopspec/fourier.hpp"
#include "loopspec/params.hpp"
#include "loopspec/quadrature.hpp"

namespace loopspec {

/// Tensor grid on [0,L) x [-a,a]: s uniform periodic, u uniform including 0.
struct StripGrid {
    double L = 0.0;
    double a = 0.0;
    int ns = 0;
    int nu = 0;  // odd, so that u = 0 is a grid row

    StripGrid() = default;
    StripGrid(double length, double halfwidth, int n_s, int n_u)
        : L(length), a(halfwidth), ns(n_s), nu(n_u) {
        if (ns < 64 || nu < 33) throw std::invalid_argument("StripGrid: need at least 64 x 33 nodes");
        if (nu % 2 == 0) throw std::invalid_argument("StripGrid: nu must be odd (u = 0 row)");
        if (!(a > 0.0)) throw std::invalid_argument("StripGrid: halfwidth must be positive");
    }

    double s(int i) const { return L * i / ns; }
    double u(int j) const { return -a + 2.0 * a * j / (nu - 1); }
    int zero_row() const { return (nu - 1) / 2; }
};

/// Sampled scalar field on a strip grid.
struct StripField {
    StripGrid grid;
    Eigen::MatrixXd values;  // ns x nu
    std::string name;

    double at(int i, int j) const { return values(i, j); }

    double max_abs() const { return values.cwiseAbs().maxCoeff(); }

    void check_finite() const {
        if (!values.allFinite()) throw std::runtime_error("StripField '" + name + "': non-finite values");
    }
};

/// Sup-norm data of the residual first-order coefficient and of W + gamma^2/4.
struct SupNorms {
    double a = 0.0;
    double N = 0.0;
    double M = 0.0;
    double fitted_slope = std::numeric_limits<double>::quiet_NaN();
};

/// Pointwise evaluator of every coefficient field. All quantities reduce to
/// the cached curve jet at s; u-integrals (the gauge phase and its
/// s-derivative) use per-panel Gauss-Legendre with analytically differentiated
/// integrands, so on- and off-grid evaluations agree to quadrature accuracy.
class CoeffEvaluator {
public:
    CoeffEvaluator(const LoopCurve& curve, const ModelParams& params, double halfwidth)
        : curve_(&curve), p_(params), a_(halfwidth) {
        p_.validate();
        if (!(halfwidth > 0.0) || halfwidth >= curve.injectivity_halfwidth())
            throw std::invalid_argument("CoeffEvaluator: halfwidth outside the validated tube");
        if (curve.winding_number_origin() != 1)
            throw std::invalid_argument("CoeffEvaluator: flux origin is not enclosed by the loop");
        if (curve.origin_clearance() <= halfwidth)
            throw std::invalid_argument("CoeffEvaluator: strip reaches the flux origin");
    }

    const LoopCurve& curve() const { return *curve_; }
    const ModelParams& params() const { return p_; }
    double halfwidth() const { return a_; }

    // --- pointwise primitives -------------------------------------------

    /// theta(s,u) = 1 / |Psi_a(s,u)|^2 (squared distance to the flux line).
    double theta(double s, double u) const {
        const CurveJet& j = jet(s);
        return 1.0 / theta_inv(j, u);
    }

    void alpha(double s, double u, double& a1, double& a2, double& a3) const {
        const CurveJet& j = jet(s);
        const double th = 1.0 / theta_inv(j, u);
        const double m = 2.0 * p_.c0 * th + p_.B;
        a1 = (p_.c0 * th + 0.5 * p_.B) * (p_.c0 * th + 0.5 * p_.B) / th;
        a2 = m * (j.position.y() + u * j.tangent.x());
        a3 = m * (j.position.x() - u * j.tangent.y());
    }

    /// Omega_1 = (alpha_2 cos H - alpha_3 sin H) / (1 + u gamma); the tangent
    /// components (x', y') stand in for (cos H, sin H), which fixes the
    /// H(0) = 0 normalization Gamma'(0) = (1,0) for arbitrary start points.
    double omega1(double s, double u) const {
        const CurveJet& j = jet(s);
        return omega1_jet(j, u);
    }

    /// Omega_2: coefficient of -Im(g* du g) in the transformed form. In
    /// closed form Omega_2 = (2 c0 theta + B) (Gamma . Gamma'), which vanishes
    /// identically on a circle centered at the flux origin.
    double omega2(double s, double u) const {
        const CurveJet& j = jet(s);
        return omega2_jet(j, u);
    }

    /// V(s,u) = 1/2 (1+ug)^-3 u g'' - 5/4 (1+ug)^-4 u^2 g'^2 - 1/4 (1+ug)^-2 g^2.
    double potential_V(double s, double u) const {
        const CurveJet& j = jet(s);
        const double w = 1.0 + u * j.gamma;
        return 0.5 * u * j.gamma_d2 / (w * w * w) - 1.25 * u * u * j.gamma_d1 * j.gamma_d1 / (w * w * w * w) -
               0.25 * j.gamma * j.gamma / (w * w);
    }

    /// K(s,u) = 1/2 int_0^u Omega_2(s,v) dv.
    double gauge_K(double s, double u) const {
        const CurveJet& j = jet(s);
        return 0.5 * integrate_u([&](double v) { return omega2_jet(j, v); }, u);
    }

    double gauge_Ku(double s, double u) const { return 0.5 * omega2(s, u); }

    /// K_s by differentiation under the integral sign (exact integrand).
    double gauge_Ks(double s, double u) const {
        const CurveJet& j = jet(s);
        return 0.5 * integrate_u([&](double v) { return domega2_ds_jet(j, v); }, u);
    }

    /// W = V + alpha_1 + K_s^2 (1+ug)^-2 + K_u^2 + K_s Omega_1 - K_u Omega_2.
    double potential_W(double s, double u) const {
        const CurveJet& j = jet(s);
        const double w = 1.0 + u * j.gamma;
        double a1, a2, a3;
        alpha(s, u, a1, a2, a3);
        const double ks = gauge_Ks(s, u);
        const double ku = gauge_Ku(s, u);
        return potential_V(s, u) + a1 + ks * ks / (w * w) + ku * ku + ks * omega1_jet(j, u) -
               ku * omega2_jet(j, u);
    }

    /// Integrand of N(a): Omega_1 + 2 K_s (1 + u gamma)^-2.
    double first_order_residual(double s, double u) const {
        const CurveJet& j = jet(s);
        const double w = 1.0 + u * j.gamma;
        return omega1_jet(j, u) + 2.0 * gauge_Ks(s, u) / (w * w);
    }

    /// Integrand of M(a): W + gamma^2 / 4.
    double zero_order_residual(double s, double u) const {
        const CurveJet& j = jet(s);
        return potential_W(s, u) + 0.25 * j.gamma * j.gamma;
    }

private:
    static double theta_inv(const CurveJet& j, double u) {
        const double cross = j.position.x() * j.tangent.y() - j.position.y() * j.tangent.x();
        const double v = j.position.squaredNorm() + u * u - 2.0 * u * cross;
        if (!(v > 0.0)) throw std::domain_error("theta: flux origin lies on the strip");
        return v;
    }

    double omega1_jet(const CurveJet& j, double u) const {
        const double th = 1.0 / theta_inv(j, u);
        const double m = 2.0 * p_.c0 * th + p_.B;
        const double cross = j.position.x() * j.tangent.y() - j.position.y() * j.tangent.x();
        return m * (u - cross) / (1.0 + u * j.gamma);
    }

    double omega2_jet(const CurveJet& j, double u) const {
        const double th = 1.0 / theta_inv(j, u);
        const double m = 2.0 * p_.c0 * th + p_.B;
        return m * j.position.dot(j.tangent);
    }

    // d/ds of Omega_2 at fixed u, via the Frenet relations:
    //   (Gamma.Gamma')' = 1 + gamma * cross,   cross' = -gamma (Gamma.Gamma').
    double domega2_ds_jet(const CurveJet& j, double u) const {
        const double rad = j.position.dot(j.tangent);
        const double cross = j.position.x() * j.tangent.y() - j.position.y() * j.tangent.x();
        const double ti = theta_inv(j, u);
        const double th = 1.0 / ti;
        const double dti = 2.0 * rad + 2.0 * u * j.gamma * rad;  // d/ds theta^{-1}
        const double dth = -th * th * dti;
        const double m = 2.0 * p_.c0 * th + p_.B;
        const double dm = 2.0 * p_.c0 * dth;
        const double drad = 1.0 + j.gamma * cross;
        return dm * rad + m * drad;
    }

    double integrate_u(const std::function<double(double)>& f, double u) const {
        if (u == 0.0) return 0.0;
        const int panels = std::max(4, static_cast<int>(std::ceil(std::abs(u) / a_ * 8)));
        double sum = 0.0;
        for (int k = 0; k < panels; ++k)
            sum += gl5().integrate(f, u * k / panels, u * (k + 1) / panels);
        return sum;
    }

    const CurveJet& jet(double s) const {
        auto it = jets_.find(s);
        if (it != jets_.end()) return it->second;
        auto [pos, inserted] = jets_.emplace(s, curve_->jet(s));
        return pos->second;
    }

    const LoopCurve* curve_;
    ModelParams p_;
    double a_;
    mutable std::map<double, CurveJet> jets_;
};

namespace fieldnames {
inline constexpr const char* theta = "theta";
inline constexpr const char* alpha1 = "alpha1";
inline constexpr const char* alpha2 = "alpha2";
inline constexpr const char* alpha3 = "alpha3";
inline constexpr const char* omega1 = "omega1";
inline constexpr const char* omega2 = "omega2";
inline constexpr const char* gauge_K = "K";
inline constexpr const char* gauge_Ks = "K_s";
inline constexpr const char* gauge_Ku = "K_u";
inline constexpr const char* potential_V = "V";
inline constexpr const char* potential_W = "W";
}  // namespace fieldnames

inline StripField sample_field(const CoeffEvaluator& ev, const StripGrid& grid,
                               const std::function<double(double, double)>& f, std::string name) {
    (void)ev;
    StripField out;
    out.grid = grid;
    out.name = std::move(name);
    out.values.resize(grid.ns, grid.nu);
    for (int i = 0; i < grid.ns; ++i)
        for (int j = 0; j < grid.nu; ++j) out.values(i, j) = f(grid.s(i), grid.u(j));
    out.check_finite();
    return out;
}

inline StripField theta_field(const CoeffEvaluator& ev, const StripGrid& g) {
    return sample_field(ev, g, [&](double s, double u) { return ev.theta(s, u); }, fieldnames::theta);
}

inline std::array<StripField, 3> alpha_fields(const CoeffEvaluator& ev, const StripGrid& g) {
    std::array<StripField, 3> out;
    const char* names[3] = {fieldnames::alpha1, fieldnames::alpha2, fieldnames::alpha3};
    for (std::size_t idx = 0; idx < 3; ++idx) {
        out[idx].grid = g;
        out[idx].name = names[idx];
        out[idx].values.resize(g.ns, g.nu);
    }
    for (int i = 0; i < g.ns; ++i)
        for (int j = 0; j < g.nu; ++j) {
            double a1, a2, a3;
            ev.alpha(g.s(i), g.u(j), a1, a2, a3);
            out[0].values(i, j) = a1;
            out[1].values(i, j) = a2;
            out[2].values(i, j) = a3;
        }
    for (auto& f : out) f.check_finite();
    return out;
}

inline std::array<StripField, 2> omega_fields(const CoeffEvaluator& ev, const StripGrid& g) {
    return {sample_field(ev, g, [&](double s, double u) { return ev.omega1(s, u); }, fieldnames::omega1),
            sample_field(ev, g, [&](double s, double u) { return ev.omega2(s, u); }, fieldnames::omega2)};
}

inline StripField effective_potential_V(const CoeffEvaluator& ev, const StripGrid& g) {
    return sample_field(ev, g, [&](double s, double u) { return ev.potential_V(s, u); },
                        fieldnames::potential_V);
}

inline StripField W_field(const CoeffEvaluator& ev, const StripGrid& g) {
    return sample_field(ev, g, [&](double s, double u) { return ev.potential_W(s, u); },
                        fieldnames::potential_W);
}

/// K, K_s, K_u on the grid. K is accumulated by composite Gauss-Legendre over
/// a u-refinement of the grid spacing; K_s is spectral differentiation of the
/// K rows in s (the pointwise evaluator provides the independent route).
struct GaugePhaseFields {
    StripField K, Ks, Ku;
};

inline GaugePhaseFields gauge_phase(const CoeffEvaluator& ev, const StripGrid& g) {
    GaugePhaseFields out;
    out.K = sample_field(ev, g, [&](double s, double u) { return ev.gauge_K(s, u); }, fieldnames::gauge_K);
    out.Ku = sample_field(ev, g, [&](double s, double u) { return ev.gauge_Ku(s, u); }, fieldnames::gauge_Ku);

    out.Ks.grid = g;
    out.Ks.name = fieldnames::gauge_Ks;
    out.Ks.values.resize(g.ns, g.nu);
    std::vector<double> row(static_cast<std::size_t>(g.ns));
    for (int j = 0; j < g.nu; ++j) {
        for (int i = 0; i < g.ns; ++i) row[static_cast<std::size_t>(i)] = out.K.values(i, j);
        TrigSeries series(row, g.L);
        for (int i = 0; i < g.ns; ++i) out.Ks.values(i, j) = series.eval(g.s(i), 1);
    }
    out.Ks.check_finite();
    return out;
}

/// Dense-grid maxima of |Omega_1 + 2 K_s (1+ug)^-2| and |W + gamma^2/4| with
/// one golden-section refinement around the argmax in each direction.
inline SupNorms sup_norms(const LoopCurve& curve, const ModelParams& params, double a, int ns = 256,
                          int nu = 65) {
    CoeffEvaluator ev(curve, params, a);
    StripGrid g(curve.length(), a, std::max(ns, 256), std::max(nu | 1, 65));

    auto refine = [&](const std::function<double(double, double)>& f) {
        double best = 0.0, sb = 0.0, ub = 0.0;
        for (int i = 0; i < g.ns; ++i)
            for (int j = 0; j < g.nu; ++j) {
                const double v = std::abs(f(g.s(i), g.u(j)));
                if (v > best) { best = v; sb = g.s(i); ub = g.u(j); }
            }
        const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
        // one pass along s, one along u, around the grid argmax
        for (int dir = 0; dir < 2; ++dir) {
            double lo, hi;
            if (dir == 0) { lo = sb - g.L / g.ns; hi = sb + g.L / g.ns; }
            else { lo = std::max(-a, ub - 2.0 * a / (g.nu - 1)); hi = std::min(a, ub + 2.0 * a / (g.nu - 1)); }
            auto val = [&](double t) { return dir == 0 ? std::abs(f(t, ub)) : std::abs(f(sb, t)); };
            double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
            double fc = val(c), fd = val(d);
            for (int it = 0; it < 48; ++it) {
                if (fc > fd) { hi = d; d = c; fd = fc; c = hi - gr * (hi - lo); fc = val(c); }
                else { lo = c; c = d; fc = fd; d = lo + gr * (hi - lo); fd = val(d); }
            }
            const double better = std::max(fc, fd);
            if (better > best) {
                best = better;
                if (dir == 0) sb = 0.5 * (lo + hi); else ub = 0.5 * (lo + hi);
            }
        }
        return best;
    };

    SupNorms out;
    out.a = a;
    out.N = refine([&](double s, double u) { return ev.first_order_residual(s, u); });
    out.M = refine([&](double s, double u) { return ev.zero_order_residual(s, u); });
    return out;
}

/// Zero-width limits: sup over the u = 0 line only. These are the a -> 0
/// limits of N(a), M(a); they need not vanish (measured, not assumed).
inline SupNorms sup_norms_zero_width(const LoopCurve& curve, const ModelParams& params, int ns = 1024) {
    const double a_probe = 1e-3 * curve.injectivity_halfwidth();
    CoeffEvaluator ev(curve, params, a_probe);
    SupNorms out;
    out.a = 0.0;
    for (int i = 0; i < ns; ++i) {
        const double s = curve.length() * i / ns;
        out.N = std::max(out.N, std::abs(ev.first_order_residual(s, 0.0)));
        out.M = std::max(out.M, std::abs(ev.zero_order_residual(s, 0.0)));
    }
    return out;
}

/// Least-squares lines through (a_i, y_i): constrained through the origin and
/// affine.
struct LinearFit {
    double slope_origin = 0.0;
    double slope_affine = 0.0;
    double intercept = 0.0;
    double max_residual_origin = 0.0;
};

inline LinearFit fit_linear(const std::vector<double>& a, const std::vector<double>& y) {
    if (a.size() != y.size() || a.empty()) throw std::invalid_argument("fit_linear: bad data");
    LinearFit f;
    double saa = 0.0, say = 0.0, sa = 0.0, sy = 0.0;
    const int n = static_cast<int>(a.size());
    for (int i = 0; i < n; ++i) {
        saa += a[static_cast<std::size_t>(i)] * a[static_cast<std::size_t>(i)];
        say += a[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(i)];
        sa += a[static_cast<std::size_t>(i)];
        sy += y[static_cast<std::size_t>(i)];
    }
    f.slope_origin = say / saa;
    const double det = n * saa - sa * sa;
    if (std::abs(det) > 0.0) {
        f.slope_affine = (n * say - sa * sy) / det;
        f.intercept = (sy * saa - sa * say) / det;
    }
    for (int i = 0; i < n; ++i)
        f.max_residual_origin = std::max(
            f.max_residual_origin,
            std::abs(f.slope_origin * a[static_cast<std::size_t>(i)] - y[static_cast<std::size_t>(i)]));
    return f;
}

/// Measured small-width behaviour of N(a) + M(a) against the claimed linear
/// law  N + M <= T a. The intercept is reported, never assumed zero.
struct ScalingProbe {
    std::vector<double> a;
    std::vector<double> sum_NM;
    LinearFit fit;
    bool intercept_flag = false;  // intercept exceeds 10% of the data range
};

inline ScalingProbe scaling_probe(const LoopCurve& curve, const ModelParams& params,
                                  const std::vector<double>& a_sequence, int ns = 256, int nu = 65) {
    if (a_sequence.empty()) throw std::invalid_argument("scaling_probe: empty width sequence");
    ScalingProbe pr;
    for (double a : a_sequence) {
        const SupNorms n = sup_norms(curve, params, a, ns, nu);
        pr.a.push_back(a);
        pr.sum_NM.push_back(n.N + n.M);
    }
    pr.fit = fit_linear(pr.a, pr.sum_NM);
    double ymin = pr.sum_NM[0], ymax = pr.sum_NM[0];
    for (double v : pr.sum_NM) {
        ymin = std::min(ymin, v);
        ymax = std::max(ymax, v);
    }
    pr.intercept_flag = std::abs(pr.fit.intercept) > 0.1 * std::max(ymax - ymin, 1e-300);
    return pr;
}

}  // namespace loopspec
