// High-precision eigenvalue oracle for the full 2D operator on circular
// loops concentric with the flux: exact angular separation, per-sector radial
// solves by two-sided shooting on the matching determinant, and the
// persistent-current measurement.
//
// Sector m reduces to  -u'' - u'/r + Q(r) u = lambda u  on (0, r_max) with
//   Q(r) = (m - c0 - B r^2/2)^2 / r^2,
// regularity u ~ r^{|m-c0|} at the origin (the non-integer Frobenius
// exponent is the AB hallmark), Dirichlet decay at r_max, and the jump
// u'(R+) - u'(R-) = -beta u(R) across the loop.
//
// Since the delta term is a rank-one form perturbation, eigenvalue
// interlacing gives at most ONE negative eigenvalue per sector; it is found
// by bisection on the strictly decreasing log-derivative mismatch
// F(lambda) = w_in(R) - w_out(R) - beta, with w integrated in Riccati form
// (scale-free, no overflow at large beta). Non-negative states use a
// finite-element first pass for brackets and a renormalized linear shooting
// refinement on the matching determinant.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <lapacke.h>

#include "loopspec/params.hpp"
#include "loopspec/periodic_spectrum.hpp"

namespace loopspec {

struct RadialOptions {
    double shoot_rtol = 1e-12;
    int max_sectors = 48;          // safety cap for the automatic m scan
    int states_per_sector = 6;     // non-negative states kept per sector (matrix path)
    double r_origin = 1e-3;        // matrix-pass inner truncation
};

struct RadialEigenvalue {
    double value = 0.0;
    int m = 0;
    int radial_index = 0;  // 0 = lowest state of the sector
    double error = 0.0;
};

struct RadialSpectrum {
    std::vector<RadialEigenvalue> states;  // ascending
    Spectrum to_spectrum() const {
        Spectrum s;
        for (const auto& st : states) {
            s.values.push_back(st.value);
            s.error_estimate.push_back(st.error);
        }
        return s;
    }
    double max_error() const {
        double e = 0.0;
        for (const auto& st : states) e = std::max(e, st.error);
        return e;
    }
};

namespace radial_detail {

struct SectorPotential {
    double nu;      // |m - c0|
    double nutil;   // m - c0
    double B;
    double Q(double r) const {
        const double x = (nutil - 0.5 * B * r * r) / r;
        return x * x;
    }
    // Frobenius series u = r^nu (1 + a2 r^2 + a4 r^4): coefficients from
    // Q = nu^2/r^2 - B nutil + B^2 r^2 / 4.
    void series(double lambda, double& a2, double& a4) const {
        const double c2 = -B * nutil - lambda;
        const double c4 = 0.25 * B * B;
        a2 = c2 / (4.0 * nu + 4.0);
        a4 = (c2 * a2 + c4) / (8.0 * nu + 16.0);
    }
};

/// Cash-Karp embedded RK45 with adaptive steps for small ODE systems.
template <int N>
struct AdaptiveRK {
    std::function<void(double, const double*, double*)> f;
    double rtol = 1e-12;
    double atol = 1e-14;

    /// Integrates y from x0 to x1 (either direction); renormalizes by the
    /// supplied hook (may be null) after each accepted step.
    void integrate(double x0, double x1, double* y,
                   const std::function<void(double*)>& renorm = nullptr) const {
        static constexpr double b2[] = {0.2};
        static constexpr double b3[] = {3.0 / 40, 9.0 / 40};
        static constexpr double b4[] = {0.3, -0.9, 1.2};
        static constexpr double b5[] = {-11.0 / 54, 2.5, -70.0 / 27, 35.0 / 27};
        static constexpr double b6[] = {1631.0 / 55296, 175.0 / 512, 575.0 / 13824,
                                        44275.0 / 110592, 253.0 / 4096};
        static constexpr double c[] = {37.0 / 378, 0.0, 250.0 / 621, 125.0 / 594, 0.0, 512.0 / 1771};
        static constexpr double dc[] = {37.0 / 378 - 2825.0 / 27648,  0.0,
                                        250.0 / 621 - 18575.0 / 48384, 125.0 / 594 - 13525.0 / 55296,
                                        -277.0 / 14336,                512.0 / 1771 - 0.25};
        const double dir = (x1 > x0) ? 1.0 : -1.0;
        double x = x0;
        double h = dir * std::max(1e-10, 1e-3 * std::abs(x1 - x0));
        double k1[N], k2[N], k3[N], k4[N], k5[N], k6[N], yt[N], ynew[N], yerr[N];
        int guard = 0;
        while (dir * (x1 - x) > 1e-14 * std::abs(x1 - x0)) {
            if (++guard > 2000000) throw std::runtime_error("radial integrator: step limit exceeded");
            if (dir * (x + h - x1) > 0.0) h = x1 - x;
            f(x, y, k1);
            for (int i = 0; i < N; ++i) yt[i] = y[i] + h * b2[0] * k1[i];
            f(x + 0.2 * h, yt, k2);
            for (int i = 0; i < N; ++i) yt[i] = y[i] + h * (b3[0] * k1[i] + b3[1] * k2[i]);
            f(x + 0.3 * h, yt, k3);
            for (int i = 0; i < N; ++i) yt[i] = y[i] + h * (b4[0] * k1[i] + b4[1] * k2[i] + b4[2] * k3[i]);
            f(x + 0.6 * h, yt, k4);
            for (int i = 0; i < N; ++i)
                yt[i] = y[i] + h * (b5[0] * k1[i] + b5[1] * k2[i] + b5[2] * k3[i] + b5[3] * k4[i]);
            f(x + h, yt, k5);
            for (int i = 0; i < N; ++i)
                yt[i] = y[i] + h * (b6[0] * k1[i] + b6[1] * k2[i] + b6[2] * k3[i] + b6[3] * k4[i] +
                                    b6[4] * k5[i]);
            f(x + 0.875 * h, yt, k6);
            double errmax = 0.0;
            for (int i = 0; i < N; ++i) {
                ynew[i] = y[i] + h * (c[0] * k1[i] + c[2] * k3[i] + c[3] * k4[i] + c[5] * k6[i]);
                yerr[i] = h * (dc[0] * k1[i] + dc[1] * k2[i] + dc[2] * k3[i] + dc[3] * k4[i] +
                               dc[4] * k5[i] + dc[5] * k6[i]);
                const double scale = atol + rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
                errmax = std::max(errmax, std::abs(yerr[i]) / scale);
            }
            if (errmax <= 1.0) {
                x += h;
                for (int i = 0; i < N; ++i) y[i] = ynew[i];
                if (renorm) renorm(y);
                h *= std::min(5.0, 0.9 * std::pow(std::max(errmax, 1e-16), -0.2));
            } else {
                h *= std::max(0.1, 0.9 * std::pow(errmax, -0.25));
            }
        }
    }
};

/// Inner log-derivative w(R-) for lambda below the potential floor
/// (nodeless regime; Riccati form is pole-free there).
inline double riccati_inner(const SectorPotential& sp, double lambda, double R, double rtol) {
    double a2, a4;
    sp.series(lambda, a2, a4);
    double rs = std::min(0.02 * R, 0.3 * R / std::sqrt(1.0 + std::abs(a2) * R * R));
    rs = std::min(rs, std::pow(1e-6 / std::max(std::abs(a2), 1e-30), 0.5));
    rs = std::min(rs, std::pow(1e-8 / std::max(std::abs(a4), 1e-30), 0.25));
    rs = std::max(rs, 1e-12 * R);
    const double poly = 1.0 + a2 * rs * rs + a4 * std::pow(rs, 4);
    double w = sp.nu / rs + (2.0 * a2 * rs + 4.0 * a4 * rs * rs * rs) / poly;

    AdaptiveRK<1> rk;
    rk.rtol = rtol;
    rk.atol = 1e-12;
    rk.f = [&](double r, const double* y, double* dy) {
        dy[0] = -y[0] * y[0] - y[0] / r + (sp.Q(r) - lambda);
    };
    double y[1] = {w};
    rk.integrate(rs, R, y);
    return y[0];
}

/// Outer log-derivative w(R+) from a WKB start at r_max (decaying branch;
/// inward integration is stable and washes out the start error).
inline double riccati_outer(const SectorPotential& sp, double lambda, double R, double r_max,
                            double rtol) {
    const double q = sp.Q(r_max) - lambda;
    if (!(q > 0.0)) throw std::runtime_error("radial oracle: r_max inside the classical region");
    // first WKB correction: w = -sqrt(q) - q'/(4q)
    const double h = 1e-6 * r_max;
    const double qp = (sp.Q(r_max + h) - sp.Q(r_max - h)) / (2.0 * h);
    double w = -std::sqrt(q) - qp / (4.0 * q);
    AdaptiveRK<1> rk;
    rk.rtol = rtol;
    rk.atol = 1e-12;
    rk.f = [&](double r, const double* y, double* dy) {
        dy[0] = -y[0] * y[0] - y[0] / r + (sp.Q(r) - lambda);
    };
    double y[1] = {w};
    rk.integrate(r_max, R, y);
    return y[0];
}

/// Mismatch whose unique zero in (lambda_floor, 0) is the sector's negative
/// eigenvalue: F = w_in - w_out - beta, strictly decreasing in lambda.
inline double negative_state_mismatch(const SectorPotential& sp, double lambda, double R,
                                      double r_max, double beta, double rtol) {
    return riccati_inner(sp, lambda, R, rtol) - riccati_outer(sp, lambda, R, r_max, rtol) - beta;
}

/// Linear two-sided shooting for general (oscillatory) states: returns the
/// matching determinant D = u_in u'_out - u'_in u_out + beta u_in u_out,
/// computed with positive renormalization (sign-stable).
inline double matching_determinant(const SectorPotential& sp, double lambda, double R, double r_max,
                                   double beta, double rtol) {
    AdaptiveRK<2> rk;
    rk.rtol = rtol;
    rk.atol = 1e-300;
    rk.f = [&](double r, const double* y, double* dy) {
        dy[0] = y[1];
        dy[1] = -y[1] / r + (sp.Q(r) - lambda) * y[0];
    };
    auto renorm = [](double* y) {
        const double m = std::max(std::abs(y[0]), std::abs(y[1]));
        if (m > 1e100) {
            y[0] /= m;
            y[1] /= m;
        }
    };

    double a2, a4;
    sp.series(lambda, a2, a4);
    double rs = std::min(0.02 * R, std::pow(1e-6 / std::max(std::abs(a2), 1e-30), 0.5));
    rs = std::min(rs, std::pow(1e-8 / std::max(std::abs(a4), 1e-30), 0.25));
    rs = std::max(rs, 1e-10 * R);
    const double poly = 1.0 + a2 * rs * rs + a4 * std::pow(rs, 4);
    double yin[2] = {poly, poly * (sp.nu / rs + (2.0 * a2 * rs + 4.0 * a4 * rs * rs * rs) / poly)};
    rk.integrate(rs, R, yin, renorm);

    const double q = sp.Q(r_max) - lambda;
    if (!(q > 0.0)) throw std::runtime_error("radial oracle: r_max inside the classical region");
    double yout[2] = {1.0, -std::sqrt(q)};
    rk.integrate(r_max, R, yout, renorm);

    const double scale = std::max({std::abs(yin[0]), std::abs(yin[1]), 1e-300}) *
                         std::max({std::abs(yout[0]), std::abs(yout[1]), 1e-300});
    return (yin[0] * yout[1] - yin[1] * yout[0] + beta * yin[0] * yout[0]) / scale;
}

/// Graded radial mesh containing R as a node: fine spacing h0 near the loop,
/// geometric growth outward, proportional grading toward the origin.
inline std::vector<double> graded_mesh(double R, double r0, double r_max, double h0, double h_max) {
    std::vector<double> down, up;
    double h = h0;
    for (double r = R; r > r0;) {
        r -= h;
        if (r <= r0 * 1.5) {
            // proportional tail toward the origin
            while (r > r0 * 1.05) {
                down.push_back(r);
                r *= 0.8;
            }
            break;
        }
        down.push_back(r);
        h = std::min(h * 1.09, h_max);
    }
    down.push_back(r0);
    h = h0;
    for (double r = R; r < r_max;) {
        r += h;
        if (r >= r_max - 0.5 * h) break;
        up.push_back(r);
        h = std::min(h * 1.09, h_max);
    }
    std::vector<double> mesh;
    for (auto it = down.rbegin(); it != down.rend(); ++it) mesh.push_back(*it);
    mesh.push_back(R);
    for (double r : up) mesh.push_back(r);
    mesh.push_back(r_max);
    return mesh;
}

/// P1 finite-element first pass (cylindrical weight, lumped mass, exact
/// delta coupling at the R node) for bracket-quality eigenvalues.
inline std::vector<double> matrix_pass(const SectorPotential& sp, double R, double r0, double r_max,
                                       double beta, double h0, int count) {
    const std::vector<double> mesh = graded_mesh(R, r0, r_max, h0, std::min(0.15, r_max / 120.0));
    const int nn = static_cast<int>(mesh.size());
    std::vector<double> diag(static_cast<std::size_t>(nn), 0.0),
        off(static_cast<std::size_t>(nn - 1), 0.0), mass(static_cast<std::size_t>(nn), 0.0);

    const double gl_x[4] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                            0.8611363115940526};
    const double gl_w[4] = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                            0.3478548451374538};
    for (int e = 0; e < nn - 1; ++e) {
        const double ra = mesh[static_cast<std::size_t>(e)], rb = mesh[static_cast<std::size_t>(e + 1)];
        const double h = rb - ra;
        const double rmid = 0.5 * (ra + rb);
        const double kstiff = rmid / h;  // int r/h^2 over the element
        diag[static_cast<std::size_t>(e)] += kstiff;
        diag[static_cast<std::size_t>(e + 1)] += kstiff;
        off[static_cast<std::size_t>(e)] -= kstiff;
        for (int g = 0; g < 4; ++g) {
            const double r = rmid + 0.5 * h * gl_x[g];
            const double wgt = 0.5 * h * gl_w[g] * r;
            const double pa = (rb - r) / h, pb = (r - ra) / h;
            const double q = sp.Q(r);
            diag[static_cast<std::size_t>(e)] += wgt * q * pa * pa;
            diag[static_cast<std::size_t>(e + 1)] += wgt * q * pb * pb;
            off[static_cast<std::size_t>(e)] += wgt * q * pa * pb;
            mass[static_cast<std::size_t>(e)] += wgt * pa;  // row-sum lumping
            mass[static_cast<std::size_t>(e + 1)] += wgt * pb;
        }
    }
    // delta line term at the R node
    int iR = 0;
    for (int i = 0; i < nn; ++i)
        if (std::abs(mesh[static_cast<std::size_t>(i)] - R) < 1e-12) iR = i;
    diag[static_cast<std::size_t>(iR)] -= beta * R;

    // Dirichlet at r_max always; at r0 when the Frobenius exponent is positive
    const int lo = (sp.nu > 1e-9) ? 1 : 0;
    const int hi = nn - 1;  // exclusive
    const int n = hi - lo;
    std::vector<double> d(static_cast<std::size_t>(n)), e_off(static_cast<std::size_t>(n - 1));
    for (int i = 0; i < n; ++i) {
        const double mi = mass[static_cast<std::size_t>(lo + i)];
        d[static_cast<std::size_t>(i)] = diag[static_cast<std::size_t>(lo + i)] / mi;
        if (i + 1 < n) {
            const double mj = mass[static_cast<std::size_t>(lo + i + 1)];
            e_off[static_cast<std::size_t>(i)] =
                off[static_cast<std::size_t>(lo + i)] / std::sqrt(mi * mj);
        }
    }

    const int want = std::min(count, n);
    std::vector<double> vals(static_cast<std::size_t>(n));
    std::vector<int> isuppz(static_cast<std::size_t>(2 * std::max(1, want)));
    int found = 0;
    const int info = LAPACKE_dstevr(LAPACK_COL_MAJOR, 'N', 'I', n, d.data(), e_off.data(), 0.0, 0.0, 1,
                                    want, 0.0, &found, vals.data(), nullptr, 1, isuppz.data());
    if (info != 0) throw std::runtime_error("radial oracle: LAPACK dstevr failed");
    vals.resize(static_cast<std::size_t>(found));
    return vals;
}

inline double auto_r_max(const SectorPotential& sp, double R, double lambda_floor) {
    // confining term B^2 r^2 / 4 exceeds |target| by >= 25
    const double need = std::abs(lambda_floor) + 25.0 + std::abs(sp.B * sp.nutil);
    double rm = 2.0 * std::sqrt(need) / std::max(sp.B, 1e-9);
    rm = std::max(rm, R + 2.0);
    return rm;
}

struct SectorStates {
    std::vector<RadialEigenvalue> states;
    double lowest = std::numeric_limits<double>::infinity();
};

/// All states of sector m below `cutoff`, negative ones by Riccati bisection
/// (provably at most one: the delta is a rank-one form perturbation),
/// non-negative ones by the FE pass plus determinant refinement.
inline SectorStates solve_sector(int m, double R, const ModelParams& p, double cutoff, int count,
                                 const RadialOptions& opt) {
    SectorPotential sp;
    sp.nutil = m - p.c0;
    sp.nu = std::abs(sp.nutil);
    sp.B = p.B;
    SectorStates out;

    const double beta = p.beta;
    const double lambda_floor = -0.26 * beta * beta - 2.0 * p.B * (sp.nu + 2.0) - 10.0;
    const double r_max = auto_r_max(sp, R, lambda_floor);

    int radial_index = 0;
    if (beta > 0.0) {
        auto F = [&](double lam) {
            return negative_state_mismatch(sp, lam, R, r_max, beta, opt.shoot_rtol);
        };
        const double eps_top = -1e-9 * std::max(1.0, beta * beta);
        if (F(eps_top) < 0.0) {  // bound state exists (F is decreasing, F(floor) > 0)
            double lo = lambda_floor, hi = eps_top;
            double flo = F(lo);
            if (flo <= 0.0) throw std::runtime_error("radial oracle: bisection floor not below ground state");
            for (int it = 0; it < 90; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double fm = F(mid);
                if (fm > 0.0) lo = mid;
                else hi = mid;
                if (hi - lo < 1e-13 * std::max(1.0, std::abs(mid))) break;
            }
            const double lam = 0.5 * (lo + hi);
            // integration-tolerance sensitivity as the error estimate
            const double coarse_lo = negative_state_mismatch(sp, lam, R, r_max, beta, opt.shoot_rtol * 100);
            const double fine_lo = F(lam);
            const double dF = (F(lam + std::max(1e-6, 1e-8 * std::abs(lam))) - fine_lo) /
                              std::max(1e-6, 1e-8 * std::abs(lam));
            double err = std::abs((coarse_lo - fine_lo) / dF) + (hi - lo);
            err = std::max(err, 1e-12 * std::max(1.0, std::abs(lam)));
            if (lam < cutoff) {
                out.states.push_back({lam, m, radial_index, err});
                out.lowest = lam;
            } else {
                out.lowest = lam;
            }
            ++radial_index;
        }
    }

    if (cutoff > 0.0 && static_cast<int>(out.states.size()) < count) {
        // Non-negative part of the sector via FE brackets + determinant
        // bisection. These states live at O(B) energies, so the truncation
        // radius is set from their scale, not from the deep-state floor.
        const double lam_need =
            p.B * (2.0 * (opt.states_per_sector + 3) + 1.0 + sp.nu - sp.nutil) + 10.0;
        const double r_max_pos = auto_r_max(sp, R, lam_need);
        const double h0 = std::min(0.02 * R, 0.25 / std::max(beta, 1.0));
        const auto approx = matrix_pass(sp, R, opt.r_origin * R, r_max_pos, beta, h0,
                                        opt.states_per_sector + 2);
        for (std::size_t i = 0; i < approx.size(); ++i) {
            const double lam0 = approx[i];
            if (lam0 < 0.0) continue;  // negative state already handled exactly
            if (lam0 > cutoff) break;
            const double gap_lo = (i > 0) ? lam0 - approx[i - 1] : lam0 - lambda_floor;
            const double gap_hi = (i + 1 < approx.size()) ? approx[i + 1] - lam0 : 1.0 + 0.3 * lam0;
            double w = std::max(1e-4 * std::max(1.0, lam0), 1e-5);
            const double r_max_state = auto_r_max(sp, R, lam0);
            auto Dm = [&](double lam) {
                return matching_determinant(sp, lam, R, r_max_state, beta, opt.shoot_rtol);
            };
            double lo = lam0 - w, hi = lam0 + w;
            double dlo = Dm(lo), dhi = Dm(hi);
            int widen = 0;
            while ((dlo > 0.0) == (dhi > 0.0) && widen++ < 24) {
                w *= 1.7;
                lo = lam0 - std::min(w, 0.45 * gap_lo);
                hi = lam0 + std::min(w, 0.45 * gap_hi);
                dlo = Dm(lo);
                dhi = Dm(hi);
            }
            double lam = lam0, err = 0.05 * std::max(1.0, lam0);
            if ((dlo > 0.0) != (dhi > 0.0)) {
                for (int it = 0; it < 80; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    const double dm = Dm(mid);
                    if ((dm > 0.0) == (dlo > 0.0)) {
                        lo = mid;
                        dlo = dm;
                    } else {
                        hi = mid;
                    }
                    if (hi - lo < 1e-12 * std::max(1.0, std::abs(mid))) break;
                }
                lam = 0.5 * (lo + hi);
                err = std::max(hi - lo, 1e-11 * std::max(1.0, std::abs(lam)));
            }
            out.states.push_back({lam, m, radial_index, err});
            out.lowest = std::min(out.lowest, lam);
            ++radial_index;
            if (static_cast<int>(out.states.size()) >= count) break;
        }
    }
    if (!std::isfinite(out.lowest)) {
        // no negative state (certified by the mismatch sign) and the
        // non-negative part lies above every cutoff of interest
        out.lowest = 0.0;
    }
    return out;
}

}  // namespace radial_detail

/// Lowest n eigenvalues of the 2D operator for a circular loop of radius R
/// centered at the flux origin, merged over angular momenta. The m range
/// grows symmetrically around the minimizer until the boundary sectors
/// provably contribute nothing below the returned maximum; an explicitly
/// given range that fails this certification raises an error.
inline RadialSpectrum radial_solve(double R, const ModelParams& params, int n, int m_lo = 1,
                                   int m_hi = 0, const RadialOptions& opt = {}) {
    if (!(R > 0.0)) throw std::invalid_argument("radial_solve: R must be positive");
    if (n < 1) throw std::invalid_argument("radial_solve: n must be >= 1");
    ModelParams p = params;
    p.validate();

    const bool auto_range = m_lo > m_hi;
    const int m_center = static_cast<int>(std::lround(p.c0 + 0.5 * p.B * R * R));

    std::vector<RadialEigenvalue> all;
    auto nth_value = [&]() {
        if (static_cast<int>(all.size()) < n) return std::numeric_limits<double>::infinity();
        return all[static_cast<std::size_t>(n - 1)].value;
    };
    auto add_sector = [&](int m) {
        double cut = nth_value();
        cut = std::isfinite(cut) ? cut + 1.0 : 1e6;
        const auto sec = radial_detail::solve_sector(m, R, p, cut, n, opt);
        for (const auto& st : sec.states) all.push_back(st);
        std::sort(all.begin(), all.end(),
                  [](const RadialEigenvalue& a, const RadialEigenvalue& b) { return a.value < b.value; });
        return sec.lowest;
    };

    if (!auto_range) {
        double low_lo = 0.0, low_hi = 0.0;
        for (int m = m_lo; m <= m_hi; ++m) {
            const double low = add_sector(m);
            if (m == m_lo) low_lo = low;
            if (m == m_hi) low_hi = low;
        }
        if (static_cast<int>(all.size()) < n)
            throw std::invalid_argument("radial_solve: m_range insufficient for the requested count");
        // boundary sectors may tie the returned maximum (Landau degeneracy)
        // but must not contribute strictly below it
        const double tol = 1e-9 * std::max(1.0, std::abs(nth_value()));
        if (m_hi - m_lo > 0 && (low_lo < nth_value() - tol || low_hi < nth_value() - tol))
            throw std::invalid_argument("radial_solve: m_range insufficient (boundary sector contributes)");
    } else {
        int lo = m_center, hi = m_center;
        double low_lo = add_sector(m_center);
        double low_hi = low_lo;
        for (int iter = 0; iter < opt.max_sectors; ++iter) {
            const bool need_more = static_cast<int>(all.size()) < n;
            const double nth = nth_value();
            const bool lo_active = need_more || low_lo <= nth + 1e-9;
            const bool hi_active = need_more || low_hi <= nth + 1e-9;
            if (!lo_active && !hi_active) break;
            if (lo_active) low_lo = add_sector(--lo);
            if (hi_active) low_hi = add_sector(++hi);
        }
        if (static_cast<int>(all.size()) < n)
            throw std::runtime_error("radial_solve: could not assemble the requested count");
    }

    RadialSpectrum out;
    out.states.assign(all.begin(), all.begin() + n);
    return out;
}

/// Verifies the reconstructed jump condition u'(R+) - u'(R-) + beta u(R) = 0
/// for a computed eigenvalue (diagnostic for tests).
inline double delta_jump_residual(double R, const ModelParams& p, int m, double lambda,
                                  const RadialOptions& opt = {}) {
    radial_detail::SectorPotential sp;
    sp.nutil = m - p.c0;
    sp.nu = std::abs(sp.nutil);
    sp.B = p.B;
    const double r_max = radial_detail::auto_r_max(sp, R, lambda);
    const double win = radial_detail::riccati_inner(sp, lambda, R, opt.shoot_rtol);
    const double wout = radial_detail::riccati_outer(sp, lambda, R, r_max, opt.shoot_rtol);
    return (wout - win + p.beta) / std::max(1.0, p.beta);
}

/// Persistent-current measurement: lambda_j(c0) over a flux grid, the total
/// variation of the ground state, and a centered-difference flux derivative.
struct CurrentReport {
    double R = 0.0, B = 0.0, beta = 0.0;
    std::vector<double> c0;
    std::vector<std::vector<double>> lambda;  // per c0, lowest n
    std::vector<double> dlambda1_dc0;         // centered differences, interior points
    double variation = 0.0;                   // max - min of lambda_1
    double solver_error = 0.0;
    bool current_detected = false;  // variation > 10 x solver error
};

inline CurrentReport persistent_current(double R, double B, double beta,
                                        const std::vector<double>& c0_grid, int n,
                                        const RadialOptions& opt = {}) {
    if (c0_grid.size() < 5) throw std::invalid_argument("persistent_current: need >= 5 flux points");
    CurrentReport rep;
    rep.R = R;
    rep.B = B;
    rep.beta = beta;
    rep.c0 = c0_grid;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (double c0 : c0_grid) {
        ModelParams p{c0, B, beta};
        const RadialSpectrum sp = radial_solve(R, p, n, 1, 0, opt);
        std::vector<double> row;
        for (const auto& st : sp.states) row.push_back(st.value);
        rep.lambda.push_back(row);
        rep.solver_error = std::max(rep.solver_error, sp.max_error());
        lo = std::min(lo, row[0]);
        hi = std::max(hi, row[0]);
    }
    rep.variation = hi - lo;
    for (std::size_t i = 1; i + 1 < c0_grid.size(); ++i)
        rep.dlambda1_dc0.push_back((rep.lambda[i + 1][0] - rep.lambda[i - 1][0]) /
                                   (c0_grid[i + 1] - c0_grid[i - 1]));
    rep.current_detected = rep.variation > 10.0 * rep.solver_error;
    return rep;
}

}  // namespace loopspec
