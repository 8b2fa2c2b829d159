// Closed planar curves in arc-length parametrization: spectral interpolant,
// curvature jets, tangent angle, tubular map and its validated half-width.
#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "loopspec/fourier.hpp"
#include "loopspec/quadrature.hpp"

namespace loopspec {

using Vec2 = Eigen::Vector2d;

/// Pointwise differential data of the curve at arc length s. The curvature
/// follows the convention gamma = x'' y' - y'' x', which is -1/R on a
/// counter-clockwise circle of radius R.
struct CurveJet {
    double s = 0.0;
    Vec2 position{0.0, 0.0};
    Vec2 tangent{1.0, 0.0};
    Vec2 d2{0.0, 0.0};
    Vec2 d3{0.0, 0.0};
    double gamma = 0.0;
    double gamma_d1 = 0.0;
    double gamma_d2 = 0.0;
};

/// Arc-length parametrized closed C^4 Jordan curve. Positions are stored as a
/// trigonometric interpolant in s; all derived quantities come from at most
/// two spectral differentiations of a smooth series, never four of the
/// positions, to keep round-off out of gamma''.
class LoopCurve {
public:
    /// Reparametrizes a smooth closed parametric curve t -> (x(t), y(t)),
    /// t in [0,T), to arc length on a grid of grid_size points.
    static LoopCurve from_parametric(const std::function<Vec2(double)>& c, double t_period,
                                     int grid_size) {
        if (grid_size < 64) throw std::invalid_argument("LoopCurve: grid_size must be >= 64");
        if (!(t_period > 0.0)) throw std::invalid_argument("LoopCurve: parameter period must be positive");

        // Stage 1: periodic interpolant in the original parameter.
        const int m = std::max(2 * grid_size, 1024);
        std::vector<double> xs(static_cast<std::size_t>(m)), ys(static_cast<std::size_t>(m));
        for (int i = 0; i < m; ++i) {
            const Vec2 p = c(t_period * i / m);
            xs[static_cast<std::size_t>(i)] = p.x();
            ys[static_cast<std::size_t>(i)] = p.y();
        }
        const Vec2 gap = c(t_period) - c(0.0);
        double scale = 0.0;
        for (int i = 0; i < m; ++i)
            scale = std::max(scale, std::hypot(xs[static_cast<std::size_t>(i)], ys[static_cast<std::size_t>(i)]));
        if (gap.norm() > 1e-8 * std::max(1.0, scale))
            throw std::invalid_argument("LoopCurve: parametric specification is not closed");

        TrigSeries X(xs, t_period), Y(ys, t_period);
        std::vector<double> speed(static_cast<std::size_t>(m));
        double mean_speed = 0.0, min_speed = std::numeric_limits<double>::max();
        for (int i = 0; i < m; ++i) {
            const double t = t_period * i / m;
            const double v = std::hypot(X.eval(t, 1), Y.eval(t, 1));
            speed[static_cast<std::size_t>(i)] = v;
            mean_speed += v / m;
            min_speed = std::min(min_speed, v);
        }
        if (min_speed < 1e-8 * mean_speed)
            throw std::invalid_argument("LoopCurve: degenerate (zero-speed) parametrization point");

        TrigSeries speed_series(speed, t_period);
        const double total_length = speed_series.mean() * t_period;

        // Invert s(t) for the uniform arc-length grid by safeguarded Newton.
        const int n = grid_size;
        std::vector<double> px(static_cast<std::size_t>(n)), py(static_cast<std::size_t>(n));
        double t_guess = 0.0;
        for (int i = 0; i < n; ++i) {
            const double target = total_length * i / n;
            double t = std::max(t_guess, t_period * i / n);
            double lo = 0.0, hi = t_period;
            for (int it = 0; it < 100; ++it) {
                const double f = speed_series.antiderivative(t) - target;
                if (f > 0.0) hi = t; else lo = t;
                const double step = f / std::max(speed_series.eval(t), 1e-14);
                double tn = t - step;
                if (!(tn > lo) || !(tn < hi)) tn = 0.5 * (lo + hi);
                if (std::abs(tn - t) < 1e-15 * t_period) { t = tn; break; }
                t = tn;
            }
            t_guess = t;
            const Vec2 p = c(t);
            px[static_cast<std::size_t>(i)] = p.x();
            py[static_cast<std::size_t>(i)] = p.y();
        }
        return LoopCurve(px, py, total_length);
    }

    static LoopCurve circle(double radius, Vec2 center = {0.0, 0.0}, int grid_size = 256) {
        if (!(radius > 0.0)) throw std::invalid_argument("circle: radius must be positive");
        return from_parametric(
            [=](double t) { return Vec2(center.x() + radius * std::cos(t), center.y() + radius * std::sin(t)); },
            2.0 * M_PI, grid_size);
    }

    static LoopCurve ellipse(double a, double b, Vec2 center = {0.0, 0.0}, int grid_size = 1024) {
        if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("ellipse: semi-axes must be positive");
        return from_parametric(
            [=](double t) { return Vec2(center.x() + a * std::cos(t), center.y() + b * std::sin(t)); },
            2.0 * M_PI, grid_size);
    }

    double length() const { return length_; }
    int grid_size() const { return n_; }
    bool orientation_reversed() const { return reversed_; }

    Vec2 position(double s) const { return {x_.eval(s), y_.eval(s)}; }
    Vec2 tangent(double s) const { return {x_.eval(s, 1), y_.eval(s, 1)}; }

    /// gamma(s) = x''(s) y'(s) - y''(s) x'(s)  (the source convention).
    double signed_curvature(double s) const { return gamma_.eval(s); }
    /// The textbook convention x' y'' - y' x''; opposite sign to the above.
    double conventional_curvature(double s) const { return -gamma_.eval(s); }
    double curvature_d1(double s) const { return gamma_.eval(s, 1); }
    double curvature_d2(double s) const { return gamma_.eval(s, 2); }

    CurveJet jet(double s) const {
        CurveJet j;
        j.s = s;
        j.position = position(s);
        j.tangent = tangent(s);
        j.gamma = gamma_.eval(s);
        j.gamma_d1 = gamma_.eval(s, 1);
        j.gamma_d2 = gamma_.eval(s, 2);
        // Frenet relations in this sign convention: Gamma'' = (g y', -g x').
        j.d2 = Vec2(j.gamma * j.tangent.y(), -j.gamma * j.tangent.x());
        j.d3 = Vec2(j.gamma_d1 * j.tangent.y() - j.gamma * j.gamma * j.tangent.x(),
                    -j.gamma_d1 * j.tangent.x() - j.gamma * j.gamma * j.tangent.y());
        return j;
    }

    /// H(t) = -int_0^t gamma(u) du. For the arc-length frame this is the
    /// tangent angle relative to the tangent at s = 0.
    double tangent_angle(double t) const { return -gamma_.antiderivative(t); }

    /// Psi_a(s,u) = Gamma(s) + u * (-y'(s), x'(s)).
    Vec2 tubular_map(double s, double u) const {
        if (std::abs(u) >= inj_halfwidth_)
            throw std::domain_error("tubular_map: offset exceeds validated half-width");
        return tubular_map_unchecked(s, u);
    }

    Vec2 tubular_map_unchecked(double s, double u) const {
        const double xp = x_.eval(s, 1), yp = y_.eval(s, 1);
        return {x_.eval(s) - u * yp, y_.eval(s) + u * xp};
    }

    double gamma_plus() const { return gamma_plus_; }
    double injectivity_halfwidth() const { return inj_halfwidth_; }

    /// Distance from the coordinate origin to the curve (grid + refinement).
    double origin_clearance() const { return origin_clearance_; }
    /// Winding number of the curve around the coordinate origin.
    int winding_number_origin() const { return winding_origin_; }

private:
    LoopCurve(std::vector<double> px, std::vector<double> py, double total_length)
        : length_(total_length), n_(static_cast<int>(px.size())) {
        // Normalize to counter-clockwise orientation.
        double area2 = 0.0;
        for (int i = 0; i < n_; ++i) {
            const int k = (i + 1) % n_;
            area2 += px[static_cast<std::size_t>(i)] * py[static_cast<std::size_t>(k)] -
                     px[static_cast<std::size_t>(k)] * py[static_cast<std::size_t>(i)];
        }
        if (area2 < 0.0) {
            reversed_ = true;
            std::vector<double> rx(static_cast<std::size_t>(n_)), ry(static_cast<std::size_t>(n_));
            for (int i = 0; i < n_; ++i) {
                const int k = (n_ - i) % n_;
                rx[static_cast<std::size_t>(i)] = px[static_cast<std::size_t>(k)];
                ry[static_cast<std::size_t>(i)] = py[static_cast<std::size_t>(k)];
            }
            px.swap(rx);
            py.swap(ry);
        }

        reject_self_intersection(px, py);

        x_ = TrigSeries(px, length_);
        y_ = TrigSeries(py, length_);

        // Arc-length sanity on the grid.
        double worst = 0.0;
        for (int i = 0; i < n_; ++i) {
            const double s = length_ * i / n_;
            worst = std::max(worst, std::abs(std::hypot(x_.eval(s, 1), y_.eval(s, 1)) - 1.0));
        }
        if (worst > 1e-8)
            throw std::runtime_error("LoopCurve: arc-length normalization failed (|Gamma'| deviates by " +
                                     std::to_string(worst) + ")");
        tangent_defect_ = worst;

        // Curvature series from second/first derivatives of the positions.
        std::vector<double> g(static_cast<std::size_t>(n_));
        for (int i = 0; i < n_; ++i) {
            const double s = length_ * i / n_;
            g[static_cast<std::size_t>(i)] =
                x_.eval(s, 2) * y_.eval(s, 1) - y_.eval(s, 2) * x_.eval(s, 1);
        }
        gamma_ = TrigSeries(g, length_);

        gamma_plus_ = compute_gamma_plus();
        inj_halfwidth_ = compute_injectivity_halfwidth();
        compute_origin_data();
    }

    void reject_self_intersection(const std::vector<double>& px, const std::vector<double>& py) const {
        auto seg = [&](int i) {
            const int k = (i + 1) % n_;
            return std::array<double, 4>{px[static_cast<std::size_t>(i)], py[static_cast<std::size_t>(i)],
                                         px[static_cast<std::size_t>(k)], py[static_cast<std::size_t>(k)]};
        };
        auto orient = [](double ax, double ay, double bx, double by, double cx, double cy) {
            return (bx - ax) * (cy - ay) - (by - ay) * (cx - ax);
        };
        for (int i = 0; i < n_; ++i) {
            const auto a = seg(i);
            for (int j = i + 2; j < n_; ++j) {
                if (i == 0 && j == n_ - 1) continue;  // adjacent across the seam
                const auto b = seg(j);
                const double d1 = orient(a[0], a[1], a[2], a[3], b[0], b[1]);
                const double d2 = orient(a[0], a[1], a[2], a[3], b[2], b[3]);
                const double d3 = orient(b[0], b[1], b[2], b[3], a[0], a[1]);
                const double d4 = orient(b[0], b[1], b[2], b[3], a[2], a[3]);
                if (((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)))
                    throw std::invalid_argument("LoopCurve: self-intersection detected");
            }
        }
    }

    double compute_gamma_plus() const {
        const int probe = 4 * n_;
        double best = 0.0, sbest = 0.0;
        for (int i = 0; i < probe; ++i) {
            const double s = length_ * i / probe;
            const double v = std::abs(gamma_.eval(s));
            if (v > best) { best = v; sbest = s; }
        }
        // One golden-section pass around the grid argmax.
        const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
        double lo = sbest - length_ / probe, hi = sbest + length_ / probe;
        double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
        double fc = std::abs(gamma_.eval(c)), fd = std::abs(gamma_.eval(d));
        for (int it = 0; it < 60; ++it) {
            if (fc > fd) { hi = d; d = c; fd = fc; c = hi - gr * (hi - lo); fc = std::abs(gamma_.eval(c)); }
            else { lo = c; c = d; fc = fd; d = lo + gr * (hi - lo); fd = std::abs(gamma_.eval(d)); }
        }
        return std::max(best, std::max(fc, fd));
    }

    // Conservative half-width: min(1/(2*gamma_plus), half the smallest
    // distance between non-adjacent points), then validated by a
    // nearest-point scan of the tube and shrunk until the scan passes.
    double compute_injectivity_halfwidth() const {
        const double cap = 0.5 / std::max(gamma_plus_, 1e-300);
        const int nc = 2 * n_;
        std::vector<Vec2> pts(static_cast<std::size_t>(nc));
        for (int i = 0; i < nc; ++i) pts[static_cast<std::size_t>(i)] = position(length_ * i / nc);

        const double window = std::min(1.0 / std::max(gamma_plus_, 1e-300), 0.25 * length_);
        double dmin = std::numeric_limits<double>::max();
        for (int i = 0; i < nc; ++i)
            for (int j = i + 1; j < nc; ++j) {
                const double arc = std::min(length_ * (j - i) / nc, length_ - length_ * (j - i) / nc);
                if (arc < window) continue;
                dmin = std::min(dmin, (pts[static_cast<std::size_t>(i)] - pts[static_cast<std::size_t>(j)]).norm());
            }
        double a = std::min(cap * 0.999, 0.5 * dmin);

        for (int attempt = 0; attempt < 60; ++attempt) {
            if (tube_scan_passes(a, pts)) return a;
            a *= 0.85;
        }
        throw std::runtime_error("LoopCurve: could not validate a tubular half-width");
    }

    bool tube_scan_passes(double a, const std::vector<Vec2>& pts) const {
        const int nc = static_cast<int>(pts.size());
        const int ns = n_;
        const double slop = 2.0 * length_ / nc + a;
        for (double frac : {1.0, 0.5}) {
            const double u = a * frac;
            for (int sign : {-1, 1}) {
                for (int i = 0; i < ns; ++i) {
                    const double s = length_ * i / ns;
                    const Vec2 p = tubular_map_unchecked(s, sign * u);
                    double best = std::numeric_limits<double>::max();
                    int kbest = 0;
                    for (int k = 0; k < nc; ++k) {
                        const double d = (p - pts[static_cast<std::size_t>(k)]).squaredNorm();
                        if (d < best) { best = d; kbest = k; }
                    }
                    const double arc = std::min(std::abs(length_ * kbest / nc - s),
                                                length_ - std::abs(length_ * kbest / nc - s));
                    // Another branch of the curve is closer than the base point.
                    if (arc > slop && std::sqrt(best) < u * (1.0 - 1e-9)) return false;
                }
            }
        }
        return true;
    }

    void compute_origin_data() {
        double best = std::numeric_limits<double>::max();
        const int probe = 4 * n_;
        for (int i = 0; i < probe; ++i)
            best = std::min(best, position(length_ * i / probe).norm());
        origin_clearance_ = best;

        double total = 0.0;
        double prev = std::atan2(position(0.0).y(), position(0.0).x());
        for (int i = 1; i <= probe; ++i) {
            const Vec2 p = position(length_ * i / probe);
            const double ang = std::atan2(p.y(), p.x());
            double d = ang - prev;
            while (d > M_PI) d -= 2.0 * M_PI;
            while (d < -M_PI) d += 2.0 * M_PI;
            total += d;
            prev = ang;
        }
        winding_origin_ = static_cast<int>(std::lround(total / (2.0 * M_PI)));
    }

    double length_ = 0.0;
    int n_ = 0;
    bool reversed_ = false;
    TrigSeries x_, y_, gamma_;
    double gamma_plus_ = 0.0;
    double inj_halfwidth_ = 0.0;
    double origin_clearance_ = 0.0;
    int winding_origin_ = 0;
    double tangent_defect_ = 0.0;
};

}  // namespace loopspec
