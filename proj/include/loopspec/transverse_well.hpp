// One-dimensional transverse operators on (-a,a): a delta well of strength
// beta at the origin with Dirichlet ends (+) or curvature-Robin ends (-).
// Eigenvalues come from closed-form transcendental matching per parity.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace loopspec {

enum class TransverseSide { plus, minus };

struct TransverseProblem {
    double a = 0.0;
    double beta = 0.0;
    double gamma_plus = 0.0;  // boundary coefficient, minus side only
    TransverseSide side = TransverseSide::plus;

    void validate() const {
        if (!(a > 0.0)) throw std::invalid_argument("TransverseProblem: a must be positive");
        if (beta < 0.0) throw std::invalid_argument("TransverseProblem: beta must be >= 0");
        if (gamma_plus < 0.0) throw std::invalid_argument("TransverseProblem: gamma_plus must be >= 0");
    }
};

namespace detail {

/// Bisection + secant polish to near machine precision on a bracketed root.
inline double refine_root(const std::function<double(double)>& f, double lo, double hi) {
    double flo = f(lo), fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0)) throw std::runtime_error("refine_root: endpoints do not bracket");
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm > 0.0) == (flo > 0.0)) { lo = mid; flo = fm; }
        else { hi = mid; fhi = fm; }
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(mid))) break;
    }
    // few secant steps inside the bracket
    double x0 = lo, x1 = hi, f0 = flo, f1 = fhi;
    for (int it = 0; it < 6; ++it) {
        if (f1 == f0) break;
        const double x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
        if (!(x2 > lo) || !(x2 < hi)) break;
        x0 = x1; f0 = f1;
        x1 = x2; f1 = f(x2);
        if (f1 == 0.0) break;
    }
    return x1;
}

/// Even-mode matching for negative eigenvalues -k^2.
///   side +:  beta tanh(ka) = 2k
///   side -:  (2k^2 + beta g) tanh(ka) = k (beta + 2g)
inline double even_negative_match(double k, double a, double beta, double g, TransverseSide side) {
    if (side == TransverseSide::plus) return beta * std::tanh(k * a) - 2.0 * k;
    return (2.0 * k * k + beta * g) * std::tanh(k * a) - k * (beta + 2.0 * g);
}

/// Odd negative modes: side + has none; side - needs g a > 1:
///   g tanh(ka) = k.
inline double odd_negative_match(double k, double a, double g) { return g * std::tanh(k * a) - k; }

/// Even-mode matching for positive eigenvalues k^2 (overflow-free form).
///   side +:  beta sin(ka) - 2k cos(ka) = 0
///   side -:  (2k^2 - beta g) sin(ka) + k (beta + 2g) cos(ka) = 0
inline double even_positive_match(double k, double a, double beta, double g, TransverseSide side) {
    if (side == TransverseSide::plus) return beta * std::sin(k * a) - 2.0 * k * std::cos(k * a);
    return (2.0 * k * k - beta * g) * std::sin(k * a) + k * (beta + 2.0 * g) * std::cos(k * a);
}

/// Odd positive modes: side + sin(ka) = 0; side - k cos(ka) - g sin(ka) = 0.
inline double odd_positive_match(double k, double a, double g, TransverseSide side) {
    if (side == TransverseSide::plus) return std::sin(k * a);
    return k * std::cos(k * a) - g * std::sin(k * a);
}

/// All roots of f on (0, k_max] found by sign-change scan plus refinement.
inline std::vector<double> scan_roots(const std::function<double(double)>& f, double k_max, int samples) {
    std::vector<double> roots;
    double prev_k = k_max * 1e-9;
    double prev_f = f(prev_k);
    for (int i = 1; i <= samples; ++i) {
        const double k = k_max * i / samples;
        const double fk = f(k);
        if (fk == 0.0) {
            roots.push_back(k);
        } else if ((fk > 0.0) != (prev_f > 0.0)) {
            roots.push_back(refine_root(f, prev_k, k));
        }
        prev_k = k;
        prev_f = fk;
    }
    return roots;
}

}  // namespace detail

/// Residual of the even negative-mode matching equation at the returned root
/// (for verification of solver output).
inline double matching_residual(double k, const TransverseProblem& tp) {
    const double scale = std::max(1.0, tp.beta * std::max(1.0, tp.beta));
    return detail::even_negative_match(k, tp.a, tp.beta, tp.gamma_plus, tp.side) / scale;
}

/// Ground state of T+ : the unique negative eigenvalue zeta+ = -k^2 with
/// tanh(ka) = 2k/beta, present exactly when beta a > 2.
inline std::optional<double> zeta_plus(double a, double beta) {
    TransverseProblem tp{a, beta, 0.0, TransverseSide::plus};
    tp.validate();
    if (beta * a <= 2.0) return std::nullopt;
    auto f = [&](double k) { return detail::even_negative_match(k, a, beta, 0.0, TransverseSide::plus); };
    // f(0+) > 0 for beta a > 2, f(beta/2) < 0; seed near beta/2 and widen.
    double hi = 0.5 * beta;
    double lo = 0.5 * beta * 0.9;
    while (f(lo) <= 0.0 && lo > 1e-12 * beta) lo *= 0.5;
    if (f(lo) <= 0.0) return std::nullopt;
    const double k = detail::refine_root(f, lo, hi);
    return -k * k;
}

struct ZetaMinusResult {
    double zeta = 0.0;
    bool uniqueness_guaranteed = false;  // beta > 8 and beta > (8/3) gamma_plus
    int negative_count = 1;              // all negative eigenvalues found by scan
    std::string warning;
};

/// Ground state of T-: even matching with Robin ends. The root satisfies
/// k > beta/2, hence zeta- < -beta^2/4 for every gamma_plus >= 0.
inline ZetaMinusResult zeta_minus(double a, double beta, double gamma_plus) {
    TransverseProblem tp{a, beta, gamma_plus, TransverseSide::minus};
    tp.validate();
    if (!(beta > 0.0)) throw std::invalid_argument("zeta_minus: beta must be positive");
    auto f = [&](double k) {
        return detail::even_negative_match(k, a, beta, gamma_plus, TransverseSide::minus);
    };
    ZetaMinusResult out;
    out.uniqueness_guaranteed = (beta > 8.0) && (beta > (8.0 / 3.0) * gamma_plus);

    // seed bracket around beta/2, widen geometrically until the sign flips
    double lo = 0.5 * beta;
    double hi = 0.5 * beta * 1.1;
    int guard = 0;
    while (f(hi) <= 0.0 && guard++ < 200) hi *= 1.5;
    if (f(hi) <= 0.0) throw std::runtime_error("zeta_minus: no matching root found");
    const double k = detail::refine_root(f, lo, hi);
    out.zeta = -k * k;

    if (!out.uniqueness_guaranteed) {
        // enumerate: additional even roots below beta/2 and odd roots (g a > 1)
        auto roots = detail::scan_roots(f, 3.0 * hi, 3000);
        int count = 0;
        for (double r : roots)
            if (r > 1e-12) ++count;
        if (gamma_plus * a > 1.0) {
            auto fo = [&](double k2) { return detail::odd_negative_match(k2, a, gamma_plus); };
            count += static_cast<int>(detail::scan_roots(fo, 2.0 * gamma_plus + 1.0, 2000).size());
        }
        out.negative_count = std::max(count, 1);
        if (out.negative_count > 1)
            out.warning = "multiple negative eigenvalues outside the guaranteed regime";
    }
    return out;
}

/// Low transverse spectrum with parity tags; negative modes from the
/// hyperbolic matching, non-negative modes from per-branch trigonometric
/// scans. Odd modes never see the delta term.
struct TransverseSpectrum {
    std::vector<double> values;
    std::vector<char> parity;  // 'e' or 'o'
    std::vector<double> decay_rate;  // sqrt(-zeta) for negative entries, 0 otherwise
    int negative_count = 0;
    double xi2 = std::numeric_limits<double>::quiet_NaN();  // second eigenvalue
};

inline TransverseSpectrum transverse_low_spectrum(double a, double beta, double gamma_plus,
                                                  TransverseSide side, int count) {
    if (count < 2) throw std::invalid_argument("transverse_low_spectrum: count must be >= 2");
    TransverseProblem tp{a, beta, gamma_plus, side};
    tp.validate();
    const double g = (side == TransverseSide::minus) ? gamma_plus : 0.0;

    std::vector<std::pair<double, char>> modes;

    // negative even modes
    {
        auto f = [&](double k) { return detail::even_negative_match(k, a, beta, g, side); };
        const double k_hi = 0.75 * beta + 2.0 * g + 2.0 / a;
        for (double k : detail::scan_roots(f, k_hi, 4000))
            if (k > 1e-10 * std::max(1.0, k_hi)) modes.emplace_back(-k * k, 'e');
    }
    // negative odd modes (minus side only, requires g a > 1)
    if (side == TransverseSide::minus && g * a > 1.0) {
        auto f = [&](double k) { return detail::odd_negative_match(k, a, g); };
        for (double k : detail::scan_roots(f, 2.0 * g + 1.0, 2000))
            if (k > 1e-10) modes.emplace_back(-k * k, 'o');
    }
    // positive modes, scanned far enough for `count` entries
    {
        const double k_max = (count + 3) * M_PI / a;
        auto fe = [&](double k) { return detail::even_positive_match(k, a, beta, g, side); };
        for (double k : detail::scan_roots(fe, k_max, 64 * (count + 3)))
            if (k > 1e-10) modes.emplace_back(k * k, 'e');
        if (side == TransverseSide::plus) {
            for (int j = 1; j * M_PI / a <= k_max; ++j) {
                const double k = j * M_PI / a;
                modes.emplace_back(k * k, 'o');
            }
        } else {
            auto fo = [&](double k) { return detail::odd_positive_match(k, a, g, side); };
            for (double k : detail::scan_roots(fo, k_max, 64 * (count + 3)))
                if (k > 1e-10) modes.emplace_back(k * k, 'o');
        }
    }

    std::sort(modes.begin(), modes.end());
    TransverseSpectrum out;
    for (int i = 0; i < count && i < static_cast<int>(modes.size()); ++i) {
        out.values.push_back(modes[static_cast<std::size_t>(i)].first);
        out.parity.push_back(modes[static_cast<std::size_t>(i)].second);
        out.decay_rate.push_back(modes[static_cast<std::size_t>(i)].first < 0.0
                                     ? std::sqrt(-modes[static_cast<std::size_t>(i)].first)
                                     : 0.0);
        if (modes[static_cast<std::size_t>(i)].first < 0.0) ++out.negative_count;
    }
    if (out.values.size() >= 2) out.xi2 = out.values[1];
    return out;
}

/// Two-sided bound report for the transverse ground states. Both the literal
/// exp(-beta/2) envelopes and the exp(-beta a / 2) variant are evaluated; the
/// raw zeta values are always included.
struct Est2Report {
    double a = 0.0, beta = 0.0, gamma_plus = 0.0;
    bool hypothesis_a = false;  // beta a > 8/3
    bool hypothesis_b = false;  // beta > 8 and beta > (8/3) gamma_plus
    bool zeta_plus_exists = false;
    double zeta_plus_value = std::numeric_limits<double>::quiet_NaN();
    double zeta_minus_value = std::numeric_limits<double>::quiet_NaN();
    double leading = 0.0;  // -beta^2/4
    // strict leading-order inequalities
    bool strict_lower_plus = false;   // -beta^2/4 < zeta+
    bool strict_upper_minus = false;  // zeta- < -beta^2/4
    // envelope checks, literal exponent -beta/2
    double envelope_plus_literal = 0.0, envelope_minus_literal = 0.0;
    bool upper_plus_literal = false, lower_minus_literal = false;
    // envelope checks, exponent -beta a / 2
    double envelope_plus_scaled = 0.0, envelope_minus_scaled = 0.0;
    bool upper_plus_scaled = false, lower_minus_scaled = false;
};

inline Est2Report est2_check(double a, double beta, double gamma_plus) {
    Est2Report r;
    r.a = a;
    r.beta = beta;
    r.gamma_plus = gamma_plus;
    r.leading = -0.25 * beta * beta;
    r.hypothesis_a = beta * a > 8.0 / 3.0;
    r.hypothesis_b = (beta > 8.0) && (beta > (8.0 / 3.0) * gamma_plus);

    const auto zp = zeta_plus(a, beta);
    r.zeta_plus_exists = zp.has_value();
    if (zp) r.zeta_plus_value = *zp;
    r.zeta_minus_value = zeta_minus(a, beta, gamma_plus).zeta;

    const double b2 = beta * beta;
    r.envelope_plus_literal = r.leading + 2.0 * b2 * std::exp(-0.5 * beta);
    r.envelope_plus_scaled = r.leading + 2.0 * b2 * std::exp(-0.5 * beta * a);
    r.envelope_minus_literal = r.leading - (2205.0 / 16.0) * b2 * std::exp(-0.5 * beta);
    r.envelope_minus_scaled = r.leading - (2205.0 / 16.0) * b2 * std::exp(-0.5 * beta * a);

    if (zp) {
        r.strict_lower_plus = r.leading < *zp;
        r.upper_plus_literal = *zp < r.envelope_plus_literal;
        r.upper_plus_scaled = *zp < r.envelope_plus_scaled;
    }
    r.strict_upper_minus = r.zeta_minus_value < r.leading;
    r.lower_minus_literal = r.envelope_minus_literal < r.zeta_minus_value;
    r.lower_minus_scaled = r.envelope_minus_scaled < r.zeta_minus_value;
    return r;
}

}  // namespace loopspec
