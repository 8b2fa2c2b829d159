// Trigonometric interpolation of smooth periodic data: spectral evaluation,
// differentiation and antidifferentiation of the interpolant.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include <unsupported/Eigen/FFT>

namespace loopspec {

/// Trigonometric interpolant of a T-periodic function sampled on a uniform
/// grid t_i = i*T/N. Coefficients below a relative noise floor are dropped so
/// that repeated differentiation does not amplify FFT round-off.
class TrigSeries {
public:
    TrigSeries() = default;

    TrigSeries(const std::vector<double>& samples, double period)
        : period_(period), n_(static_cast<int>(samples.size())) {
        if (n_ < 4 || n_ % 2 != 0)
            throw std::invalid_argument("TrigSeries: need an even sample count >= 4");
        if (!(period > 0.0))
            throw std::invalid_argument("TrigSeries: period must be positive");
        Eigen::FFT<double> fft;
        std::vector<std::complex<double>> spec;
        std::vector<double> in(samples);
        fft.fwd(spec, in);
        coef_.assign(n_ / 2 + 1, {0.0, 0.0});
        double peak = 0.0;
        for (const auto& c : spec) peak = std::max(peak, std::abs(c));
        const double floor = 1e-14 * peak;
        for (int k = 0; k <= n_ / 2; ++k) {
            const std::complex<double> c = spec[static_cast<std::size_t>(k)] / double(n_);
            coef_[static_cast<std::size_t>(k)] = (std::abs(c) * n_ >= floor) ? c : 0.0;
        }
        samples_ = samples;
    }

    double period() const { return period_; }
    int size() const { return n_; }
    const std::vector<double>& samples() const { return samples_; }

    /// Value of the m-th derivative of the interpolant at t.
    double eval(double t, int derivative = 0) const {
        const double w1 = 2.0 * M_PI / period_;
        const std::complex<double> rot(std::cos(w1 * t), std::sin(w1 * t));
        std::complex<double> e(1.0, 0.0);
        double sum = 0.0;
        if (derivative == 0) sum = coef_[0].real();
        for (int k = 1; k <= n_ / 2; ++k) {
            e *= rot;
            const std::complex<double>& c = coef_[static_cast<std::size_t>(k)];
            if (c == std::complex<double>(0.0, 0.0)) continue;
            if (k == n_ / 2 && derivative > 0) continue;  // Nyquist mode: even part only
            std::complex<double> term = c * e;
            if (derivative > 0) {
                const std::complex<double> iw(0.0, w1 * k);
                std::complex<double> p = iw;
                for (int m = 1; m < derivative; ++m) p *= iw;
                term *= p;
            }
            sum += (k == n_ / 2 ? 1.0 : 2.0) * term.real();
        }
        return sum;
    }

    /// Antiderivative F with F(0) = 0; the mean of the data contributes the
    /// linear (secular) part.
    double antiderivative(double t) const {
        const double w1 = 2.0 * M_PI / period_;
        const std::complex<double> rot(std::cos(w1 * t), std::sin(w1 * t));
        std::complex<double> e(1.0, 0.0);
        double sum = coef_[0].real() * t;
        for (int k = 1; k <= n_ / 2; ++k) {
            e *= rot;
            const std::complex<double>& c = coef_[static_cast<std::size_t>(k)];
            if (c == std::complex<double>(0.0, 0.0)) continue;
            if (k == n_ / 2) continue;  // Nyquist contributes nothing to smooth data
            const std::complex<double> iw(0.0, w1 * k);
            sum += 2.0 * ((c / iw) * (e - 1.0)).real();
        }
        return sum;
    }

    double mean() const { return coef_[0].real(); }

    /// m-th derivative sampled back on the construction grid.
    std::vector<double> derivative_samples(int order) const {
        std::vector<double> out(static_cast<std::size_t>(n_));
        const double h = period_ / n_;
        for (int i = 0; i < n_; ++i) out[static_cast<std::size_t>(i)] = eval(i * h, order);
        return out;
    }

private:
    double period_ = 0.0;
    int n_ = 0;
    std::vector<std::complex<double>> coef_;  // one-sided spectrum, k = 0..N/2
    std::vector<double> samples_;
};

}  // namespace loopspec
