// Minimal library walkthrough: build a curve, print the comparison-operator
// spectrum and one two-sided enclosure.
#include <cstdio>

#include "loopspec/bracketing.hpp"
#include "loopspec/curve.hpp"
#include "loopspec/periodic_spectrum.hpp"

int main() {
    using namespace loopspec;
    const LoopCurve ellipse = LoopCurve::ellipse(2.0, 1.0, {0, 0}, 1024);
    std::printf("ellipse: L = %.12f, gamma_+ = %.6f, tube half-width = %.6f\n", ellipse.length(),
                ellipse.gamma_plus(), ellipse.injectivity_halfwidth());

    const Spectrum mu = effective_spectrum(ellipse, 5, 256);
    std::printf("comparison operator eigenvalues:\n");
    for (std::size_t j = 0; j < mu.values.size(); ++j)
        std::printf("  mu_%zu = %.10f  (est. err %.1e)\n", j + 1, mu.values[j],
                    mu.error_estimate[j]);

    const LoopCurve circle = LoopCurve::circle(1.0, {0, 0}, 256);
    const ModelParams p{0.3, 1.0, 60.0};
    const BracketEnclosure enc = enclosure(circle, p, p.beta, 2);
    std::printf("unit circle, c0=%.2f, B=%.2f, beta=%.0f (width a=%.4f):\n", p.c0, p.B, p.beta,
                enc.a);
    for (int j = 1; j <= 2; ++j)
        std::printf("  lambda_%d in [%.6f, %.6f]\n", j, enc.tau_minus[j - 1], enc.tau_plus[j - 1]);
    return 0;
}
