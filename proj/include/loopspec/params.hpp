// Model parameters of the 2D operator: AB flux, homogeneous field, coupling.
#pragma once

#include <stdexcept>

namespace loopspec {

/// (c0, B, beta) with the standing admissibility c0 in (0,1), B > 0, beta > 0.
/// Degenerate limits (c0 = 0, B = 0 or beta = 0) are permitted only when the
/// test-mode flag is set; they serve as regression anchors against earlier
/// results and closed forms.
struct ModelParams {
    double c0 = 0.0;
    double B = 0.0;
    double beta = 0.0;
    bool allow_degenerate = false;

    void validate() const {
        if (allow_degenerate) {
            if (c0 < 0.0 || c0 >= 1.0) throw std::invalid_argument("ModelParams: c0 must be in [0,1)");
            if (B < 0.0) throw std::invalid_argument("ModelParams: B must be >= 0");
            if (beta < 0.0) throw std::invalid_argument("ModelParams: beta must be >= 0");
        } else {
            if (!(c0 > 0.0 && c0 < 1.0)) throw std::invalid_argument("ModelParams: c0 must be in (0,1)");
            if (!(B > 0.0)) throw std::invalid_argument("ModelParams: B must be positive");
            if (!(beta > 0.0)) throw std::invalid_argument("ModelParams: beta must be positive");
        }
    }

    ModelParams with_beta(double b) const {
        ModelParams p = *this;
        p.beta = b;
        return p;
    }
};

}  // namespace loopspec
