#pragma once

// KPZ scaling constants and regime classification for the limit laws.

#include <cmath>
#include <string>

#include "aseplab/errors.hpp"

namespace aseplab {

// c1 = -1 + 2 sqrt(sigma), c2 = sigma^{-1/6} (1 - sqrt(sigma))^{2/3}
inline std::pair<double, double> scaling_constants(double sigma) {
    if (!(sigma > 0.0 && sigma < 1.0))
        throw precondition_error("sigma must lie in (0, 1); the scaling degenerates at 1");
    const double rs = std::sqrt(sigma);
    return {-1.0 + 2.0 * rs,
            std::pow(sigma, -1.0 / 6.0) * std::pow(1.0 - rs, 2.0 / 3.0)};
}

// a1 = (1+v)^2/4, a2 = 2^{-4/3} (1 - v^2)^{2/3}
inline std::pair<double, double> current_constants(double v) {
    if (!(v > -1.0 && v < 1.0))
        throw precondition_error("v must lie in (-1, 1); the scaling degenerates at |v| = 1");
    return {0.25 * (1.0 + v) * (1.0 + v),
            std::pow(2.0, -4.0 / 3.0) * std::pow(1.0 - v * v, 2.0 / 3.0)};
}

enum class LimitRegime {
    F2,               // sigma < rho^2
    F1Squared,        // sigma = rho^2, rho < 1
    F2Current,        // v < 2 rho - 1
    F1SquaredCurrent  // v = 2 rho - 1, rho < 1
};

inline const char* regime_label(LimitRegime r) {
    switch (r) {
        case LimitRegime::F2: return "F2";
        case LimitRegime::F1Squared: return "F1-squared";
        case LimitRegime::F2Current: return "F2-current";
        default: return "F1-squared-current";
    }
}

inline LimitRegime classify_particle_regime(double sigma, double rho) {
    if (!(sigma > 0.0)) throw precondition_error("sigma must be positive");
    if (!(rho > 0.0 && rho <= 1.0)) throw precondition_error("rho must lie in (0, 1]");
    const double boundary = rho * rho;
    if (std::fabs(sigma - boundary) <= 1e-12) {
        if (rho >= 1.0)
            throw precondition_error("boundary regime sigma = rho^2 requires rho < 1");
        return LimitRegime::F1Squared;
    }
    if (sigma < boundary) return LimitRegime::F2;
    throw precondition_error("sigma > rho^2 is the Gaussian regime (out of scope)");
}

inline LimitRegime classify_current_regime(double v, double rho) {
    if (!(rho > 0.0 && rho <= 1.0)) throw precondition_error("rho must lie in (0, 1]");
    const double boundary = 2.0 * rho - 1.0;
    if (std::fabs(v - boundary) <= 1e-12) {
        if (rho >= 1.0)
            throw precondition_error("boundary regime v = 2 rho - 1 requires rho < 1");
        return LimitRegime::F1SquaredCurrent;
    }
    if (v < boundary) return LimitRegime::F2Current;
    throw precondition_error("v > 2 rho - 1 is the Gaussian regime (out of scope)");
}

}  // namespace aseplab
