#pragma once

// Jump rates of the asymmetric exclusion process: right with rate p, left
// with rate q = 1 - p. Stored as p only so p + q = 1 holds exactly.

#include <cmath>
#include <stdexcept>

#include "aseplab/errors.hpp"

namespace aseplab {

class HoppingRates {
  public:
    explicit HoppingRates(double p) : p_(p) {
        if (!(p >= 0.0 && p <= 1.0))
            throw precondition_error("hopping rate p must lie in [0, 1]");
    }

    double p() const { return p_; }
    double q() const { return 1.0 - p_; }

    // tau = p/q, defined for q > 0.
    double tau() const {
        if (q() == 0.0) throw precondition_error("tau undefined for q = 0");
        return p_ / q();
    }

    // gamma = q - p, positive in the leftward-drift regime.
    double gamma() const { return q() - p_; }

    // XXZ anisotropy 1/(2 sqrt(pq)), defined for 0 < p < 1.
    double delta() const {
        if (p_ == 0.0 || p_ == 1.0)
            throw precondition_error("anisotropy undefined for totally asymmetric rates");
        return 1.0 / (2.0 * std::sqrt(p_ * q()));
    }

    bool drift_left() const { return q() > p_; }

    void require_drift_left() const {
        if (!drift_left())
            throw precondition_error("operation requires q > p");
    }

  private:
    double p_;
};

}  // namespace aseplab
