#pragma once

// Bracket numbers [N] = (p^N - q^N)/(p - q), their factorials, and the two
// tau-binomial variants: the standard [N m]_tau and the modified
// [N m] = q^{m(N-m)} [N m]_tau used by the subset identities.

#include <cmath>
#include <vector>

#include "aseplab/errors.hpp"
#include "aseplab/hopping_rates.hpp"

namespace aseplab {

class TauBinomial {
  public:
    explicit TauBinomial(const HoppingRates& rates) : p_(rates.p()), q_(rates.q()) {
        if (q_ <= 0.0) throw precondition_error("tau-binomials need q > 0");
        tau_ = p_ / q_;
    }

    double tau() const { return tau_; }

    // [N] as the geometric sum  sum_{j<N} p^j q^{N-1-j}  (stable for p = q).
    double bracket(int n) const {
        if (n < 0) throw precondition_error("bracket index must be nonnegative");
        if (n == 0) return 1.0;  // [0] := 1
        double sum = 0.0, pj = 1.0;
        for (int j = 0; j < n; ++j) {
            sum += pj * std::pow(q_, n - 1 - j);
            pj *= p_;
        }
        return sum;
    }

    double bracket_factorial(int n) const {
        double f = 1.0;
        for (int k = 1; k <= n; ++k) f *= bracket(k);
        return f;
    }

    // Standard tau-binomial; 0 outside 0 <= m <= n.
    double binom_tau(int n, int m) const {
        if (m < 0 || m > n) return 0.0;
        double v = 1.0;
        for (int i = 1; i <= m; ++i)
            v *= (1.0 - std::pow(tau_, n - m + i)) / (1.0 - std::pow(tau_, i));
        return v;
    }

    // Modified coefficient [N m] = q^{m(N-m)} [N m]_tau; log-space fallback
    // for exponents that would underflow.
    double binom_modified(int n, int m) const {
        if (m < 0 || m > n) return 0.0;
        const double e = double(m) * double(n - m);
        if (q_ < 1.0 && e * std::log(q_) < -600.0) {
            double lg = e * std::log(q_);
            for (int i = 1; i <= m; ++i)
                lg += std::log1p(-std::pow(tau_, n - m + i)) - std::log1p(-std::pow(tau_, i));
            return std::exp(lg);
        }
        return std::pow(q_, e) * binom_tau(n, m);
    }

    // Same coefficient through the bracket-factorial route; cross-check only.
    double binom_modified_by_factorials(int n, int m) const {
        if (m < 0 || m > n) return 0.0;
        return bracket_factorial(n) / (bracket_factorial(m) * bracket_factorial(n - m));
    }

  private:
    double p_, q_, tau_;
};

}  // namespace aseplab
