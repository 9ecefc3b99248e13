#pragma once

// Tabulated Tracy-Widom CDF on a uniform grid with monotone cubic
// interpolation and moment extraction.

#include <cmath>
#include <cstddef>
#include <vector>

#include "aseplab/errors.hpp"
#include "aseplab/painleve2.hpp"

namespace aseplab {

struct Moments {
    double mean;
    double variance;
    double skewness;
    double kurtosis_excess;
};

class TWDistribution {
  public:
    // Uniform ascending grid; values must be a CDF sampled on it.
    TWDistribution(int beta, std::vector<double> s_grid, std::vector<double> cdf_values)
        : beta_(beta), s_(std::move(s_grid)), f_(std::move(cdf_values)) {
        if (s_.size() != f_.size() || s_.size() < 5)
            throw precondition_error("grid/value size mismatch or too small");
        h_ = s_[1] - s_[0];
        for (std::size_t i = 1; i < s_.size(); ++i) {
            if (std::fabs((s_[i] - s_[i - 1]) - h_) > 1e-9 * std::fabs(h_))
                throw precondition_error("grid must be uniform");
            if (f_[i] < f_[i - 1] - 1e-12)
                throw precondition_error("CDF values must be nondecreasing");
        }
        build_slopes();
    }

    int beta() const { return beta_; }
    const std::vector<double>& s_grid() const { return s_; }
    const std::vector<double>& cdf_values() const { return f_; }

    double operator()(double s) const {
        if (s <= s_.front()) return f_.front();
        if (s >= s_.back()) return f_.back();
        const auto i = std::size_t((s - s_.front()) / h_);
        const std::size_t k = std::min(i, s_.size() - 2);
        const double t = (s - s_[k]) / h_;
        const double y0 = f_[k], y1 = f_[k + 1];
        const double m0 = d_[k] * h_, m1 = d_[k + 1] * h_;
        const double t2 = t * t, t3 = t2 * t;
        return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * m0 +
               (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * m1;
    }

    // Moments by integration by parts: E X^k = k int_0^inf x^{k-1}(1-F)
    // - k int_{-inf}^0 x^{k-1} F. Requires the grid to straddle 0 and to
    // cover all but <= 1e-9 of the mass. Kurtosis is reported as excess.
    Moments moments() const {
        if (f_.front() > 1e-9 || 1.0 - f_.back() > 1e-9)
            throw precondition_error("grid does not cover enough probability mass");
        if (s_.front() > 0.0 || s_.back() < 0.0)
            throw precondition_error("grid must straddle zero");

        // index of the grid point at (or nearest) zero; the integrand has a
        // jump there, so the two halves are integrated separately
        const auto i0 = std::size_t(std::llround(-s_.front() / h_));

        double raw[5] = {1.0, 0.0, 0.0, 0.0, 0.0};
        for (int k = 1; k <= 4; ++k) {
            auto left = [&](std::size_t i) {
                const double x = s_[i];
                return (k == 1 ? 1.0 : std::pow(x, k - 1)) * -f_[i];
            };
            auto right = [&](std::size_t i) {
                const double x = s_[i];
                return (k == 1 ? 1.0 : std::pow(x, k - 1)) * (1.0 - f_[i]);
            };
            raw[k] = double(k) * (boole(left, 0, i0) + boole(right, i0, s_.size() - 1));
        }
        const double mu = raw[1];
        const double m2 = raw[2] - mu * mu;
        const double m3 = raw[3] - 3.0 * mu * raw[2] + 2.0 * mu * mu * mu;
        const double m4 =
            raw[4] - 4.0 * mu * raw[3] + 6.0 * mu * mu * raw[2] - 3.0 * mu * mu * mu * mu;
        return {mu, m2, m3 / std::pow(m2, 1.5), m4 / (m2 * m2) - 3.0};
    }

  private:
    int beta_;
    std::vector<double> s_;
    std::vector<double> f_;
    std::vector<double> d_;  // interpolation slopes (Fritsch-Carlson limited)
    double h_ = 0.0;

    void build_slopes() {
        const std::size_t n = s_.size();
        std::vector<double> delta(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) delta[i] = (f_[i + 1] - f_[i]) / h_;
        d_.assign(n, 0.0);
        d_[0] = delta[0];
        d_[n - 1] = delta[n - 2];
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (delta[i - 1] * delta[i] <= 0.0)
                d_[i] = 0.0;
            else
                d_[i] = 2.0 * delta[i - 1] * delta[i] / (delta[i - 1] + delta[i]);
        }
        // monotonicity limiter
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (delta[i] == 0.0) {
                d_[i] = d_[i + 1] = 0.0;
            } else {
                const double a = d_[i] / delta[i], b = d_[i + 1] / delta[i];
                const double r = a * a + b * b;
                if (r > 9.0) {
                    const double t = 3.0 / std::sqrt(r);
                    d_[i] = t * a * delta[i];
                    d_[i + 1] = t * b * delta[i];
                }
            }
        }
    }

    // Composite Boole rule of an index-valued integrand over grid indices
    // [i_begin, i_end]. Leftover cells (when the interval count is not a
    // multiple of 4) get Simpson / 3-8 patches of matching order.
    template <class F>
    double boole(F&& g, std::size_t i_begin, std::size_t i_end) const {
        double acc = 0.0;
        std::size_t i = i_begin;
        while (i + 4 <= i_end) {
            acc += (2.0 * h_ / 45.0) *
                   (7.0 * g(i) + 32.0 * g(i + 1) + 12.0 * g(i + 2) + 32.0 * g(i + 3) +
                    7.0 * g(i + 4));
            i += 4;
        }
        const std::size_t rest = i_end - i;
        if (rest == 3)
            acc += (3.0 * h_ / 8.0) * (g(i) + 3.0 * g(i + 1) + 3.0 * g(i + 2) + g(i + 3));
        else if (rest == 2)
            acc += (h_ / 3.0) * (g(i) + 4.0 * g(i + 1) + g(i + 2));
        else if (rest == 1)
            acc += 0.5 * h_ * (g(i) + g(i + 1));
        return acc;
    }
};

// Tabulate F_beta from a solved Hastings-McLeod object.
inline TWDistribution make_tw_distribution(const HastingsMcLeod& hm, int beta,
                                           double s_lo = -10.0, double s_hi = 10.0,
                                           double step = 0.01) {
    if (beta != 1 && beta != 2) throw precondition_error("beta must be 1 or 2");
    const int n = int(std::round((s_hi - s_lo) / step));
    std::vector<double> s(std::size_t(n) + 1), f(std::size_t(n) + 1);
    for (int i = 0; i <= n; ++i) {
        s[std::size_t(i)] = s_lo + step * i;
        f[std::size_t(i)] =
            beta == 2 ? hm.f2_cdf(s[std::size_t(i)]) : hm.f1_cdf(s[std::size_t(i)]);
    }
    return TWDistribution(beta, std::move(s), std::move(f));
}

}  // namespace aseplab
