#pragma once

// Monte Carlo sample of a scalar observable with seed provenance, plus the
// Kolmogorov-Smirnov distance against a reference CDF.

#include <algorithm>
#include <cstdint>
#include <vector>

#include "aseplab/errors.hpp"

namespace aseplab {

class EmpiricalCDF {
  public:
    EmpiricalCDF(std::vector<double> samples, std::uint64_t seed)
        : samples_(std::move(samples)), seed_(seed) {
        if (samples_.empty()) throw precondition_error("empty sample");
        std::sort(samples_.begin(), samples_.end());
    }

    const std::vector<double>& samples() const { return samples_; }
    std::uint64_t seed() const { return seed_; }
    std::size_t trials() const { return samples_.size(); }

    // Right-continuous empirical distribution function.
    double operator()(double x) const {
        const auto it = std::upper_bound(samples_.begin(), samples_.end(), x);
        return double(it - samples_.begin()) / double(samples_.size());
    }

    // sup_x |F_n(x) - F(x)| against a reference CDF. Duplicate sample values
    // (atoms) are handled by evaluating both one-sided gaps per unique value.
    template <class F>
    double ks_distance(F&& cdf) const {
        const double n = double(samples_.size());
        double d = 0.0;
        std::size_t i = 0;
        while (i < samples_.size()) {
            std::size_t j = i;
            while (j < samples_.size() && samples_[j] == samples_[i]) ++j;
            const double f = cdf(samples_[i]);
            d = std::max(d, std::abs(double(j) / n - f));
            d = std::max(d, std::abs(f - double(i) / n));
            i = j;
        }
        return d;
    }

  private:
    std::vector<double> samples_;
    std::uint64_t seed_;
};

}  // namespace aseplab
