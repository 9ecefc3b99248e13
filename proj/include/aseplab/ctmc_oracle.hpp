#pragma once

// Independent oracle for transition probabilities: the exclusion process on
// a finite window is a finite-state CTMC, and its distribution at time t is
// computed by uniformization (Poisson-weighted powers of the jump chain).
// Test-side ground truth; exact up to window leakage and Poisson-tail
// truncation, both controlled below 1e-12.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "aseplab/asep_sim.hpp"
#include "aseplab/errors.hpp"
#include "aseplab/hopping_rates.hpp"

namespace aseplab {

class GeneratorOracle {
  public:
    struct Options {
        int window_margin = 0;      // 0 = choose from the Poisson tail bound
        double leakage_tol = 1e-10;
        std::size_t state_cap = 20000;
        double poisson_tail_tol = 1e-14;
    };

    GeneratorOracle(std::vector<int> y, double t, HoppingRates rates)
        : GeneratorOracle(std::move(y), t, rates, Options()) {}

    GeneratorOracle(std::vector<int> y, double t, HoppingRates rates, Options opt)
        : y_(std::move(y)), t_(t), rates_(rates) {
        if (t < 0.0) throw precondition_error("time must be nonnegative");
        for (std::size_t i = 1; i < y_.size(); ++i)
            if (y_[i] <= y_[i - 1])
                throw precondition_error("initial configuration must be strictly increasing");
        const int n_particles = int(y_.size());

        int margin = opt.window_margin;
        if (margin == 0) {
            margin = 1;
            while (double(n_particles) * poisson_upper_tail(t, margin) > opt.leakage_tol)
                ++margin;
        }
        margin_ = margin;
        leakage_bound_ = double(n_particles) * poisson_upper_tail(t, margin);
        window_ = {y_.front() - margin, y_.back() + margin};

        enumerate_states(opt.state_cap);
        run_uniformization(opt.poisson_tail_tol);
    }

    const Window& window() const { return window_; }
    double leakage_bound() const { return leakage_bound_; }
    std::size_t state_count() const { return states_.size(); }

    double prob(const std::vector<int>& x) const {
        const long r = rank(x);
        return r < 0 ? 0.0 : dist_[std::size_t(r)];
    }

    double total_mass() const {
        double s = 0.0;
        for (double v : dist_) s += v;
        return s;
    }

    // Visit each configuration with its probability.
    template <class F>
    void for_each(F&& fn) const {
        for (std::size_t i = 0; i < states_.size(); ++i) fn(states_[i], dist_[i]);
    }

  private:
    std::vector<int> y_;
    double t_;
    HoppingRates rates_;
    Window window_{};
    int margin_ = 0;
    double leakage_bound_ = 0.0;
    std::vector<std::vector<int>> states_;
    std::vector<double> dist_;
    // jump-chain CSR: for state s, moves are (target, rate)
    std::vector<std::size_t> row_ptr_;
    std::vector<std::pair<std::uint32_t, double>> moves_;

    long rank(const std::vector<int>& x) const {
        if (x.size() != y_.size()) return -1;
        const auto it = index_.find(encode(x));
        return it == index_.end() ? -1 : long(it->second);
    }

    // pack a configuration into one integer key (site offsets fit in 8 bits)
    std::uint64_t encode(const std::vector<int>& x) const {
        std::uint64_t key = 0;
        for (int v : x) {
            const int site = v - window_.lo;
            if (site < 0 || site >= window_.size() || window_.size() > 255) return ~0ULL;
            key = (key << 8) | std::uint64_t(site + 1);
        }
        return key;
    }

    void enumerate_states(std::size_t cap) {
        const int n_sites = window_.size();
        const int k = int(y_.size());
        if (k > 7) throw precondition_error("oracle supports at most 7 particles");
        double total = 1.0;  // C(n_sites, k)
        for (int i = 0; i < k; ++i) total = total * double(n_sites - i) / double(i + 1);
        if (total > double(cap))
            throw precondition_error("oracle state space exceeds the configured cap");

        states_.reserve(std::size_t(total) + 1);
        std::vector<int> cfg(static_cast<std::size_t>(k));
        for (int i = 0; i < k; ++i) cfg[std::size_t(i)] = window_.lo + i;
        while (true) {
            index_.emplace(encode(cfg), states_.size());
            states_.push_back(cfg);
            int i = k - 1;
            while (i >= 0 && cfg[std::size_t(i)] == window_.hi - (k - 1 - i)) --i;
            if (i < 0) break;
            ++cfg[std::size_t(i)];
            for (int j = i + 1; j < k; ++j) cfg[std::size_t(j)] = cfg[std::size_t(j - 1)] + 1;
        }

        row_ptr_.assign(states_.size() + 1, 0);
        const double p = rates_.p(), q = rates_.q();
        for (std::size_t s = 0; s < states_.size(); ++s) {
            const auto& st = states_[s];
            std::vector<int> tgt = st;
            for (int i = 0; i < k; ++i) {
                const int pos = st[std::size_t(i)];
                const bool right_free =
                    pos + 1 <= window_.hi &&
                    (i + 1 >= k || st[std::size_t(i + 1)] != pos + 1);
                const bool left_free =
                    pos - 1 >= window_.lo && (i == 0 || st[std::size_t(i - 1)] != pos - 1);
                if (right_free && p > 0.0) {
                    tgt[std::size_t(i)] = pos + 1;
                    moves_.emplace_back(std::uint32_t(rank(tgt)), p);
                    tgt[std::size_t(i)] = pos;
                }
                if (left_free && q > 0.0) {
                    tgt[std::size_t(i)] = pos - 1;
                    moves_.emplace_back(std::uint32_t(rank(tgt)), q);
                    tgt[std::size_t(i)] = pos;
                }
            }
            row_ptr_[s + 1] = moves_.size();
        }
    }

    void run_uniformization(double tail_tol) {
        const std::size_t n = states_.size();
        const double lam = double(y_.size());  // uniformization rate >= total outflow
        const double lt = lam * t_;

        std::vector<double> v(n, 0.0), w(n, 0.0);
        v[std::size_t(rank(y_))] = 1.0;
        dist_.assign(n, 0.0);

        // result = sum_m Poisson(m; lt) P_hat^m v
        double weight = std::exp(-lt);
        double cum = weight;
        for (std::size_t i = 0; i < n; ++i) dist_[i] += weight * v[i];
        const int m_max = int(lt + 12.0 * std::sqrt(lt + 1.0) + 60.0);
        for (int m = 1; m <= m_max; ++m) {
            // w = P_hat v, P_hat = I + Q/lam
            std::copy(v.begin(), v.end(), w.begin());
            for (std::size_t s = 0; s < n; ++s) {
                if (v[s] == 0.0) continue;
                const double share = v[s] / lam;
                double outflow = 0.0;
                for (std::size_t e = row_ptr_[s]; e < row_ptr_[s + 1]; ++e) {
                    w[moves_[e].first] += share * moves_[e].second;
                    outflow += moves_[e].second;
                }
                w[s] -= share * outflow;
            }
            std::swap(v, w);
            weight *= lt / double(m);
            cum += weight;
            for (std::size_t i = 0; i < n; ++i) dist_[i] += weight * v[i];
            if (m > lt && 1.0 - cum < tail_tol) break;
        }
    }

    std::unordered_map<std::uint64_t, std::size_t> index_;
};

}  // namespace aseplab
