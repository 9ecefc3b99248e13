#pragma once

// Continuous-time Monte Carlo for the asymmetric exclusion process on a
// finite lattice window. Event-driven: one exponential clock with rate equal
// to the particle count, then a uniform particle choice and a p/q direction
// draw. Blocked moves (target occupied, or outside the window) consume the
// tick and leave the particle in place.

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <string>
#include <thread>
#include <vector>

#include "aseplab/empirical_cdf.hpp"
#include "aseplab/errors.hpp"
#include "aseplab/hopping_rates.hpp"
#include "aseplab/rng.hpp"

namespace aseplab {

struct InitialCondition {
    enum class Kind { Finite, Step, StepBernoulli };

    Kind kind;
    std::vector<int> sites;  // Finite only; strictly increasing
    double rho = 1.0;        // StepBernoulli only

    static InitialCondition finite(std::vector<int> y) {
        for (std::size_t i = 1; i < y.size(); ++i)
            if (y[i] <= y[i - 1])
                throw precondition_error("finite initial configuration must be strictly increasing");
        return {Kind::Finite, std::move(y), 1.0};
    }
    static InitialCondition step() { return {Kind::Step, {}, 1.0}; }
    static InitialCondition step_bernoulli(double rho) {
        if (!(rho > 0.0 && rho <= 1.0))
            throw precondition_error("Bernoulli density must lie in (0, 1]");
        return {Kind::StepBernoulli, {}, rho};
    }
};

struct Window {
    int lo = 0;
    int hi = 0;
    int size() const { return hi - lo + 1; }
    bool contains(int x) const { return x >= lo && x <= hi; }
};

class LatticeState {
  public:
    LatticeState(Window w, std::vector<int> occupied, double time = 0.0)
        : window_(w), occupied_(std::move(occupied)), time_(time) {
        std::sort(occupied_.begin(), occupied_.end());
        for (std::size_t i = 0; i < occupied_.size(); ++i) {
            if (!window_.contains(occupied_[i]))
                throw precondition_error("occupied site outside window");
            if (i > 0 && occupied_[i] == occupied_[i - 1])
                throw precondition_error("duplicate occupied site");
        }
    }

    const Window& window() const { return window_; }
    const std::vector<int>& occupied() const { return occupied_; }
    double time() const { return time_; }
    int particle_count() const { return int(occupied_.size()); }

    // Position of the m-th particle from the left, 1-based.
    int mth_position(int m) const {
        if (m < 1 || m > particle_count())
            throw precondition_error("particle index out of range");
        return occupied_[std::size_t(m - 1)];
    }

    // Current T(x, t): number of particles at sites <= x.
    int current(int x) const {
        return int(std::upper_bound(occupied_.begin(), occupied_.end(), x) -
                   occupied_.begin());
    }

    bool current_may_be_truncated(int x) const {
        return x <= window_.lo || x >= window_.hi;
    }

    // No site may hold two particles; sortedness is maintained per event.
    bool exclusion_holds() const {
        for (std::size_t i = 1; i < occupied_.size(); ++i)
            if (occupied_[i] <= occupied_[i - 1]) return false;
        return true;
    }

    void advance(const HoppingRates& rates, double t_end, RngStream& rng) {
        if (t_end < time_) throw precondition_error("t_end before current state time");
        const int n = particle_count();
        if (n == 0) {
            time_ = t_end;
            return;
        }
        const double p = rates.p();
        while (true) {
            const double dt = rng.exponential(double(n));
            if (time_ + dt > t_end) {
                time_ = t_end;
                return;
            }
            time_ += dt;
            const auto i = std::size_t(rng.below(std::uint64_t(n)));
            const int pos = occupied_[i];
            if (rng.u01() < p) {
                const int target = pos + 1;
                const bool blocked = target > window_.hi ||
                                     (i + 1 < occupied_.size() && occupied_[i + 1] == target);
                if (!blocked) occupied_[i] = target;
            } else {
                const int target = pos - 1;
                const bool blocked = target < window_.lo ||
                                     (i > 0 && occupied_[i - 1] == target);
                if (!blocked) occupied_[i] = target;
            }
            assert(exclusion_holds());
        }
    }

  private:
    Window window_;
    std::vector<int> occupied_;  // sorted ascending
    double time_;
};

// P(Poisson(mean) >= k), summed directly.
inline double poisson_upper_tail(double mean, int k) {
    if (k <= 0) return 1.0;
    if (mean == 0.0) return 0.0;
    // 1 - sum_{j<k} e^-m m^j / j!
    double term = std::exp(-mean);
    double below = term;
    for (int j = 1; j < k; ++j) {
        term *= mean / double(j);
        below += term;
    }
    return std::max(0.0, 1.0 - below);
}

struct TruncatedState {
    LatticeState state;
    // Union-bound estimate of how much the finite window can shift the law
    // of the tracked observable: each particle must make >= margin jumps
    // (rate-1 clock) for boundary information to reach it by time t.
    double truncation_bias;
    int light_cone_margin;
};

// Finite-window realization of an initial condition, sized so the law of
// x_m(t) is insensitive to the boundary up to the reported bias estimate.
// Bernoulli occupation draws come from `init_rng`; a Step condition is the
// rho = 1 code path (every draw u < 1 succeeds), so equal seeds give
// identical states and identical downstream dynamics.
inline TruncatedState truncate_initial(const InitialCondition& init, const HoppingRates& rates,
                                       double t, int m, double safety, RngStream& init_rng) {
    (void)rates;
    if (t < 0.0) throw precondition_error("time must be nonnegative");
    if (m < 1) throw precondition_error("particle index must be >= 1");
    if (safety < 1.0) throw precondition_error("window safety factor must be >= 1");

    const int margin = int(std::ceil(safety * t));
    Window w{-margin - m, m + margin};

    std::vector<int> occ;
    switch (init.kind) {
        case InitialCondition::Kind::Finite: {
            w.lo = std::min(w.lo, init.sites.front() - margin);
            w.hi = std::max(w.hi, init.sites.back() + margin);
            occ = init.sites;
            break;
        }
        case InitialCondition::Kind::Step:
        case InitialCondition::Kind::StepBernoulli: {
            const double rho = init.kind == InitialCondition::Kind::Step ? 1.0 : init.rho;
            occ.reserve(std::size_t(w.hi));
            for (int x = 1; x <= w.hi; ++x)
                if (init_rng.u01() < rho) occ.push_back(x);
            // A sparse Bernoulli draw may realize fewer than m particles in
            // the nominal window; extend rightwards (continuing the same
            // draw stream, so smaller windows are prefixes) until the m-th
            // particle exists.
            while (int(occ.size()) < m) {
                const int new_hi = w.hi + std::max(m, margin + 1);
                for (int x = w.hi + 1; x <= new_hi; ++x)
                    if (init_rng.u01() < rho) occ.push_back(x);
                w.hi = new_hi;
            }
            break;
        }
    }

    const double tail = poisson_upper_tail(t, margin);
    const double bias = double(occ.size() + std::size_t(m)) * tail;
    return {LatticeState(w, std::move(occ)), bias, margin};
}

inline LatticeState run_to_time(LatticeState state, const HoppingRates& rates, double t_end,
                                RngStream& rng) {
    state.advance(rates, t_end, rng);
    return state;
}

namespace stream_phase {
inline constexpr std::uint64_t init = 0x5EED1A17;
inline constexpr std::uint64_t dynamics = 0xD1CE;
}  // namespace stream_phase

// One trial of x_m(t): realize the initial condition and run the dynamics,
// with both streams derived from (seed, trial).
inline int marginal_trial(const InitialCondition& init, const HoppingRates& rates, int m,
                          double t, double safety, std::uint64_t seed, std::uint64_t trial) {
    RngStream init_rng(seed, trial, stream_phase::init);
    TruncatedState ts = truncate_initial(init, rates, t, m, safety, init_rng);
    RngStream dyn_rng(seed, trial, stream_phase::dynamics);
    ts.state.advance(rates, t, dyn_rng);
    return ts.state.mth_position(m);
}

struct MarginalSample {
    EmpiricalCDF cdf;
    Window window;
    double truncation_bias;
};

// `trials` independent draws of x_m(t). Trials are independent streams, so
// the result is identical for any thread count.
inline MarginalSample sample_marginal(const InitialCondition& init, const HoppingRates& rates,
                                      int m, double t, std::size_t trials, std::uint64_t seed,
                                      double safety = 3.0, unsigned threads = 0) {
    if (trials < 1) throw precondition_error("need at least one trial");
    rates.require_drift_left();

    RngStream probe(seed, 0, stream_phase::init);
    TruncatedState ts0 = truncate_initial(init, rates, t, m, safety, probe);

    std::vector<double> samples(trials);
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, unsigned(trials));

    auto worker = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t k = lo; k < hi; ++k)
            samples[k] = marginal_trial(init, rates, m, t, safety, seed, k);
    };
    if (threads <= 1) {
        worker(0, trials);
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (trials + threads - 1) / threads;
        for (unsigned w = 0; w < threads; ++w) {
            const std::size_t lo = w * chunk;
            const std::size_t hi = std::min(trials, lo + chunk);
            if (lo < hi) pool.emplace_back(worker, lo, hi);
        }
        for (auto& th : pool) th.join();
    }
    return {EmpiricalCDF(std::move(samples), seed), ts0.state.window(), ts0.truncation_bias};
}

}  // namespace aseplab
