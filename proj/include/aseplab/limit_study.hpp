#pragma once

// Convergence studies tying Monte Carlo ASEP to the Tracy-Widom limit laws:
// simulate a ladder of times, scale the observable, and report the
// Kolmogorov-Smirnov distance to the classified target law per rung.
//
// Time convention: the limit laws dilate time by 1/gamma; studies receive
// the law-side t and simulate to raw process time t/gamma. The simulator
// itself never applies the dilation.
//
// Reproducibility: trial streams derive from (seed, rung << 32 | trial), so
// reports are byte-identical for any thread count. Matched particle/current
// studies (v = c1(sigma), so a1 = sigma) reuse the same streams and windows
// and therefore measure the same trajectories.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <thread>
#include <vector>

#include "aseplab/asep_sim.hpp"
#include "aseplab/empirical_cdf.hpp"
#include "aseplab/errors.hpp"
#include "aseplab/scaling.hpp"
#include "aseplab/tw_distribution.hpp"

namespace aseplab {

struct StudyRung {
    double t;
    double ks;
    std::size_t trials;
};

struct ConvergenceReport {
    std::string regime;
    std::string observable;  // "particle" or "current"
    double p;
    double rho;
    double parameter;  // sigma or v
    std::uint64_t seed;
    std::vector<StudyRung> rungs;

    std::string to_csv() const {
        std::string out = "# schema-version: 1\n";
        out += "observable,regime,p,rho,parameter,seed,t,ks,trials\n";
        char buf[256];
        for (const auto& r : rungs) {
            std::snprintf(buf, sizeof buf, "%s,%s,%.17g,%.17g,%.17g,%llu,%.17g,%.17g,%zu\n",
                          observable.c_str(), regime.c_str(), p, rho, parameter,
                          static_cast<unsigned long long>(seed), r.t, r.ks, r.trials);
            out += buf;
        }
        return out;
    }
};

struct StudyOptions {
    double safety = 3.0;   // light-cone window factor for the simulations
    unsigned threads = 0;  // 0 = hardware
};

namespace detail {

// round-half-up particle index m = [sigma t]
inline int round_half_up(double v) { return int(std::floor(v + 0.5)); }

struct DualObservation {
    int x_m;
    int current;
};

// One trajectory; returns both the m-th particle position and the current
// at x_site so matched studies share paths exactly.
inline DualObservation dual_trial(const InitialCondition& init, const HoppingRates& rates,
                                  int m, int x_site, double t_raw, double safety,
                                  std::uint64_t seed, std::uint64_t trial_key) {
    RngStream init_rng(seed, trial_key, stream_phase::init);
    TruncatedState ts = truncate_initial(init, rates, t_raw, m, safety, init_rng);
    RngStream dyn_rng(seed, trial_key, stream_phase::dynamics);
    ts.state.advance(rates, t_raw, dyn_rng);
    return {ts.state.mth_position(m), ts.state.current(x_site)};
}

template <class Extract>
std::vector<double> run_rung(const InitialCondition& init, const HoppingRates& rates, int m,
                             int x_site, double t_raw, std::uint64_t seed, std::size_t rung_index,
                             std::size_t trials, const StudyOptions& opt, Extract&& extract) {
    std::vector<double> values(trials);
    unsigned threads = opt.threads ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, unsigned(trials));
    auto worker = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t k = lo; k < hi; ++k) {
            const std::uint64_t key = (std::uint64_t(rung_index) << 32) | std::uint64_t(k);
            values[k] = extract(dual_trial(init, rates, m, x_site, t_raw, opt.safety, seed, key));
        }
    };
    if (threads <= 1) {
        worker(0, trials);
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (trials + threads - 1) / threads;
        for (unsigned w = 0; w < threads; ++w) {
            const std::size_t lo = w * chunk, hi = std::min(trials, lo + chunk);
            if (lo < hi) pool.emplace_back(worker, lo, hi);
        }
        for (auto& th : pool) th.join();
    }
    return values;
}

inline void validate_ladder(const std::vector<double>& ladder) {
    if (ladder.empty()) throw precondition_error("empty time ladder");
    for (std::size_t i = 1; i < ladder.size(); ++i)
        if (ladder[i] <= ladder[i - 1])
            throw precondition_error("time ladder must be strictly increasing");
}

}  // namespace detail

// P_rho((x_m(t/gamma) - c1 t) / (c2 t^{1/3}) <= s) -> F2(s) or F1(s)^2.
inline ConvergenceReport particle_limit_study(const HoppingRates& rates, double rho, double sigma,
                                              const std::vector<double>& t_ladder,
                                              std::size_t trials, std::uint64_t seed,
                                              const TWDistribution& f2, const TWDistribution& f1,
                                              StudyOptions opt = StudyOptions()) {
    rates.require_drift_left();
    detail::validate_ladder(t_ladder);
    const LimitRegime regime = classify_particle_regime(sigma, rho);
    const auto [c1, c2] = scaling_constants(sigma);
    const double gamma = rates.gamma();
    const InitialCondition init =
        rho == 1.0 ? InitialCondition::step() : InitialCondition::step_bernoulli(rho);

    ConvergenceReport report{regime_label(regime), "particle", rates.p(), rho, sigma, seed, {}};
    for (std::size_t ri = 0; ri < t_ladder.size(); ++ri) {
        const double t = t_ladder[ri];
        const int m = detail::round_half_up(sigma * t);
        if (m < 1) throw precondition_error("sigma * t below one particle at the smallest rung");
        const double t_raw = t / gamma;
        const int x_site = int(std::llround(c1 * t));  // matched-current site
        auto values = detail::run_rung(init, rates, m, x_site, t_raw, seed, ri, trials, opt,
                                       [&](detail::DualObservation o) {
                                           return (double(o.x_m) - c1 * t) / (c2 * std::cbrt(t));
                                       });
        EmpiricalCDF cdf(std::move(values), seed);
        const double ks =
            regime == LimitRegime::F2
                ? cdf.ks_distance([&](double s) { return f2(s); })
                : cdf.ks_distance([&](double s) { const double v = f1(s); return v * v; });
        report.rungs.push_back({t, ks, trials});
    }
    return report;
}

// P_rho((T(v t, t/gamma) - a1 t) / (a2 t^{1/3}) <= s) -> 1 - F2(-s) or
// 1 - F1(-s)^2.
inline ConvergenceReport current_limit_study(const HoppingRates& rates, double rho, double v,
                                             const std::vector<double>& t_ladder,
                                             std::size_t trials, std::uint64_t seed,
                                             const TWDistribution& f2, const TWDistribution& f1,
                                             StudyOptions opt = StudyOptions()) {
    rates.require_drift_left();
    detail::validate_ladder(t_ladder);
    const LimitRegime regime = classify_current_regime(v, rho);
    const auto [a1, a2] = current_constants(v);
    const double gamma = rates.gamma();
    const InitialCondition init =
        rho == 1.0 ? InitialCondition::step() : InitialCondition::step_bernoulli(rho);

    ConvergenceReport report{regime_label(regime), "current", rates.p(), rho, v, seed, {}};
    for (std::size_t ri = 0; ri < t_ladder.size(); ++ri) {
        const double t = t_ladder[ri];
        const int x_site = int(std::llround(v * t));
        // window sized by the matched particle index a1 t (a1 = sigma when
        // v = c1(sigma)), so matched studies simulate identical paths
        const int m = std::max(1, detail::round_half_up(a1 * t));
        const double t_raw = t / gamma;
        auto values = detail::run_rung(init, rates, m, x_site, t_raw, seed, ri, trials, opt,
                                       [&](detail::DualObservation o) {
                                           return (double(o.current) - a1 * t) /
                                                  (a2 * std::cbrt(t));
                                       });
        EmpiricalCDF cdf(std::move(values), seed);
        const double ks =
            regime == LimitRegime::F2Current
                ? cdf.ks_distance([&](double s) { return 1.0 - f2(-s); })
                : cdf.ks_distance([&](double s) { const double w = f1(-s); return 1.0 - w * w; });
        report.rungs.push_back({t, ks, trials});
    }
    return report;
}

}  // namespace aseplab
