#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numeric>

#include "aseplab/asep_sim.hpp"

using namespace aseplab;

namespace {

// modified Bessel I_k by its power series; test-side oracle
double bessel_i_series(int k, double z) {
    k = std::abs(k);
    double term = 1.0;
    for (int j = 1; j <= k; ++j) term *= (z / 2.0) / j;
    double sum = term;
    for (int j = 1; j < 500; ++j) {
        term *= (z / 2.0) * (z / 2.0) / (double(j) * (j + k));
        sum += term;
        if (term < 1e-18 * sum) break;
    }
    return sum;
}

}  // namespace

TEST_CASE("truncate_initial realizes step occupation at t = 0") {
    HoppingRates rates(0.3);
    RngStream rng(1, 0, stream_phase::init);
    auto ts = truncate_initial(InitialCondition::step(), rates, 0.0, 3, 2.0, rng);
    CHECK(ts.state.mth_position(3) == 3);
    for (int i = 1; i <= ts.state.particle_count(); ++i)
        CHECK(ts.state.mth_position(i) == i);
}

TEST_CASE("truncate_initial window covers a finite configuration") {
    HoppingRates rates(0.3);
    RngStream rng(1, 0, stream_phase::init);
    auto ts = truncate_initial(InitialCondition::finite({1, 2}), rates, 1.0, 2, 2.0, rng);
    CHECK(ts.state.window().lo <= -2);
    CHECK(ts.state.window().hi >= 4);
    CHECK(ts.state.occupied() == std::vector<int>{1, 2});
}

TEST_CASE("truncate_initial rejects misuse") {
    HoppingRates rates(0.3);
    RngStream rng(1);
    CHECK_THROWS_AS(truncate_initial(InitialCondition::step(), rates, 1.0, 1, 0.5, rng),
                    precondition_error);
    CHECK_THROWS_AS(truncate_initial(InitialCondition::step(), rates, -1.0, 1, 2.0, rng),
                    precondition_error);
    CHECK_THROWS_AS(InitialCondition::finite({2, 2}), precondition_error);
    CHECK_THROWS_AS(InitialCondition::step_bernoulli(0.0), precondition_error);
}

TEST_CASE("Bernoulli occupation frequency matches the density") {
    HoppingRates rates(0.3);
    const int draws = 10000;
    double occupied = 0.0, sites = 0.0;
    for (int k = 0; k < draws; ++k) {
        RngStream rng(77, std::uint64_t(k), stream_phase::init);
        auto ts = truncate_initial(InitialCondition::step_bernoulli(0.5), rates, 4.0, 2, 3.0, rng);
        occupied += ts.state.particle_count();
        sites += ts.state.window().hi;  // positive part of the window
    }
    CHECK(occupied / sites == Catch::Approx(0.5).margin(0.015));
}

TEST_CASE("zero-duration run leaves the state untouched") {
    HoppingRates rates(0.3);
    LatticeState st(Window{-5, 5}, {0, 2}, 1.5);
    RngStream rng(3, 0, stream_phase::dynamics);
    auto out = run_to_time(st, rates, 1.5, rng);
    CHECK(out.occupied() == st.occupied());
    CHECK(out.time() == 1.5);
    CHECK_THROWS_AS(run_to_time(st, rates, 1.0, rng), precondition_error);
}

TEST_CASE("free particle matches the drift expectation") {
    HoppingRates rates(0.3);
    const double t = 5.0;
    const int trials = 100000;
    double sum = 0.0, sumsq = 0.0;
    for (int k = 0; k < trials; ++k) {
        RngStream rng(11, std::uint64_t(k), stream_phase::dynamics);
        LatticeState st(Window{-80, 80}, {0});
        st.advance(rates, t, rng);
        const double d = st.mth_position(1);
        sum += d;
        sumsq += d * d;
    }
    const double mean = sum / trials;
    const double var = sumsq / trials - mean * mean;
    const double expect = (rates.p() - rates.q()) * t;
    const double stderr_mean = std::sqrt(var / trials);
    CHECK(std::fabs(mean - expect) < 3.0 * stderr_mean);
}

TEST_CASE("exclusion blocks a particle behind a frozen neighbor") {
    HoppingRates rates(0.0);  // left jumps only
    LatticeState st(Window{0, 10}, {0, 1});
    RngStream rng(5, 0, stream_phase::dynamics);
    // particle at 0 cannot leave the window, particle at 1 is blocked by it
    for (int rep = 0; rep < 10000; ++rep) {
        st.advance(rates, st.time() + 0.01, rng);
        REQUIRE(st.exclusion_holds());
        REQUIRE(st.particle_count() == 2);
    }
    CHECK(st.occupied() == std::vector<int>{0, 1});
}

TEST_CASE("particle count is conserved along trajectories") {
    HoppingRates rates(0.45);
    RngStream init(21, 0, stream_phase::init);
    auto ts = truncate_initial(InitialCondition::step_bernoulli(0.7), rates, 3.0, 2, 2.0, init);
    const int n0 = ts.state.particle_count();
    RngStream rng(21, 0, stream_phase::dynamics);
    for (int rep = 0; rep < 50; ++rep) {
        ts.state.advance(rates, ts.state.time() + 0.1, rng);
        REQUIRE(ts.state.particle_count() == n0);
        REQUIRE(ts.state.exclusion_holds());
    }
}

TEST_CASE("mth_position is strictly increasing in m") {
    HoppingRates rates(0.3);
    RngStream init(31, 0, stream_phase::init);
    auto ts = truncate_initial(InitialCondition::step(), rates, 2.0, 4, 2.0, init);
    RngStream rng(31, 0, stream_phase::dynamics);
    ts.state.advance(rates, 2.0, rng);
    for (int m = 2; m <= ts.state.particle_count(); ++m)
        REQUIRE(ts.state.mth_position(m) > ts.state.mth_position(m - 1));
    CHECK_THROWS_AS(ts.state.mth_position(0), precondition_error);
    CHECK_THROWS_AS(ts.state.mth_position(ts.state.particle_count() + 1), precondition_error);
}

TEST_CASE("current counts occupied sites at or left of x") {
    LatticeState st(Window{-5, 5}, {1, 2, 3});
    CHECK(st.current(2) == 2);
    CHECK(st.current(0) == 0);
    CHECK(st.current(5) == 3);
    LatticeState empty(Window{-5, 5}, {});
    CHECK(empty.current(0) == 0);
}

TEST_CASE("pathwise duality between current and particle positions") {
    HoppingRates rates(0.3);
    const int x = -1, m = 2;
    for (int k = 0; k < 10000; ++k) {
        RngStream init(99, std::uint64_t(k), stream_phase::init);
        auto ts = truncate_initial(InitialCondition::step(), rates, 2.0, m + 1, 2.0, init);
        RngStream rng(99, std::uint64_t(k), stream_phase::dynamics);
        ts.state.advance(rates, 2.0, rng);
        const bool current_low = ts.state.current(x) <= m;
        const bool particle_right = ts.state.mth_position(m + 1) > x;
        REQUIRE(current_low == particle_right);
    }
}

TEST_CASE("sample_marginal is deterministic and thread-count independent") {
    HoppingRates rates(0.3);
    auto a = sample_marginal(InitialCondition::step(), rates, 1, 1.0, 400, 123, 3.0, 1);
    auto b = sample_marginal(InitialCondition::step(), rates, 1, 1.0, 400, 123, 3.0, 4);
    REQUIRE(a.cdf.samples() == b.cdf.samples());
    auto c = sample_marginal(InitialCondition::step(), rates, 1, 1.0, 400, 124, 3.0, 1);
    CHECK(a.cdf.samples() != c.cdf.samples());
}

TEST_CASE("step and Bernoulli(1) give identical samples for equal seeds") {
    HoppingRates rates(0.3);
    auto a = sample_marginal(InitialCondition::step(), rates, 2, 1.5, 300, 55, 3.0, 2);
    auto b = sample_marginal(InitialCondition::step_bernoulli(1.0), rates, 2, 1.5, 300, 55, 3.0, 2);
    REQUIRE(a.cdf.samples() == b.cdf.samples());
}

TEST_CASE("x_1(0) = 1 under the step initial condition") {
    HoppingRates rates(0.3);
    auto s = sample_marginal(InitialCondition::step(), rates, 1, 0.0, 64, 9);
    for (double v : s.cdf.samples()) REQUIRE(v == 1.0);
}

TEST_CASE("leftmost particle of leftward TASEP jumps at rate one") {
    HoppingRates rates(0.0);  // p = 0: x_1 is never blocked moving left
    auto s = sample_marginal(InitialCondition::step(), rates, 1, 1.0, 100000, 2024, 2.0, 2);
    const double p_leq0 = s.cdf(0.0);
    const double expect = 1.0 - std::exp(-1.0);
    const double se = std::sqrt(expect * (1.0 - expect) / 100000.0);
    CHECK(std::fabs(p_leq0 - expect) < 3.0 * se);
}

TEST_CASE("single-particle law matches the exact propagator") {
    HoppingRates rates(0.3);
    const double t = 2.0;
    const int trials = 100000;
    std::vector<double> xs(trials);
    for (int k = 0; k < trials; ++k) {
        RngStream rng(314, std::uint64_t(k), stream_phase::dynamics);
        LatticeState st(Window{-60, 60}, {0});
        st.advance(rates, t, rng);
        xs[std::size_t(k)] = st.mth_position(1);
    }
    EmpiricalCDF emp(std::move(xs), 314);
    const double z = 2.0 * std::sqrt(rates.p() * rates.q()) * t;
    for (int x = -6; x <= 4; x += 2) {
        double cdf = 0.0;
        for (int k = -40; k <= x; ++k)
            cdf += std::exp(-t) * std::pow(rates.p() / rates.q(), k / 2.0) *
                   bessel_i_series(k, z);
        const double se = std::sqrt(std::max(cdf * (1 - cdf), 1e-8) / trials);
        REQUIRE(std::fabs(emp(double(x)) - cdf) < 3.5 * se);
    }
}

TEST_CASE("empirical CDF is right-continuous and normalized") {
    EmpiricalCDF e({3.0, 1.0, 1.0, 2.0}, 0);
    CHECK(e(0.99) == 0.0);
    CHECK(e(1.0) == 0.5);
    CHECK(e(2.5) == 0.75);
    CHECK(e(3.0) == 1.0);
    CHECK(e.ks_distance([](double) { return 0.5; }) == Catch::Approx(0.5));
}

TEST_CASE("doubling the window does not shift the sampled law beyond noise") {
    HoppingRates rates(0.3);
    auto a = sample_marginal(InitialCondition::step(), rates, 2, 3.0, 20000, 808, 3.0, 2);
    auto b = sample_marginal(InitialCondition::step(), rates, 2, 3.0, 20000, 808, 6.0, 2);
    // same seed, different windows; compare the two CDFs at a few points
    for (double x : {-4.0, -2.0, 0.0, 2.0}) {
        const double pa = a.cdf(x), pb = b.cdf(x);
        const double se = std::sqrt(std::max(pa * (1 - pa), 1e-6) / 20000.0);
        CHECK(std::fabs(pa - pb) < 4.0 * se);
    }
}
