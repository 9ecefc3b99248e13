#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "aseplab/rng.hpp"

using namespace aseplab;

TEST_CASE("streams are pure functions of (seed, keys)") {
    RngStream a(42, 7, 1), b(42, 7, 1);
    for (int i = 0; i < 100; ++i) REQUIRE(a.next_u64() == b.next_u64());

    RngStream c(42, 8, 1);
    int same = 0;
    RngStream a2(42, 7, 1);
    for (int i = 0; i < 100; ++i) same += (a2.next_u64() == c.next_u64());
    CHECK(same == 0);
}

TEST_CASE("u01 stays in [0,1) and is roughly uniform") {
    RngStream r(1);
    double sum = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = r.u01();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        sum += u;
    }
    CHECK(sum / n == Catch::Approx(0.5).margin(0.005));
}

TEST_CASE("exponential has the requested mean") {
    RngStream r(9, 3);
    double sum = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) sum += r.exponential(2.0);
    CHECK(sum / n == Catch::Approx(0.5).margin(0.01));
}

TEST_CASE("below(n) covers the range without obvious bias") {
    RngStream r(5, 11);
    std::vector<int> counts(7, 0);
    const int n = 140000;
    for (int i = 0; i < n; ++i) ++counts[std::size_t(r.below(7))];
    for (int c : counts) CHECK(std::fabs(c - n / 7.0) < 5.0 * std::sqrt(n / 7.0));
}
