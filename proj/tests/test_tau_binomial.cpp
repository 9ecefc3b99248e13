#include <catch2/catch_amalgamated.hpp>

#include "aseplab/tau_binomial.hpp"

using namespace aseplab;

TEST_CASE("bracket basics") {
    TauBinomial tb{HoppingRates(0.3)};
    CHECK(tb.bracket(0) == 1.0);
    CHECK(tb.bracket(1) == Catch::Approx(1.0));
    // [2] = (p^2 - q^2)/(p - q) = p + q = 1
    CHECK(tb.bracket(2) == Catch::Approx(1.0));
    // [3] = p^2 + pq + q^2
    CHECK(tb.bracket(3) == Catch::Approx(0.09 + 0.21 + 0.49));
}

TEST_CASE("[2 1] equals one for any rates") {
    for (double p : {0.1, 0.2, 0.45}) {
        TauBinomial tb{HoppingRates(p)};
        CHECK(tb.binom_modified(2, 1) == Catch::Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("tau-binomial boundary and symmetry") {
    TauBinomial tb{HoppingRates(0.2)};
    CHECK(tb.binom_tau(5, -1) == 0.0);
    CHECK(tb.binom_tau(5, 6) == 0.0);
    CHECK(tb.binom_tau(5, 0) == 1.0);
    CHECK(tb.binom_tau(5, 5) == 1.0);
    for (int n = 0; n <= 10; ++n)
        for (int m = 0; m <= n; ++m)
            CHECK(tb.binom_tau(n, m) ==
                  Catch::Approx(tb.binom_tau(n, n - m)).epsilon(1e-13));
}

TEST_CASE("modified coefficient matches the bracket-factorial route") {
    for (double p : {0.1, 0.25, 0.4}) {
        TauBinomial tb{HoppingRates(p)};
        for (int n = 0; n <= 12; ++n)
            for (int m = 0; m <= n; ++m)
                CHECK(tb.binom_modified(n, m) ==
                      Catch::Approx(tb.binom_modified_by_factorials(n, m)).epsilon(1e-11));
    }
}

TEST_CASE("Pascal-type recurrence for the tau-binomial") {
    TauBinomial tb{HoppingRates(0.3)};
    const double tau = tb.tau();
    for (int n = 1; n <= 12; ++n)
        for (int m = 0; m <= n; ++m) {
            const double lhs = tb.binom_tau(n, m);
            const double rhs = tb.binom_tau(n - 1, m - 1) +
                               std::pow(tau, m) * tb.binom_tau(n - 1, m);
            CHECK(lhs == Catch::Approx(rhs).epsilon(1e-12));
        }
}

TEST_CASE("large-N coefficients stay finite through the log-space path") {
    TauBinomial tb{HoppingRates(0.2)};
    const double v = tb.binom_modified(120, 60);  // q^{3600} would underflow directly
    CHECK(v > 0.0);
    CHECK(std::isfinite(v));
}
