#include <catch2/catch_amalgamated.hpp>

#include "aseplab/dd.hpp"

using namespace aseplab;

TEST_CASE("dd arithmetic keeps sub-double residuals") {
    // (1e16 + 1) - 1e16 loses the 1 in double, not in dd
    dd a = dd(1e16) + dd(1.0);
    CHECK(to_double(a - dd(1e16)) == 1.0);

    // a long alternating sum that cancels exactly
    dd s(0.0);
    for (int i = 0; i < 1000; ++i) s += (i % 2 ? -1.0 : 1.0) * dd(1.0) / dd(3.0);
    CHECK(std::fabs(to_double(s)) < 1e-30);
}

TEST_CASE("dd division and sqrt round-trip") {
    dd x = dd(2.0);
    dd r = sqrt(x);
    dd back = r * r - x;
    CHECK(std::fabs(back.hi) < 1e-31);

    dd q = dd(1.0) / dd(7.0);
    CHECK(std::fabs(to_double(q * 7.0 - dd(1.0))) < 1e-31);
}

TEST_CASE("dd exp and log agree with high-precision references") {
    // e to 32 digits: 2.7182818284590452353602874713527
    dd e1 = exp(dd(1.0));
    CHECK(e1.hi == Catch::Approx(2.718281828459045).epsilon(1e-15));
    CHECK(std::fabs(e1.lo - 1.4456468917292502e-16) < 1e-28);

    dd l = log(exp(dd(0.37)));
    CHECK(std::fabs(to_double(l - dd(0.37))) < 1e-30);
}

TEST_CASE("dd sincospi hits exact rational angles") {
    dd s, c;
    sincospi(dd(1.0) / dd(6.0), s, c);
    CHECK(s.hi == Catch::Approx(0.5).margin(1e-31));
    sincospi(dd(0.5), s, c);
    CHECK(s.hi == 1.0);
    CHECK(std::fabs(c.hi) < 1e-32);
    sincospi(dd(1.0), s, c);  // sin(pi) = 0, cos(pi) = -1
    CHECK(std::fabs(s.hi) < 1e-32);
    CHECK(c.hi == -1.0);
}

TEST_CASE("complex dd powers and exponentials") {
    cdd z{dd(0.3), dd(0.4)};
    cdd z5 = pow_int(z, 5);
    cdd z5m = z * z * z * z * z;
    CHECK(std::fabs(to_double(z5.re - z5m.re)) < 1e-30);
    CHECK(std::fabs(to_double(z5.im - z5m.im)) < 1e-30);

    // |exp(i y)| = 1
    cdd w = exp(cdd{dd(0.0), dd(2.5)});
    CHECK(std::fabs(to_double(norm(w)) - 1.0) < 1e-30);

    cdd inv = pow_int(z, -3) * pow_int(z, 3);
    CHECK(std::fabs(to_double(inv.re) - 1.0) < 1e-29);
    CHECK(std::fabs(to_double(inv.im)) < 1e-29);
}
