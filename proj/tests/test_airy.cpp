#include <catch2/catch_amalgamated.hpp>

#include "aseplab/airy.hpp"

using namespace aseplab;

namespace {
// Reference values computed once with 50-digit arithmetic (mpmath) and
// frozen here; they cover the series region, both asymptotic branches, and
// the crossover neighborhoods.
struct AiryRef {
    double x, ai, aip;
};
constexpr AiryRef kRefs[] = {
    {-16.0, -0.1430579316690997, -0.9747644416212727},
    {-13.0, 0.17151043937053703, -0.8715196778799533},
    {-11.5, 0.30542297004359265, 0.08772415432178444},
    {-10.0, 0.04024123848644319, 0.99626504413279},
    {-9.0, -0.022133721547341403, -0.9756639809263316},
    {-8.0, -0.0527050503563862, 0.9355609381983065},
    {-6.5, -0.2380203019971158, -0.6749524925132022},
    {-5.0, 0.35076100902411433, 0.32719281855444315},
    {-3.5, -0.37553382314043193, -0.34344343345404815},
    {-2.0, 0.22740742820168558, 0.618259020741691},
    {-1.25, 0.5200454774352992, 0.13907956335191776},
    {-0.5, 0.4757280916105396, -0.20408167033954738},
    {0.0, 0.3550280538878172, -0.2588194037928068},
    {0.75, 0.17933630547864524, -0.19317520810437647},
    {1.5, 0.07174949700810541, -0.09738201284230132},
    {2.5, 0.01572592338047049, -0.026250881035903232},
    {3.5, 0.002584098786989635, -0.005004413967952583},
    {4.5, 0.00033025032351430896, -0.0007178665675575089},
    {6.0, 9.947694360252889e-06, -2.4765200397034955e-05},
    {7.5, 1.9172560675134309e-07, -5.312713959720545e-07},
    {8.25, 2.2837139444822283e-08, -6.626952666987631e-08},
    {8.75, 5.2401142318917526e-09, -1.5646762027577948e-08},
    {9.5, 5.330263704617492e-10, -1.6566394593740667e-09},
    {10.0, 1.1047532552898686e-10, -3.5206336767389237e-10},
    {12.0, 1.3931846888753607e-13, -4.854736554985309e-13},
    {16.0, 4.1568888289170244e-20, -1.669188676838181e-19},
    {20.0, 1.6916728686705404e-27, -7.586391625748354e-27},
};
}  // namespace

TEST_CASE("Ai and Ai' reproduce frozen references to 1e-13") {
    for (const auto& r : kRefs) {
        const AiryPair p = airy_dd(dd(r.x));
        CHECK(std::fabs(p.ai.hi - r.ai) <= 1e-13 * std::fabs(r.ai));
        CHECK(std::fabs(p.aip.hi - r.aip) <= 1e-13 * std::fabs(r.aip));
    }
}

TEST_CASE("series and asymptotic branches agree at the crossovers") {
    {
        const AiryPair s = detail::airy_maclaurin(dd(8.5));
        const AiryPair a = detail::airy_asymptotic_pos(dd(8.5));
        CHECK(std::fabs(to_double((s.ai - a.ai) / s.ai)) < 1e-13);
        CHECK(std::fabs(to_double((s.aip - a.aip) / s.aip)) < 1e-13);
    }
    {
        const AiryPair s = detail::airy_maclaurin(dd(-12.0));
        const AiryPair a = detail::airy_asymptotic_neg(dd(-12.0));
        CHECK(std::fabs(to_double((s.ai - a.ai) / s.ai)) < 1e-12);
        CHECK(std::fabs(to_double((s.aip - a.aip) / s.aip)) < 1e-12);
    }
}

TEST_CASE("dd evaluation carries sub-double accuracy where the shooting needs it") {
    // Ai(12) to dd precision (hi/lo split of the 50-digit value)
    const dd ref_ai{1.3931846888753607e-13, 9.509986921024777e-30};
    const dd ref_aip{-4.854736554985309e-13, 4.3965786226177744e-29};
    const AiryPair p = airy_dd(dd(12.0));
    CHECK(std::fabs(to_double((p.ai - ref_ai) / ref_ai)) < 1e-24);
    CHECK(std::fabs(to_double((p.aip - ref_aip) / ref_aip)) < 1e-24);
}

TEST_CASE("second derivative satisfies the defining equation") {
    // Ai'' = x Ai via a five-point stencil on Ai'
    for (double x : {-5.0, -1.0, 0.5, 3.0, 7.0}) {
        const double h = 1e-3;
        const double d2 = (-airy_ai_prime(x + 2 * h) + 8 * airy_ai_prime(x + h) -
                           8 * airy_ai_prime(x - h) + airy_ai_prime(x - 2 * h)) /
                          (12.0 * h);
        CHECK(d2 == Catch::Approx(x * airy_ai(x)).margin(1e-9));
    }
}
