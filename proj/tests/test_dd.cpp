#include <doctest.h>

#include <cmath>

#include "fracsource/dd.hpp"

using namespace fracsource;

TEST_CASE("two_sum and two_prod recover rounding errors") {
    auto s = dd::two_sum(1.0, 1e-20);
    CHECK(s.hi == 1.0);
    CHECK(s.lo == doctest::Approx(1e-20).epsilon(1e-12));

    // (1 + 2^-30)(1 - 2^-30) = 1 - 2^-60 exactly: hi = 1, lo = -2^-60
    auto p = dd::two_prod(1.0 + std::ldexp(1.0, -30), 1.0 - std::ldexp(1.0, -30));
    CHECK(p.hi == 1.0);
    CHECK(p.lo == -std::ldexp(1.0, -60));
}

TEST_CASE("dd divide round trips") {
    dd::Real x{7.0};
    dd::Real y = dd::div(x, dd::Real{3.0});
    dd::Real back = dd::mul(y, dd::Real{3.0});
    CHECK(std::abs(back.hi - 7.0) < 1e-30);
    CHECK(std::abs(back.lo) < 1e-29);
}

TEST_CASE("dd exp and log agree with known values") {
    // e computed in dd should match binary64 e to well below 1 ulp
    dd::Real e = dd::exp(dd::Real{1.0});
    CHECK(e.hi == doctest::Approx(std::exp(1.0)).epsilon(1e-15));
    // residual against a 32-digit value of e
    double e_hi = 2.718281828459045;
    double e_lo = 1.4456468917292502e-16;
    CHECK(std::abs((e.hi - e_hi) + (e.lo - e_lo)) < 1e-29);

    dd::Real l = dd::log(2.0);
    CHECK(std::abs(l.hi - dd::kLn2.hi) < 1e-16);
    CHECK(std::abs((l.hi - dd::kLn2.hi) + (l.lo - dd::kLn2.lo)) < 1e-29);
}

TEST_CASE("dd lgamma matches high-precision references") {
    // reference values from mpmath at 40 digits
    struct Ref {
        double x;
        double hi, lo;
    };
    // lgamma(x) split into binary64 hi/lo pairs
    const Ref refs[] = {
        {0.5, 0.5723649429247001, 5.132975581353913e-18},
        {1.0, 0.0, 0.0},
        {3.25, 0.9358019311087253, 2.0465037219625833e-17},
        {12.0, 17.502307845873887, -7.099828843090002e-16},
        {47.5, 134.87498931216194, 5.922322508693699e-15},
        {150.0, 600.0094705553274, 2.862763070862112e-15},
    };
    for (const auto& r : refs) {
        dd::Real v = dd::lgamma(dd::Real{r.x});
        double err = std::abs((v.hi - r.hi) + (v.lo - r.lo));
        CAPTURE(r.x);
        CHECK(err < 1e-26 * std::max(1.0, std::abs(r.hi)));
    }
}

TEST_CASE("dd reciprocal gamma consistent with tgamma") {
    for (double x : {0.7, 1.5, 2.5, 6.0, 20.25, 90.0}) {
        dd::Real rg = dd::rgamma_positive(dd::Real{x});
        CHECK(rg.value() == doctest::Approx(1.0 / std::tgamma(x)).epsilon(5e-14));
    }
}
