#include "fracsource/dd.hpp"

namespace fracsource::dd {

Real exp(Real a) {
    if (a.hi < -745.0) return Real{0.0};
    // range reduce: a = n ln2 + r, |r| <= ln2/2
    double n = std::nearbyint(a.hi / kLn2.hi);
    Real r = sub(a, mul(kLn2, n));
    // Taylor sum of exp(r); |r| <= 0.347 so 26 terms reach ~1e-40
    Real sum{1.0};
    Real term{1.0};
    for (int k = 1; k <= 26; ++k) {
        term = mul(term, r);
        term = div(term, Real{static_cast<double>(k)});
        sum = add(sum, term);
    }
    double scale = std::ldexp(1.0, static_cast<int>(n));
    return {sum.hi * scale, sum.lo * scale};
}

Real log(double x) {
    // refine the double log with one Newton step in dd
    double h = std::log(x);
    Real e = exp(Real{-h});
    Real r = add(mul(e, x), -1.0); // x*exp(-h) - 1, size ~1e-16
    // log(x) = h + log1p(r) ~ h + r - r^2/2
    Real corr = sub(r, mul(mul(r, r), 0.5));
    return add(corr, h);
}

namespace {

// Bernoulli-number Stirling coefficients B_{2n} / (2n (2n-1)), exact rationals.
struct BernTerm {
    double num, den;
};
constexpr BernTerm kBern[] = {
    {1.0, 6.0 * 2 * 1},          // B2/(2*1)
    {-1.0, 30.0 * 4 * 3},        // B4/(4*3)
    {1.0, 42.0 * 6 * 5},
    {-1.0, 30.0 * 8 * 7},
    {5.0, 66.0 * 10 * 9},
    {-691.0, 2730.0 * 12 * 11},
    {7.0, 6.0 * 14 * 13},
    {-3617.0, 510.0 * 16 * 15},
    {43867.0, 798.0 * 18 * 17},
    {-174611.0, 330.0 * 20 * 19},
    {854513.0, 138.0 * 22 * 21},
    {-236364091.0, 2730.0 * 24 * 23},
};

Real stirling_lgamma(Real x) {
    // log Gamma(x) = (x - 1/2) log x - x + log(2 pi)/2 + sum B_{2n}/(2n(2n-1) x^{2n-1})
    Real lx = log(x.value());
    // refine: log of dd argument: log(hi) + lo/hi to second order
    Real corr = div(Real{x.lo}, Real{x.hi});
    lx = add(lx, sub(corr, mul(mul(corr, corr), 0.5)));
    Real res = mul(sub(x, Real{0.5}), lx);
    res = sub(res, x);
    res = add(res, kHalfLn2Pi);
    Real inv = div(Real{1.0}, x);
    Real inv2 = mul(inv, inv);
    Real p = inv;
    for (const auto& t : kBern) {
        res = add(res, mul(p, div(Real{t.num}, Real{t.den})));
        p = mul(p, inv2);
    }
    return res;
}

} // namespace

Real lgamma(Real x) {
    // recur up to x >= 32 where Stirling with 12 terms is ~1e-31
    Real shift{0.0};
    while (x.hi < 32.0) {
        Real lx = log(x.value());
        Real corr = div(Real{x.lo}, Real{x.hi});
        lx = add(lx, sub(corr, mul(mul(corr, corr), 0.5)));
        shift = add(shift, lx);
        x = add(x, 1.0);
    }
    return sub(stirling_lgamma(x), shift);
}

Real rgamma_positive(Real x) {
    return exp(neg(lgamma(x)));
}

} // namespace fracsource::dd
