#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

namespace fracsource::dd {

// Double-double arithmetic: an unevaluated sum hi + lo with |lo| <= ulp(hi)/2,
// giving roughly 106 bits of significand. Used by the Mittag-Leffler series
// branch where term cancellation exceeds what binary64 can absorb, and by the
// extended-precision log-gamma that feeds it.

struct Real {
    double hi = 0.0;
    double lo = 0.0;

    Real() = default;
    constexpr Real(double h) : hi(h), lo(0.0) {}
    constexpr Real(double h, double l) : hi(h), lo(l) {}

    double value() const { return hi + lo; }
};

inline Real two_sum(double a, double b) {
    double s = a + b;
    double bb = s - a;
    double err = (a - (s - bb)) + (b - bb);
    return {s, err};
}

inline Real quick_two_sum(double a, double b) {
    // requires |a| >= |b|
    double s = a + b;
    return {s, b - (s - a)};
}

inline Real two_prod(double a, double b) {
    double p = a * b;
    return {p, std::fma(a, b, -p)};
}

inline Real add(Real a, Real b) {
    Real s = two_sum(a.hi, b.hi);
    double lo = s.lo + a.lo + b.lo;
    return quick_two_sum(s.hi, lo);
}

inline Real add(Real a, double b) {
    Real s = two_sum(a.hi, b);
    return quick_two_sum(s.hi, s.lo + a.lo);
}

inline Real sub(Real a, Real b) { return add(a, Real{-b.hi, -b.lo}); }
inline Real neg(Real a) { return {-a.hi, -a.lo}; }

inline Real mul(Real a, Real b) {
    Real p = two_prod(a.hi, b.hi);
    double lo = p.lo + a.hi * b.lo + a.lo * b.hi;
    return quick_two_sum(p.hi, lo);
}

inline Real mul(Real a, double b) {
    Real p = two_prod(a.hi, b);
    return quick_two_sum(p.hi, p.lo + a.lo * b);
}

inline Real div(Real a, Real b) {
    double q1 = a.hi / b.hi;
    Real r = sub(a, mul(b, q1));
    double q2 = r.hi / b.hi;
    r = sub(r, mul(b, q2));
    double q3 = r.hi / b.hi;
    Real q = quick_two_sum(q1, q2);
    return add(q, q3);
}

inline Real div(double a, double b) { return div(Real{a}, Real{b}); }

inline bool less(Real a, Real b) { return a.hi < b.hi || (a.hi == b.hi && a.lo < b.lo); }

// exp(a) for |a.hi| up to ~700, accurate to ~2^-100 relative.
Real exp(Real a);

// log(x) for x > 0 (double input is exact), accurate to ~2^-100 relative.
Real log(double x);

// log Gamma(x) for x > 0. Stirling with Bernoulli correction for x >= 32,
// upward recursion below. Absolute accuracy ~1e-30 for x in [1e-2, 1e4].
Real lgamma(Real x);

// 1/Gamma(x) for x > 0.
Real rgamma_positive(Real x);

// Complex double-double, componentwise.
struct Complex {
    Real re, im;

    Complex() = default;
    Complex(Real r, Real i) : re(r), im(i) {}
    Complex(double r, double i = 0.0) : re(r), im(i) {}

    std::complex<double> value() const { return {re.value(), im.value()}; }
};

inline Complex add(Complex a, Complex b) { return {add(a.re, b.re), add(a.im, b.im)}; }
inline Complex mul(Complex a, Complex b) {
    return {sub(mul(a.re, b.re), mul(a.im, b.im)),
            add(mul(a.re, b.im), mul(a.im, b.re))};
}
inline Complex mul(Complex a, Real s) { return {mul(a.re, s), mul(a.im, s)}; }
inline double abs_estimate(Complex a) { return std::hypot(a.re.hi, a.im.hi); }

inline constexpr Real kLn2{0.6931471805599453, 2.3190468138462996e-17};
inline constexpr Real kHalfLn2Pi{0.9189385332046728, -3.8782941580672414e-17};

} // namespace fracsource::dd
