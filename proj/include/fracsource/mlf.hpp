#pragma once

#include <complex>

#include "fracsource/errors.hpp"

namespace fracsource::mlf {

using Complex = std::complex<double>;

// Two-parameter Mittag-Leffler indices. a is the series order (alpha or beta
// of the application), b the second index; b may be nonpositive transiently
// inside asymptotic terms.
struct MLParams {
    double a = 1.0;
    double b = 1.0;
};

struct EvalOptions {
    double rel_tol = 1e-12;
    int max_series_terms = 2000;
    int asymptotic_terms = 10;      // algebraic terms kept in the large-|z| expansion
    double crossover_radius = 12.0; // |z| above which the asymptotic branch is tried first
};

// Value plus a running absolute error estimate. The estimate accounts for
// term rounding, summation cancellation, and truncation; branch selection and
// the public tolerance contract are driven by it.
struct Evaluation {
    Complex value{0.0, 0.0};
    double abs_error_estimate = 0.0;
};

// 1/Gamma(x). Exactly zero at nonpositive integers (snap tolerance
// 1e-12 relative, matching the double rounding of b - a k arguments).
double reciprocal_gamma(double x);
Complex reciprocal_gamma(Complex x);

// Digamma for x > 0 (used to correct argument rounding in series terms).
double digamma(double x);

// E_{a,b}(z). Throws NonConvergent when no branch reaches rel_tol.
Complex eval_ml(const MLParams& p, Complex z, const EvalOptions& opts = {});

// d/dz E_{a,b}(z) = sum_{k>=1} k z^{k-1} / Gamma(a k + b).
Complex eval_ml_derivative(const MLParams& p, Complex z, const EvalOptions& opts = {});

// Accuracy-tagged variants; never throw. Newton iterations and quadratures
// use these and apply their own tolerance policy.
Evaluation eval_ml_estimated(const MLParams& p, Complex z, const EvalOptions& opts = {});
Evaluation eval_ml_derivative_estimated(const MLParams& p, Complex z, const EvalOptions& opts = {});

namespace detail {

// The two independent evaluation routes, exposed for cross-checking. The
// series route escalates from binary64 to double-double when cancellation
// demands it; the asymptotic route is the large-|z| expansion with its
// exponentially small saddle terms retained.
Evaluation series_branch(const MLParams& p, Complex z, const EvalOptions& opts, int deriv_order = 0);
Evaluation asymptotic_branch(const MLParams& p, Complex z, const EvalOptions& opts, int deriv_order = 0);

} // namespace detail

// Smallest radius r >= opts.crossover_radius at which the asymptotic branch
// self-certifies relative accuracy target_rel on the worst ray arg z = pi.
// The series/asymptotic overlap annulus is where both routes are accurate
// simultaneously; it depends strongly on a.
double effective_crossover(const MLParams& p, const EvalOptions& opts, double target_rel);

// Largest radius (scanning up from `from`) at which the series branch still
// self-certifies target_rel on the worst ray. Above it cancellation exceeds
// even the double-double accumulator.
double series_ceiling(const MLParams& p, const EvalOptions& opts, double target_rel, double from);

} // namespace fracsource::mlf
