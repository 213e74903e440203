#include "fracsource/mlf.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "fracsource/dd.hpp"

namespace fracsource::mlf {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kPoleSnap = 1e-12;

bool near_nonpositive_integer(double x, double* nearest = nullptr) {
    if (x > 0.5) return false;
    double n = std::nearbyint(x);
    if (nearest) *nearest = n;
    return n <= 0.0 && std::abs(x - n) <= kPoleSnap * std::max(1.0, std::abs(x));
}

// sin(pi x), cos(pi x) with argument reduction done on x itself.
double sinpi(double x) {
    double n = std::nearbyint(x);
    double r = x - n;
    double s = std::sin(kPi * r);
    return (static_cast<long long>(n) % 2 == 0) ? s : -s;
}

double cospi(double x) {
    double n = std::nearbyint(x);
    double r = x - n;
    double c = std::cos(kPi * r);
    return (static_cast<long long>(n) % 2 == 0) ? c : -c;
}

// Lanczos (g = 7, 9 coefficients) for complex Gamma with Re z >= 0.5.
Complex lanczos_gamma_halfplane(Complex z) {
    static const double g = 7.0;
    static const double c[9] = {
        0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
        771.32342877765313,   -176.61502916214059,   12.507343278686905,
        -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
    z -= 1.0;
    Complex x = c[0];
    for (int i = 1; i < 9; ++i) x += c[i] / (z + static_cast<double>(i));
    Complex t = z + g + 0.5;
    return std::sqrt(2.0 * kPi) * std::pow(t, z + 0.5) * std::exp(-t) * x;
}

} // namespace

double reciprocal_gamma(double x) {
    if (near_nonpositive_integer(x)) return 0.0;
    if (x > 0.5) {
        if (x < 170.0) return 1.0 / std::tgamma(x);
        return std::exp(-std::lgamma(x));
    }
    // reflection: 1/Gamma(x) = sin(pi x) Gamma(1 - x) / pi
    double y = 1.0 - x;
    double s = sinpi(x);
    if (y < 170.0) return s * std::tgamma(y) / kPi;
    // avoid overflow: 1/Gamma(x) grows; 170 bound keeps us in range for the
    // argument magnitudes this toolkit meets (|b - a k| < 130)
    return s / kPi * std::exp(std::lgamma(y));
}

Complex reciprocal_gamma(Complex x) {
    if (x.imag() == 0.0) return {reciprocal_gamma(x.real()), 0.0};
    if (x.real() >= 0.5) return 1.0 / lanczos_gamma_halfplane(x);
    // sin(pi z) via real reductions to keep accuracy at large |Re z|
    double re = x.real(), im = x.imag();
    Complex sz(sinpi(re) * std::cosh(kPi * im), cospi(re) * std::sinh(kPi * im));
    return sz * lanczos_gamma_halfplane(1.0 - x) / kPi;
}

double digamma(double x) {
    double acc = 0.0;
    while (x < 10.0) {
        acc -= 1.0 / x;
        x += 1.0;
    }
    double inv = 1.0 / x, inv2 = inv * inv;
    // asymptotic: ln x - 1/(2x) - 1/(12x^2) + 1/(120x^4) - 1/(252x^6)
    return acc + std::log(x) - 0.5 * inv - inv2 * (1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 / 252.0));
}

namespace {

// ---------------------------------------------------------------------------
// Series route, binary64. Terms are t_k = z^k k^{d} / Gamma(a k + b) (d = 0 for
// the function, and for the derivative t_k = k z^{k-1} / Gamma(a k + b)).
// The gamma argument a k + b is kept as an exact double-double split and the
// first-order digamma correction undoes the rounding of the argument; without
// it the peak terms carry psi(x)*x*eps relative noise, which dominates
// cancellation error.
// ---------------------------------------------------------------------------

Evaluation series_double(const MLParams& p, Complex z, const EvalOptions& opts, int deriv) {
    const double stop_floor = 1e-17;
    Complex sum(0.0, 0.0), comp(0.0, 0.0); // Kahan compensation
    Complex zk(1.0, 0.0);
    double running_mag = 0.0;
    double err = 0.0;
    double last_term_mag = 0.0;
    int consecutive_small = 0;

    for (int k = deriv; k <= opts.max_series_terms; ++k) {
        dd::Real xk = dd::add(dd::two_prod(p.a, static_cast<double>(k)), p.b);
        double rg;
        if (xk.hi > 0.5) {
            rg = reciprocal_gamma(xk.hi);
            rg -= rg * digamma(xk.hi) * xk.lo; // first-order argument correction
        } else {
            rg = reciprocal_gamma(xk.hi + xk.lo);
        }
        Complex term = zk * rg;
        if (deriv == 1) term *= static_cast<double>(k);

        // Kahan step
        Complex y = term - comp;
        Complex t = sum + y;
        comp = (t - sum) - y;
        sum = t;

        last_term_mag = std::abs(term);
        err += last_term_mag * (3e-16 + 1.1e-16 * static_cast<double>(k));
        running_mag = std::max(running_mag, std::abs(sum));

        if (k > deriv + 2 && last_term_mag <= stop_floor * std::max(running_mag, DBL_MIN)) {
            if (++consecutive_small >= 3) break;
        } else {
            consecutive_small = 0;
        }
        zk *= z;
        if (std::abs(zk.real()) > 1e280 || std::abs(zk.imag()) > 1e280) {
            return {sum, std::numeric_limits<double>::infinity()};
        }
        if (k == opts.max_series_terms) {
            return {sum, std::numeric_limits<double>::infinity()};
        }
    }
    err += 3.0 * last_term_mag;
    return {sum, err};
}

Evaluation series_dd(const MLParams& p, Complex z, const EvalOptions& opts, int deriv) {
    const double stop_floor = 1e-33;
    dd::Complex sum{dd::Real{0.0}, dd::Real{0.0}};
    dd::Complex zk{dd::Real{1.0}, dd::Real{0.0}};
    dd::Complex zdd{dd::Real{z.real()}, dd::Real{z.imag()}};
    double running_mag = 0.0;
    double err = 0.0;
    double last_term_mag = 0.0;
    int consecutive_small = 0;
    const int budget = opts.max_series_terms;

    for (int k = deriv; k <= budget; ++k) {
        dd::Real xk = dd::add(dd::two_prod(p.a, static_cast<double>(k)), p.b);
        dd::Real rg;
        double extra_err = 0.0;
        if (xk.hi > 0.5) {
            rg = dd::rgamma_positive(xk);
        } else {
            // small-k reflection terms: binary64 accuracy is enough here,
            // their magnitude is far below the cancellation peak
            rg = dd::Real{reciprocal_gamma(xk.hi + xk.lo)};
            extra_err = std::abs(rg.hi) * 2e-16;
        }
        dd::Complex term = dd::mul(zk, rg);
        if (deriv == 1) term = dd::mul(term, dd::Real{static_cast<double>(k)});
        sum = dd::add(sum, term);

        last_term_mag = dd::abs_estimate(term);
        err += last_term_mag * (1e-31 + 5e-32 * static_cast<double>(k)) +
               extra_err * dd::abs_estimate(zk);
        running_mag = std::max(running_mag, dd::abs_estimate(sum));

        if (k > deriv + 2 && last_term_mag <= stop_floor * std::max(running_mag, DBL_MIN)) {
            if (++consecutive_small >= 3) break;
        } else {
            consecutive_small = 0;
        }
        zk = dd::mul(zk, zdd);
        if (std::abs(zk.re.hi) > 1e280 || std::abs(zk.im.hi) > 1e280) {
            return {sum.value(), std::numeric_limits<double>::infinity()};
        }
        if (k == budget) {
            return {sum.value(), std::numeric_limits<double>::infinity()};
        }
    }
    err += 3.0 * last_term_mag;
    return {sum.value(), err};
}

// ---------------------------------------------------------------------------
// Asymptotic route for large |z|:
//   E_{a,b}(z) = (1/a) sum_m zeta_m^{1-b} e^{zeta_m} - sum_k z^{-k}/Gamma(b-ak)
// with zeta_m = |z|^{1/a} exp(i (arg z + 2 pi m)/a) over the saddles with
// |arg zeta_m| <= 3 pi/4. The algebraic part is truncated at its envelope
// minimum (capped by opts.asymptotic_terms); the envelope value bounds the
// truncation error and is reported in the estimate.
// ---------------------------------------------------------------------------

Evaluation asym_branch_impl(const MLParams& p, Complex z, const EvalOptions& opts, int deriv) {
    const double az = std::abs(z);
    if (az == 0.0) return {Complex{0, 0}, std::numeric_limits<double>::infinity()};
    const double th0 = std::arg(z);
    const double a = p.a, b = p.b;

    Complex val(0.0, 0.0);
    double err = 0.0;

    for (int m = -1; m <= 1; ++m) {
        double th = th0 + 2.0 * kPi * m;
        // saddle present while |arg zeta| <= pi; half weight exactly on the
        // Stokes line (a = 1, z < 0 hits it and must not double-count)
        double argz = std::abs(th) / a;
        double weight = 1.0;
        if (argz > kPi + 1e-9) continue;
        if (argz > kPi - 1e-9) weight = 0.5;
        double rho = std::pow(az, 1.0 / a);
        Complex zeta = std::polar(rho, th / a);
        if (zeta.real() > 690.0) return {val, std::numeric_limits<double>::infinity()};
        Complex sterm = weight * std::pow(zeta, 1.0 - b) * std::exp(zeta) / a;
        if (deriv == 1) {
            // d/dz [(1/a) zeta^{1-b} e^zeta], d(zeta)/dz = zeta/(a z)
            sterm *= ((1.0 - b) + zeta) / (a * z);
        }
        val += sterm;
        err += std::abs(sterm) * (rho + 6.0) * 1.2e-16;
    }

    // Integer (a, b): every algebraic coefficient beyond a finite prefix sits
    // on a Gamma pole, so the algebraic part is exact and the expansion is an
    // identity (E_{1,1}, E_{2,1}, E_{2,2}, ...).
    const bool integer_params = std::abs(p.a - std::nearbyint(p.a)) < kPoleSnap &&
                                std::abs(p.b - std::nearbyint(p.b)) < kPoleSnap;

    // envelope |z|^{-k} Gamma(a k + 1 - b)/pi, minimized over k
    const double laz = std::log(az);
    int k_best = 1;
    double env_best = std::numeric_limits<double>::infinity();
    int k_cap = std::max(1, opts.asymptotic_terms);
    for (int k = 1; k <= k_cap + 1; ++k) {
        double env = std::lgamma(a * k + 1.0 - b) - k * laz;
        if (env < env_best) {
            env_best = env;
            k_best = k;
        }
    }
    int k_use = std::min(k_best, k_cap);
    if (integer_params) k_use = std::min(k_cap, static_cast<int>(std::ceil(std::abs(b / a))) + 1);
    for (int k = 1; k <= k_use; ++k) {
        dd::Real xk = dd::add(dd::neg(dd::two_prod(a, static_cast<double>(k))), b);
        double rg = reciprocal_gamma(xk.hi + xk.lo);
        Complex aterm = -std::pow(z, -static_cast<double>(k)) * rg;
        if (deriv == 1) aterm *= -static_cast<double>(k) / z;
        val += aterm;
        err += std::abs(aterm) * 2e-16;
    }
    if (!integer_params) {
        // truncation: envelope at the first omitted index, with a safety
        // factor (asymptotic remainders are not bounded by the first omitted
        // term alone)
        double trunc =
            24.0 * std::exp(std::lgamma(a * (k_use + 1) + 1.0 - b) - (k_use + 1) * laz) / kPi;
        if (deriv == 1) trunc *= (k_use + 1) / az;
        err += trunc;
    }
    return {val, err};
}

bool accept(const Evaluation& e, double rel_tol) {
    double mag = std::abs(e.value);
    if (e.abs_error_estimate <= rel_tol * mag) return true;
    // value indistinguishable from zero at this branch's noise floor:
    // relative accuracy is meaningless there, report the (near) zero
    return mag <= 10.0 * e.abs_error_estimate && e.abs_error_estimate < 1e-10;
}

Evaluation eval_dispatch(const MLParams& p, Complex z, const EvalOptions& opts, int deriv) {
    if (!(p.a > 0.0)) throw ValidationError("eval_ml: order a must be positive");
    const double az = std::abs(z);

    // An accepted branch is returned as-is; `best` only serves the failure
    // diagnostics. Near zeros of E the branches disagree wildly in magnitude,
    // so mixing "best" into the accepted path would be wrong.
    Evaluation best;
    best.abs_error_estimate = std::numeric_limits<double>::infinity();
    Evaluation out;
    auto try_branch = [&](Evaluation e) {
        double rel_b = best.abs_error_estimate / std::max(std::abs(best.value), DBL_MIN);
        double rel_e = e.abs_error_estimate / std::max(std::abs(e.value), DBL_MIN);
        if (rel_e < rel_b) best = e;
        if (accept(e, opts.rel_tol)) {
            out = e;
            return true;
        }
        return false;
    };

    if (az >= opts.crossover_radius) {
        if (try_branch(asym_branch_impl(p, z, opts, deriv))) return out;
        if (try_branch(series_double(p, z, opts, deriv))) return out;
        if (try_branch(series_dd(p, z, opts, deriv))) return out;
    } else {
        if (try_branch(series_double(p, z, opts, deriv))) return out;
        if (try_branch(series_dd(p, z, opts, deriv))) return out;
        if (try_branch(asym_branch_impl(p, z, opts, deriv))) return out;
    }
    return best; // caller decides whether to throw
}

Complex eval_checked(const MLParams& p, Complex z, const EvalOptions& opts, int deriv) {
    Evaluation e = eval_dispatch(p, z, opts, deriv);
    if (!accept(e, opts.rel_tol)) {
        std::ostringstream os;
        os << "eval_ml" << (deriv ? "_derivative" : "") << ": no branch reached rel_tol="
           << opts.rel_tol << " at a=" << p.a << " b=" << p.b << " z=(" << z.real() << ","
           << z.imag() << "); best estimate " << e.abs_error_estimate << " on |value| "
           << std::abs(e.value) << " (intermediate-zone gap)";
        throw NonConvergent(os.str());
    }
    return e.value;
}

} // namespace

namespace detail {

Evaluation series_branch(const MLParams& p, Complex z, const EvalOptions& opts, int deriv) {
    Evaluation e = series_double(p, z, opts, deriv);
    if (accept(e, opts.rel_tol)) return e;
    Evaluation e2 = series_dd(p, z, opts, deriv);
    double rel1 = e.abs_error_estimate / std::max(std::abs(e.value), DBL_MIN);
    double rel2 = e2.abs_error_estimate / std::max(std::abs(e2.value), DBL_MIN);
    return rel2 < rel1 ? e2 : e;
}

Evaluation asymptotic_branch(const MLParams& p, Complex z, const EvalOptions& opts, int deriv) {
    return asym_branch_impl(p, z, opts, deriv);
}

} // namespace detail

Complex eval_ml(const MLParams& p, Complex z, const EvalOptions& opts) {
    return eval_checked(p, z, opts, 0);
}

Complex eval_ml_derivative(const MLParams& p, Complex z, const EvalOptions& opts) {
    return eval_checked(p, z, opts, 1);
}

Evaluation eval_ml_estimated(const MLParams& p, Complex z, const EvalOptions& opts) {
    return eval_dispatch(p, z, opts, 0);
}

Evaluation eval_ml_derivative_estimated(const MLParams& p, Complex z, const EvalOptions& opts) {
    return eval_dispatch(p, z, opts, 1);
}

double effective_crossover(const MLParams& p, const EvalOptions& opts, double target_rel) {
    double r = std::max(opts.crossover_radius, 4.0);
    for (int i = 0; i < 200; ++i) {
        bool ok = true;
        for (double frac : {1.0, 0.85, 0.55 * p.a + 0.02}) {
            Complex z = std::polar(r, frac * kPi);
            Evaluation e = detail::asymptotic_branch(p, z, opts);
            if (e.abs_error_estimate > 0.25 * target_rel * std::abs(e.value)) {
                ok = false;
                break;
            }
        }
        if (ok) return r;
        r *= 1.08;
    }
    throw NonConvergent("effective_crossover: asymptotic branch never certified the target");
}

double series_ceiling(const MLParams& p, const EvalOptions& opts, double target_rel, double from) {
    double r = std::max(from, 4.0);
    double last_good = 0.0;
    for (int i = 0; i < 200; ++i) {
        bool ok = true;
        for (double frac : {1.0, 0.85}) {
            Complex z = std::polar(r, frac * kPi);
            Evaluation e = detail::series_branch(p, z, opts);
            if (e.abs_error_estimate > 0.25 * target_rel * std::abs(e.value)) {
                ok = false;
                break;
            }
        }
        if (!ok) break;
        last_good = r;
        r *= 1.08;
    }
    if (last_good == 0.0) {
        throw NonConvergent("series_ceiling: series branch failed already at the starting radius");
    }
    return last_good;
}

} // namespace fracsource::mlf
