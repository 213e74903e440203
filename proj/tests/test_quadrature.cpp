#include <doctest.h>

#include <cmath>
#include <complex>

#include "fracsource/quadrature.hpp"

using namespace fracsource;
using std::complex;

TEST_CASE("gauss rule integrates polynomials exactly") {
    const auto& rule = quad::gauss_legendre(8);
    // degree 15 polynomial x^15 over [-1,1] -> 0; x^14 -> 2/15
    double s15 = 0, s14 = 0;
    for (size_t i = 0; i < rule.nodes.size(); ++i) {
        s15 += rule.weights[i] * std::pow(rule.nodes[i], 15);
        s14 += rule.weights[i] * std::pow(rule.nodes[i], 14);
    }
    CHECK(std::abs(s15) < 1e-15);
    CHECK(s14 == doctest::Approx(2.0 / 15.0).epsilon(1e-13));
}

TEST_CASE("composite gauss on a smooth function") {
    auto f = [](double x) { return complex<double>(std::exp(-x * x), 0.0); };
    auto v = quad::composite_gauss(f, 0.0, 2.0, 8);
    CHECK(v.real() == doctest::Approx(0.8820813907624215).epsilon(1e-12)); // sqrt(pi)/2 erf(2)
}

TEST_CASE("graded quadrature resolves endpoint power weights") {
    // int_0^1 x^0.3 (1-x)^0.5 dx = B(1.3, 1.5)
    auto f = [](double x) {
        return complex<double>(std::pow(x, 0.3) * std::pow(1.0 - x, 0.5), 0.0);
    };
    auto v = quad::graded_integrate_01(f, 1e-12);
    CHECK(v.real() == doctest::Approx(0.47442115499605956853).epsilon(1e-10));
}

TEST_CASE("graded quadrature throws when refinement is exhausted") {
    // a genuinely rough integrand at an interior point defeats the graded mesh
    auto f = [](double x) {
        return complex<double>(x < 0.377 ? std::sin(1.0 / (x - 0.377)) : 1.0, 0.0);
    };
    CHECK_THROWS_AS((void)quad::graded_integrate_01(f, 1e-13, 3.0, 8, 4),
                    fracsource::QuadratureFailure);
}

TEST_CASE("product integration of power-weighted integrals") {
    // int_0^t tau^(alpha-1) dtau = t^alpha/alpha
    auto one = [](double) { return complex<double>(1.0, 0.0); };
    for (double alpha : {1.2, 1.5, 2.0}) {
        for (double t : {0.3, 1.0}) {
            auto v = quad::power_weighted_integral(alpha - 1.0, t, one, 1e-12);
            CHECK(v.real() == doctest::Approx(std::pow(t, alpha) / alpha).epsilon(1e-11));
        }
    }
    // int_0^1 tau^0.5 e^tau dtau
    auto expf = [](double t) { return complex<double>(std::exp(t), 0.0); };
    auto v1 = quad::power_weighted_integral(0.5, 1.0, expf, 1e-9);
    CHECK(v1.real() == doctest::Approx(1.2556300825518636266).epsilon(5e-9));
    // negative exponent: int_0^0.7 tau^(-0.3) cos(3 tau) dtau
    auto cf = [](double t) { return complex<double>(std::cos(3.0 * t), 0.0); };
    auto v2 = quad::power_weighted_integral(-0.3, 0.7, cf, 1e-9);
    CHECK(v2.real() == doctest::Approx(0.59798338505081964375).epsilon(5e-9));
    // t = 0 gives zero
    auto v0 = quad::power_weighted_integral(0.5, 0.0, expf, 1e-11);
    CHECK(std::abs(v0) == 0.0);
}
