#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "fracsource/mlf.hpp"
#include "fracsource/spectral.hpp"
#include "ml_reference.hpp"

using namespace fracsource;
using spectral::Complex;

namespace {

mlf::EvalOptions oracle_opts() {
    mlf::EvalOptions o;
    o.rel_tol = 1e-11;
    o.max_series_terms = 4000;
    o.asymptotic_terms = 40;
    return o;
}

// Independent brute-force oracle: winding-number bisection of E_{b,b} over a
// complex rectangle, refined until the box is 1e-10 wide. Uses only eval_ml.
Complex winding_bisect_zero(double beta, double x0, double x1, double y0, double y1) {
    auto opts = oracle_opts();
    auto E = [&](Complex z) { return mlf::eval_ml({beta, beta}, z, opts); };
    auto winding = [&](double a, double b, double c, double d) {
        const int m = 48;
        std::vector<Complex> pts;
        for (int i = 0; i < m; ++i) pts.push_back({a + (b - a) * i / m, c});
        for (int i = 0; i < m; ++i) pts.push_back({b, c + (d - c) * i / m});
        for (int i = 0; i < m; ++i) pts.push_back({b - (b - a) * i / m, d});
        for (int i = 0; i < m; ++i) pts.push_back({a, d - (d - c) * i / m});
        pts.push_back(pts.front());
        double total = 0.0, prev = std::arg(E(pts[0]));
        for (size_t i = 1; i < pts.size(); ++i) {
            double cur = std::arg(E(pts[i]));
            double dd = cur - prev;
            while (dd > M_PI) dd -= 2.0 * M_PI;
            while (dd < -M_PI) dd += 2.0 * M_PI;
            total += dd;
            prev = cur;
        }
        return static_cast<int>(std::lround(total / (2.0 * M_PI)));
    };
    REQUIRE(winding(x0, x1, y0, y1) == 1);
    while (x1 - x0 > 1e-10 || y1 - y0 > 1e-10) {
        if (x1 - x0 >= y1 - y0) {
            double xm = 0.5 * (x0 + x1) + 1.7e-4 * (x1 - x0); // off-center split
            if (winding(x0, xm, y0, y1) == 1) {
                x1 = xm;
            } else {
                x0 = xm;
            }
        } else {
            double ym = 0.5 * (y0 + y1) + 1.7e-4 * (y1 - y0);
            if (winding(x0, x1, y0, ym) == 1) {
                y1 = ym;
            } else {
                y0 = ym;
            }
        }
    }
    return {0.5 * (x0 + x1), 0.5 * (y0 + y1)};
}

} // namespace

TEST_CASE("classical limit beta = 2: lambda_n = -n^2 pi^2") {
    auto sys = spectral::find_eigenvalues(2.0, 10);
    for (int n = 1; n <= 10; ++n) {
        const auto& p = sys.pair(n);
        double expected = -(n * M_PI) * (n * M_PI);
        CHECK(std::abs(p.lambda - Complex(expected, 0)) <= 1e-8 * std::abs(expected));
        CHECK(p.is_real);
        // pairing (-1)^{n+1} / (2 n^2 pi^2)
        double pairing = (n % 2 == 1 ? 1.0 : -1.0) / (2.0 * n * n * M_PI * M_PI);
        CHECK(p.pairing.real() == doctest::Approx(pairing).epsilon(1e-9));
        CHECK(std::abs(p.pairing.imag()) < 1e-14);
    }
    // X_1(0.5) = sin(pi/2)/pi
    Complex x1 = spectral::eval_eigenfunction(sys, 1, spectral::Kind::primal, 0.5);
    CHECK(x1.real() == doctest::Approx(1.0 / M_PI).epsilon(1e-10));
    CHECK(std::abs(x1.imag()) < 1e-12);
}

TEST_CASE("eigenvalues match the frozen high-precision census") {
    for (double beta : {1.3, 1.5, 1.7}) {
        int count = 0;
        for (const auto& z : mlref::kZeros) {
            if (z.beta == beta) count = std::max(count, z.n);
        }
        auto sys = spectral::find_eigenvalues(beta, count);
        for (const auto& z : mlref::kZeros) {
            if (z.beta != beta) continue;
            const auto& p = sys.pair(z.n);
            CAPTURE(beta);
            CAPTURE(z.n);
            CHECK(std::abs(p.lambda - z.lambda) <= 1e-8 * std::abs(z.lambda));
            CHECK(p.is_real == z.is_real);
        }
    }
}

TEST_CASE("lambda_1 for beta = 1.5 against the winding-bisection oracle") {
    Complex oracle = winding_bisect_zero(1.5, -7.0, -3.5, -1.0, 1.0);
    auto sys = spectral::find_eigenvalues(1.5, 1);
    CHECK(std::abs(sys.pair(1).lambda - oracle) < 2e-9);
}

TEST_CASE("eigenpair invariants: sector, ordering, residuals") {
    for (double beta : {1.3, 1.5, 1.7}) {
        auto sys = spectral::find_eigenvalues(beta, 12);
        double prev = 0.0;
        for (int n = 1; n <= 12; ++n) {
            const auto& p = sys.pair(n);
            CHECK(p.residual <= sys.zero_tol);
            CHECK(std::abs(std::arg(p.lambda)) > beta * M_PI / 2.0);
            CHECK(std::abs(p.lambda) > prev);
            prev = std::abs(p.lambda);
            CHECK(std::abs(p.deriv_at_lambda) > sys.zero_tol);
        }
    }
}

TEST_CASE("eigenfunctions vanish at their Dirichlet endpoints") {
    auto sys = spectral::find_eigenvalues(1.5, 6);
    for (int n = 1; n <= 6; ++n) {
        CHECK(std::abs(spectral::eval_eigenfunction(sys, n, spectral::Kind::primal, 1.0)) < 1e-9);
        CHECK(std::abs(spectral::eval_eigenfunction(sys, n, spectral::Kind::adjoint, 0.0)) < 1e-9);
        CHECK(std::abs(spectral::eval_eigenfunction(sys, n, spectral::Kind::primal, 0.0)) == 0.0);
        // reflection identity Y_n(x) = conj(X_n(1-x))
        for (double x : {0.2, 0.55, 0.9}) {
            Complex y = spectral::eval_eigenfunction(sys, n, spectral::Kind::adjoint, x);
            Complex xr = spectral::eval_eigenfunction(sys, n, spectral::Kind::primal, 1.0 - x);
            CHECK(std::abs(y - std::conj(xr)) < 1e-11);
        }
    }
}

TEST_CASE("pairing: closed form vs quadrature") {
    for (double beta : {1.3, 1.5}) {
        auto sys = spectral::find_eigenvalues(beta, 6);
        for (int n = 1; n <= 6; ++n) {
            Complex cf = spectral::mode_pairing(sys, n, spectral::PairingMethod::closed_form);
            Complex qd = spectral::mode_pairing(sys, n, spectral::PairingMethod::quadrature);
            CAPTURE(beta);
            CAPTURE(n);
            CHECK(std::abs(cf - qd) <= 1e-6 * std::abs(cf));
        }
    }
}

TEST_CASE("bi-orthogonality of cross pairings") {
    auto sys = spectral::find_eigenvalues(1.5, 6);
    for (int n : {1, 2, 3, 6}) {
        for (int m : {1, 2, 3, 6}) {
            if (m == n) continue;
            CAPTURE(n);
            CAPTURE(m);
            CHECK(std::abs(spectral::cross_pairing(sys, n, m)) < 1e-8);
        }
    }
    // conjugate modes are distinct modes too (mode 6 is complex)
    CHECK(std::abs(spectral::cross_pairing(sys, 6, -6)) < 1e-8);
}

TEST_CASE("project_source: zero, single-mode round trips, classical series") {
    auto sys15 = spectral::find_eigenvalues(1.5, 8);

    auto c0 = spectral::project_source(sys15, [](double) { return 0.0; }, 8);
    for (const auto& c : c0) CHECK(std::abs(c) < 1e-12);

    // real mode: f = X_1 (lambda_1 is real for beta = 1.5) -> f_1 = 1, rest 0
    auto f_mode1 = [&](double x) {
        return spectral::eval_eigenfunction(sys15, 1, spectral::Kind::primal, x).real();
    };
    auto c1 = spectral::project_source(sys15, f_mode1, 8);
    CHECK(std::abs(c1[0] - Complex(1.0, 0.0)) < 1e-6);
    for (int n = 2; n <= 8; ++n) CHECK(std::abs(c1[static_cast<size_t>(n) - 1]) < 1e-6);

    // complex pair: f = X_6 + conj(X_6) = 2 Re X_6 -> f_6 = 1
    auto f_mode6 = [&](double x) {
        return 2.0 * spectral::eval_eigenfunction(sys15, 6, spectral::Kind::primal, x).real();
    };
    auto c6 = spectral::project_source(sys15, f_mode6, 8);
    CHECK(std::abs(c6[5] - Complex(1.0, 0.0)) < 1e-6);
    for (int n : {1, 2, 3, 4, 5, 7, 8}) CHECK(std::abs(c6[static_cast<size_t>(n) - 1]) < 1e-6);

    // beta = 2: f = x(1-x) has f_n = n pi b_n with b_n the sine coefficients
    auto sys2 = spectral::find_eigenvalues(2.0, 6);
    auto c2 = spectral::project_source(sys2, [](double x) { return x * (1.0 - x); }, 6);
    for (int n = 1; n <= 6; ++n) {
        double bn = 4.0 * (1.0 - std::pow(-1.0, n)) / std::pow(n * M_PI, 3);
        double expected = n * M_PI * bn;
        CHECK(std::abs(c2[static_cast<size_t>(n) - 1] - Complex(expected, 0)) < 1e-8);
    }
}

TEST_CASE("modal expansion converges to the source in L2") {
    auto sys = spectral::find_eigenvalues(1.5, 14);
    auto f = [](double x) { return x * (1.0 - x); };
    auto coeffs = spectral::project_source(sys, f, 14);
    auto l2err = [&](int nm) {
        std::vector<Complex> head(coeffs.begin(), coeffs.begin() + nm);
        double acc = 0.0;
        const int samples = 400;
        for (int i = 1; i < samples; ++i) {
            double x = static_cast<double>(i) / samples;
            double d = spectral::expand_modes(sys, head, x) - f(x);
            acc += d * d / samples;
        }
        return std::sqrt(acc);
    };
    double e4 = l2err(4), e8 = l2err(8), e14 = l2err(14);
    CHECK(e8 < e4);
    CHECK(e14 < e8);
    CHECK(e14 < 2e-3);
}

TEST_CASE("eigensystem JSON round trip") {
    auto sys = spectral::find_eigenvalues(1.5, 5);
    auto text = sys.to_json();
    auto back = spectral::EigenSystem::from_json(text);
    CHECK(back.beta == sys.beta);
    CHECK(back.zero_tol == sys.zero_tol);
    REQUIRE(back.size() == sys.size());
    for (int n = 1; n <= 5; ++n) {
        CHECK(back.pair(n).lambda == sys.pair(n).lambda);
        CHECK(back.pair(n).pairing == sys.pair(n).pairing);
        CHECK(back.pair(n).is_real == sys.pair(n).is_real);
    }
    CHECK_THROWS_AS((void)spectral::EigenSystem::from_json("{not json"), fracsource::ParseError);
}

TEST_CASE("invalid inputs are rejected") {
    CHECK_THROWS_AS((void)spectral::find_eigenvalues(0.9, 3), fracsource::ValidationError);
    CHECK_THROWS_AS((void)spectral::find_eigenvalues(1.5, 0), fracsource::ValidationError);
    auto sys = spectral::find_eigenvalues(1.5, 2);
    CHECK_THROWS_AS((void)sys.pair(3), fracsource::ValidationError);
    CHECK_THROWS_AS((void)spectral::eval_eigenfunction(sys, 1, spectral::Kind::primal, 1.5),
                    fracsource::ValidationError);
}
