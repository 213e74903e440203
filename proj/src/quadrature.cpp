#include "fracsource/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace fracsource::quad {

namespace {

GaussRule build_rule(int n) {
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        // Chebyshev initial guess, Newton on P_n
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            double dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        double dp = n * (x * p1 - p0) / (x * x - 1.0);
        rule.nodes[i] = x;
        rule.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return rule;
}

} // namespace

const GaussRule& gauss_legendre(int order) {
    static std::map<int, GaussRule> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(order);
    if (it == cache.end()) it = cache.emplace(order, build_rule(order)).first;
    return it->second;
}

std::complex<double> composite_gauss(const std::function<std::complex<double>(double)>& f,
                                     double a, double b, int cells, int order) {
    const GaussRule& rule = gauss_legendre(order);
    std::complex<double> acc{0.0, 0.0};
    double h = (b - a) / cells;
    for (int c = 0; c < cells; ++c) {
        double lo = a + c * h;
        double mid = lo + 0.5 * h;
        for (size_t i = 0; i < rule.nodes.size(); ++i) {
            acc += rule.weights[i] * f(mid + 0.5 * h * rule.nodes[i]);
        }
    }
    return acc * (0.5 * h);
}

namespace {

std::complex<double> graded_pass(const std::function<std::complex<double>(double)>& f,
                                 double grading, int cells_per_side) {
    const GaussRule& rule = gauss_legendre(12);
    std::complex<double> acc{0.0, 0.0};
    auto add_cell = [&](double lo, double hi) {
        double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
        std::complex<double> cell{0.0, 0.0};
        for (size_t i = 0; i < rule.nodes.size(); ++i) {
            cell += rule.weights[i] * f(mid + half * rule.nodes[i]);
        }
        acc += cell * half;
    };
    for (int j = 0; j < cells_per_side; ++j) {
        double s0 = static_cast<double>(j) / cells_per_side;
        double s1 = static_cast<double>(j + 1) / cells_per_side;
        double x0 = 0.5 * std::pow(s0, grading);
        double x1 = 0.5 * std::pow(s1, grading);
        add_cell(x0, x1);                 // left half, graded toward 0
        add_cell(1.0 - x1, 1.0 - x0);     // mirrored right half, graded toward 1
    }
    return acc;
}

} // namespace

std::complex<double> graded_integrate_01(const std::function<std::complex<double>(double)>& f,
                                         double abs_tol, double grading, int initial_cells,
                                         int max_levels) {
    int cells = initial_cells;
    std::complex<double> prev = graded_pass(f, grading, cells);
    for (int level = 0; level < max_levels; ++level) {
        cells *= 2;
        std::complex<double> cur = graded_pass(f, grading, cells);
        if (std::abs(cur - prev) < abs_tol) return cur;
        prev = cur;
    }
    throw QuadratureFailure("graded_integrate_01: refinement exhausted before reaching tolerance");
}

namespace {

std::complex<double> product_pass(double mu, double t,
                                  const std::function<std::complex<double>(double)>& H,
                                  int cells, double grading) {
    // nodes tau_j = t (j/m)^g; exact integrals of tau^mu and tau^(mu+1)
    std::vector<double> tau(cells + 1);
    std::vector<std::complex<double>> h(cells + 1);
    for (int j = 0; j <= cells; ++j) {
        tau[j] = t * std::pow(static_cast<double>(j) / cells, grading);
        h[j] = H(tau[j]);
    }
    std::complex<double> acc{0.0, 0.0};
    for (int j = 0; j < cells; ++j) {
        double t0 = tau[j], t1 = tau[j + 1];
        if (t1 == t0) continue;
        double p0a = std::pow(t0, mu + 1.0), p1a = std::pow(t1, mu + 1.0);
        double p0b = std::pow(t0, mu + 2.0), p1b = std::pow(t1, mu + 2.0);
        double I0 = (p1a - p0a) / (mu + 1.0);       // int tau^mu
        double I1 = (p1b - p0b) / (mu + 2.0);       // int tau^(mu+1)
        std::complex<double> slope = (h[j + 1] - h[j]) / (t1 - t0);
        acc += h[j] * I0 + slope * (I1 - t0 * I0);
    }
    return acc;
}

} // namespace

std::complex<double> power_weighted_integral(double mu, double t,
                                             const std::function<std::complex<double>(double)>& H,
                                             double rel_tol, int initial_cells, int max_levels,
                                             double grading) {
    if (t == 0.0) return {0.0, 0.0};
    int cells = initial_cells;
    std::complex<double> prev = product_pass(mu, t, H, cells, grading);
    for (int level = 0; level < max_levels; ++level) {
        cells *= 2;
        std::complex<double> cur = product_pass(mu, t, H, cells, grading);
        double scale = std::max({std::abs(cur), std::abs(prev), 1e-300});
        if (std::abs(cur - prev) <= rel_tol * scale) return cur;
        prev = cur;
    }
    throw QuadratureFailure("power_weighted_integral: refinement exhausted");
}

} // namespace fracsource::quad
