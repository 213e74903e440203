#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "fracsource/errors.hpp"

namespace fracsource::quad {

// Gauss-Legendre rule on [-1, 1]; nodes computed once per order by Newton on
// the Legendre recurrence.
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

const GaussRule& gauss_legendre(int order);

// Composite Gauss integration of f over [a, b] on m uniform cells.
std::complex<double> composite_gauss(const std::function<std::complex<double>(double)>& f,
                                     double a, double b, int cells, int order = 16);

// Integral over [0, 1] on a mesh graded toward both endpoints with the given
// exponent (cell boundaries 1/2 (j/m)^g from the left, mirrored from the
// right). Cell count doubles until two successive estimates differ by less
// than abs_tol; throws QuadratureFailure when the level budget is exhausted.
std::complex<double> graded_integrate_01(const std::function<std::complex<double>(double)>& f,
                                         double abs_tol, double grading = 3.0,
                                         int initial_cells = 8, int max_levels = 14);

// Product integration of int_0^t tau^(mu) H(tau) dtau with mu > -1 and H
// smooth: H is interpolated piecewise-linearly on a sub-grid graded toward
// tau = 0 and the power factor is integrated exactly. Doubles the grid until
// the relative change drops below rel_tol.
std::complex<double> power_weighted_integral(double mu, double t,
                                             const std::function<std::complex<double>(double)>& H,
                                             double rel_tol, int initial_cells = 32,
                                             int max_levels = 12, double grading = 3.0);

} // namespace fracsource::quad
