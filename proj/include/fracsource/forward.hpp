#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "fracsource/mesh.hpp"
#include "fracsource/spectral.hpp"

namespace fracsource::forward {

using Complex = std::complex<double>;
using TimeFunction = std::function<double(double)>;
using SpaceFunction = std::function<double(double)>;

// Problem data for the initial-boundary value problem: Caputo order alpha in
// time, Riemann-Liouville order beta in space, separable right-hand side
// intensity(t) * source(x), zero initial and boundary data.
struct ProblemSpec {
    double alpha = 1.5;
    double beta = 1.5;
    double T = 1.0;
    TimeFunction intensity;
    SpaceFunction source;

    // intensity(0) != 0 is a hypothesis of the reconstruction operator, not
    // of the forward solve; build_time_convolution enforces it.
    void validate() const {
        if (!(alpha > 1.0 && alpha <= 2.0)) throw ValidationError("ProblemSpec: alpha outside (1,2]");
        if (!(beta > 1.0 && beta <= 2.0)) throw ValidationError("ProblemSpec: beta outside (1,2]");
        if (!(T > 0.0)) throw ValidationError("ProblemSpec: T must be positive");
        if (!intensity) throw ValidationError("ProblemSpec: intensity not set");
    }
};

enum class Route { spectral, discrete };

struct ForwardSolution {
    // values(k, i) = u(x_i, t_k); includes boundary columns i = 0 and i = N
    Eigen::MatrixXd values;
    Route route = Route::discrete;
    mesh::SpatialMesh space;
    mesh::TimeGrid time;
    int n_modes = 0;               // spectral route only
    double imag_residue = 0.0;     // spectral route: |Im| infinity norm / field norm
    double last_band_fraction = 0.0; // spectral route: magnitude of the final mode band
};

struct ObservationTrace {
    std::vector<double> samples; // phi(t_k) = u_x(1, t_k)
    mesh::TimeGrid grid;
    std::string provenance = "clean"; // or "noisy(delta=...,seed=...)"

    double l2() const {
        double acc = 0.0;
        for (double v : samples) acc += v * v;
        return std::sqrt(acc * grid.tau);
    }
};

// One-mode Duhamel convolution
//   int_0^t intensity(t - s) s^{alpha-1} E_{alpha,alpha}(lambda s^alpha) ds
// via product integration that treats the s^{alpha-1} factor exactly.
Complex duhamel_coefficient(double alpha, Complex lambda, const TimeFunction& intensity, double t,
                            double quad_tol = 1e-9);

// Eigenfunction-series solution of the forward problem.
ForwardSolution solve_spectral(const ProblemSpec& spec, const spectral::EigenSystem& system,
                               int n_modes, const mesh::SpatialMesh& space,
                               const mesh::TimeGrid& time);

// Flux trace u_x(1, t_k) from modal coefficients, using the boundary factor
// E_{beta,beta-1}(lambda_n).
ObservationTrace observe_flux_spectral(const ProblemSpec& spec,
                                       const spectral::EigenSystem& system,
                                       const std::vector<Complex>& modal_coeffs,
                                       const mesh::TimeGrid& time);

// Piecewise-linear FEM operators for D_x^beta on the graded mesh: the
// fractional stiffness S_{ij} = -int (I^{2-beta} phi_j')(x) phi_i'(x) dx and
// the tridiagonal mass matrix, both over interior hat functions.
struct FemOperators {
    Eigen::MatrixXd stiffness;
    Eigen::MatrixXd mass;
};

FemOperators assemble_fractional_stiffness(double beta, const mesh::SpatialMesh& space);

// Convolution-quadrature time marching of the semidiscrete system
// (w0 tau^-a M - S) u^k = M intensity(t_k) f - tau^-a M sum_{j>=1} w_j u^{k-j}.
ForwardSolution time_march_discrete(const ProblemSpec& spec, const FemOperators& ops,
                                    const mesh::SpatialMesh& space, const mesh::TimeGrid& time,
                                    const Eigen::VectorXd& f_nodal);

// March several sources at once (shared factorization); returns one solution
// per column of f_nodal.
std::vector<ForwardSolution> time_march_discrete_multi(const ProblemSpec& spec,
                                                       const FemOperators& ops,
                                                       const mesh::SpatialMesh& space,
                                                       const mesh::TimeGrid& time,
                                                       const Eigen::MatrixXd& f_nodal_columns);

// Exact derivative of the piecewise-linear discrete solution on the last
// cell: phi(t_k) = (u_N - u_{N-1})/(x_N - x_{N-1}) = -u_{N-1}/h_N.
ObservationTrace observe_flux_discrete(const ForwardSolution& sol);

// Grunwald-Letnikov convolution-quadrature weights w_j = (-1)^j binom(alpha, j).
std::vector<double> gl_weights(double alpha, int count);

// Sample a spatial function at the mesh nodes (interior only).
Eigen::VectorXd sample_interior(const SpaceFunction& f, const mesh::SpatialMesh& space);

} // namespace fracsource::forward
