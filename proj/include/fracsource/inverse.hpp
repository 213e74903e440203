#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fracsource/forward.hpp"

namespace fracsource::inverse {

using Complex = std::complex<double>;

// Discrete observation operator: column j is the flux trace generated by the
// j-th interior nodal hat source, so A f^h approximates the observed data of
// the source with nodal values f^h.
struct ForwardMap {
    Eigen::MatrixXd A; // (n_steps+1) x (N-1), dense
    mesh::SpatialMesh space;
    mesh::TimeGrid grid;
    double alpha = 0.0;
    double beta = 0.0;
};

ForwardMap build_forward_matrix(const forward::ProblemSpec& spec, const mesh::SpatialMesh& space,
                                const mesh::TimeGrid& grid);

// Multiplicative uniform noise z_k (1 + eta_k), eta_k ~ U[-delta, delta],
// drawn from a seeded deterministic generator (one draw per sample).
forward::ObservationTrace add_noise(const forward::ObservationTrace& trace, double delta,
                                    std::uint64_t seed);

struct TikhonovConfig {
    bool auto_nu = true;
    double nu = 0.0;          // used when auto_nu is false
    double nu_min = 1e-12;    // geometric sweep bounds for auto mode
    double nu_max = 1e-2;
    int nu_count = 40;
    double delta_estimate = 0.0; // noise level for the discrepancy rule
    double margin = 0.01;        // discrepancy acceptance factor (1 + margin)

    void validate() const {
        if (!auto_nu && !(nu > 0.0)) throw ValidationError("TikhonovConfig: nu must be positive");
        if (!(nu_min > 0.0) || !(nu_max >= nu_min) || nu_count < 2) {
            throw ValidationError("TikhonovConfig: invalid sweep grid");
        }
        if (delta_estimate < 0.0) throw ValidationError("TikhonovConfig: negative delta");
    }
};

struct ReconstructionResult {
    Eigen::VectorXd f_hat;        // interior nodal values
    std::vector<Complex> modal;   // spectral route: recovered f_n, n >= 1
    double nu_used = 0.0;         // tikhonov route
    double residual_norm = 0.0;   // ||A f_hat - z||
    std::optional<double> error_vs_truth; // relative weighted L2 on interior nodes
    std::string method;
    double imag_residue = 0.0;    // spectral route diagnostic
};

// f_hat = (A^T A + nu I)^-1 A^T z with nu fixed or selected by choose_nu.
// When truth is supplied, records the relative mesh-weighted L2 error.
ReconstructionResult tikhonov_solve(const ForwardMap& map, const forward::ObservationTrace& z,
                                    const TikhonovConfig& config,
                                    const forward::SpaceFunction* truth = nullptr);

// Discrepancy-principle sweep over a geometric nu grid; L-curve corner when
// delta_estimate = 0 or no grid point reaches the discrepancy target.
double choose_nu(const ForwardMap& map, const forward::ObservationTrace& z,
                 const TikhonovConfig& config);

// Lower-triangular trapezoid discretization of (K phi)(t) = int_0^t
// lambda(t - s) phi(s) ds on the given grid.
struct TimeConvolutionOperator {
    Eigen::MatrixXd K;
    mesh::TimeGrid grid;
};

TimeConvolutionOperator build_time_convolution(const forward::TimeFunction& intensity,
                                               const mesh::TimeGrid& grid);

// Bi-orthogonal spectral reconstruction (requires alpha = beta): solves the
// adjoint triangular systems K^T Z_n = Y_n-samples on (0,1), forms
// f_n = <phi, Z_n> / (<X_n,Y_n> E_{alpha,alpha-1}(lambda_n)) and expands the
// retained modes. noise_floor > 0 truncates modes whose denominators fall
// below it relative to mode 1.
ReconstructionResult reconstruct_modes(const forward::ObservationTrace& phi,
                                       const spectral::EigenSystem& system,
                                       const TimeConvolutionOperator& K, int n_modes,
                                       double alpha, double noise_floor = 0.0,
                                       const forward::SpaceFunction* truth = nullptr,
                                       const mesh::SpatialMesh* error_mesh = nullptr);

// Relative mesh-weighted L2 distance between interior nodal vectors.
double relative_l2_error(const Eigen::VectorXd& f_hat, const forward::SpaceFunction& truth,
                         const mesh::SpatialMesh& space);

} // namespace fracsource::inverse
