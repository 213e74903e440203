#include "fracsource/inverse.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "fracsource/parallel.hpp"

namespace fracsource::inverse {

namespace {

mlf::EvalOptions engine_opts() {
    mlf::EvalOptions o;
    o.rel_tol = 1e-11;
    o.max_series_terms = 4000;
    o.asymptotic_terms = 40;
    return o;
}

double trace_norm(const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x * x;
    return std::sqrt(acc);
}

// Shared eigendecomposition of A^T A: every nu in a sweep reduces to a
// diagonal solve, and the spectrum provides the conditioning estimate.
struct NormalEquations {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
    Eigen::VectorXd Atz;
    Eigen::VectorXd Qt_Atz;

    NormalEquations(const Eigen::MatrixXd& A, const Eigen::VectorXd& z)
        : eig(Eigen::MatrixXd(A.transpose() * A)) {
        if (eig.info() != Eigen::Success) {
            throw IllConditioned("tikhonov: eigendecomposition of A^T A failed");
        }
        Atz = A.transpose() * z;
        Qt_Atz = eig.eigenvectors().transpose() * Atz;
    }

    Eigen::VectorXd solve(double nu) const {
        Eigen::VectorXd d = (eig.eigenvalues().array() + nu).inverse().matrix();
        return eig.eigenvectors() * d.asDiagonal() * Qt_Atz;
    }

    double condition(double nu) const {
        double lo = eig.eigenvalues().minCoeff() + nu;
        double hi = eig.eigenvalues().maxCoeff() + nu;
        return lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
    }
};

Eigen::VectorXd trace_vector(const forward::ObservationTrace& z) {
    return Eigen::Map<const Eigen::VectorXd>(z.samples.data(),
                                             static_cast<Eigen::Index>(z.samples.size()));
}

} // namespace

ForwardMap build_forward_matrix(const forward::ProblemSpec& spec, const mesh::SpatialMesh& space,
                                const mesh::TimeGrid& grid) {
    spec.validate();
    const int M = space.n_interior();
    const int K = grid.n_steps;
    auto ops = forward::assemble_fractional_stiffness(spec.beta, space);

    const double tau_ma = std::pow(grid.tau, -spec.alpha);
    Eigen::MatrixXd lhs = tau_ma * ops.mass - ops.stiffness;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(lhs);
    auto w = forward::gl_weights(spec.alpha, K + 1);
    std::vector<double> lam(static_cast<size_t>(K) + 1);
    for (int k = 0; k <= K; ++k) lam[static_cast<size_t>(k)] = spec.intensity(grid.t(k));
    const double h_last = space.nodes[static_cast<size_t>(space.n_cells)] -
                          space.nodes[static_cast<size_t>(space.n_cells) - 1];

    ForwardMap map;
    map.A = Eigen::MatrixXd::Zero(K + 1, M);
    map.space = space;
    map.grid = grid;
    map.alpha = spec.alpha;
    map.beta = spec.beta;

    // one independent march per unit hat source; the factorization is shared
    par::parallel_for(M, [&](std::ptrdiff_t col) {
        Eigen::MatrixXd U = Eigen::MatrixXd::Zero(M, K + 1);
        Eigen::VectorXd mass_col = ops.mass.col(col); // M e_col
        for (int k = 1; k <= K; ++k) {
            Eigen::VectorXd conv = Eigen::VectorXd::Zero(M);
            for (int j = 1; j <= k; ++j) {
                if (w[static_cast<size_t>(j)] == 0.0) continue;
                conv.noalias() += w[static_cast<size_t>(j)] * U.col(k - j);
            }
            Eigen::VectorXd rhs =
                lam[static_cast<size_t>(k)] * mass_col - tau_ma * (ops.mass * conv);
            U.col(k) = lu.solve(rhs);
            // flux of the hat-source solution: -u_{N-1}/h_N
            map.A(k, col) = -U(M - 1, k) / h_last;
        }
    });
    return map;
}

forward::ObservationTrace add_noise(const forward::ObservationTrace& trace, double delta,
                                    std::uint64_t seed) {
    if (delta < 0.0) throw ValidationError("add_noise: delta must be nonnegative");
    forward::ObservationTrace out = trace;
    if (delta == 0.0) return out;
    // explicit uniform mapping: identical bytes for identical seeds on any
    // conforming mt19937_64
    std::mt19937_64 gen(seed);
    for (double& v : out.samples) {
        double u = static_cast<double>(gen() >> 11) * 0x1.0p-53; // [0, 1)
        v *= 1.0 + delta * (2.0 * u - 1.0);
    }
    std::ostringstream os;
    os << "noisy(delta=" << delta << ",seed=" << seed << ")";
    out.provenance = os.str();
    return out;
}

ReconstructionResult tikhonov_solve(const ForwardMap& map, const forward::ObservationTrace& z,
                                    const TikhonovConfig& config,
                                    const forward::SpaceFunction* truth) {
    config.validate();
    if (static_cast<Eigen::Index>(z.samples.size()) != map.A.rows()) {
        throw ValidationError("tikhonov_solve: trace length does not match the operator");
    }
    double nu = config.auto_nu ? choose_nu(map, z, config) : config.nu;

    Eigen::VectorXd zv = trace_vector(z);
    NormalEquations ne(map.A, zv);
    if (ne.condition(nu) > 4.5e15) {
        throw IllConditioned("tikhonov_solve: A^T A + nu I condition exceeds 1/eps");
    }
    ReconstructionResult res;
    res.method = "tikhonov";
    res.nu_used = nu;
    res.f_hat = ne.solve(nu);
    res.residual_norm = (map.A * res.f_hat - zv).norm();
    if (truth) res.error_vs_truth = relative_l2_error(res.f_hat, *truth, map.space);
    return res;
}

double choose_nu(const ForwardMap& map, const forward::ObservationTrace& z,
                 const TikhonovConfig& config) {
    config.validate();
    Eigen::VectorXd zv = trace_vector(z);
    NormalEquations ne(map.A, zv);

    const int n = config.nu_count;
    std::vector<double> nus(static_cast<size_t>(n)), rho(static_cast<size_t>(n)),
        eta(static_cast<size_t>(n));
    const double ratio = std::pow(config.nu_max / config.nu_min, 1.0 / (n - 1));
    for (int i = 0; i < n; ++i) {
        nus[static_cast<size_t>(i)] = config.nu_min * std::pow(ratio, i);
        Eigen::VectorXd f = ne.solve(nus[static_cast<size_t>(i)]);
        rho[static_cast<size_t>(i)] = (map.A * f - zv).norm();
        eta[static_cast<size_t>(i)] = f.norm();
    }
    // the residual must grow with nu; gross violations signal a broken sweep
    for (int i = 1; i < n; ++i) {
        if (rho[static_cast<size_t>(i)] < 0.9 * rho[static_cast<size_t>(i) - 1]) {
            throw SelectionFailed("choose_nu: residual not monotone across the sweep");
        }
    }

    if (config.delta_estimate > 0.0) {
        const double target = (1.0 + config.margin) * config.delta_estimate * zv.norm();
        for (int i = n - 1; i >= 0; --i) {
            if (rho[static_cast<size_t>(i)] <= target) return nus[static_cast<size_t>(i)];
        }
        // data never reaches the discrepancy floor: fall through to L-curve
    }
    // L-curve corner: maximum curvature of (log rho, log eta)
    int best = 1;
    double best_curv = -std::numeric_limits<double>::infinity();
    for (int i = 1; i + 1 < n; ++i) {
        double x0 = std::log(rho[static_cast<size_t>(i) - 1]), y0 = std::log(eta[static_cast<size_t>(i) - 1]);
        double x1 = std::log(rho[static_cast<size_t>(i)]), y1 = std::log(eta[static_cast<size_t>(i)]);
        double x2 = std::log(rho[static_cast<size_t>(i) + 1]), y2 = std::log(eta[static_cast<size_t>(i) + 1]);
        double a = std::hypot(x1 - x0, y1 - y0);
        double b = std::hypot(x2 - x1, y2 - y1);
        double c = std::hypot(x2 - x0, y2 - y0);
        if (a * b * c == 0.0) continue;
        double cross = (x1 - x0) * (y2 - y0) - (y1 - y0) * (x2 - x0);
        double curv = 2.0 * cross / (a * b * c); // signed Menger curvature
        if (curv > best_curv) {
            best_curv = curv;
            best = i;
        }
    }
    return nus[static_cast<size_t>(best)];
}

TimeConvolutionOperator build_time_convolution(const forward::TimeFunction& intensity,
                                               const mesh::TimeGrid& grid) {
    const int K = grid.n_steps;
    std::vector<double> lam(static_cast<size_t>(K) + 1);
    double lam_max = 0.0;
    for (int k = 0; k <= K; ++k) {
        lam[static_cast<size_t>(k)] = intensity(grid.t(k));
        lam_max = std::max(lam_max, std::abs(lam[static_cast<size_t>(k)]));
    }
    if (std::abs(lam[0]) <= 1e-14 * std::max(1.0, lam_max)) {
        throw SingularIntensity(
            "build_time_convolution: intensity(0) = 0 makes the operator singular");
    }
    TimeConvolutionOperator op;
    op.grid = grid;
    op.K = Eigen::MatrixXd::Zero(K + 1, K + 1);
    for (int k = 1; k <= K; ++k) {
        for (int j = 0; j <= k; ++j) {
            double w = (j == 0 || j == k) ? 0.5 : 1.0;
            op.K(k, j) = grid.tau * w * lam[static_cast<size_t>(k - j)];
        }
    }
    return op;
}

ReconstructionResult reconstruct_modes(const forward::ObservationTrace& phi,
                                       const spectral::EigenSystem& system,
                                       const TimeConvolutionOperator& K, int n_modes,
                                       double alpha, double noise_floor,
                                       const forward::SpaceFunction* truth,
                                       const mesh::SpatialMesh* error_mesh) {
    if (std::abs(alpha - system.beta) > 1e-12) {
        throw OrderMismatch("reconstruct_modes: the spectral formula requires alpha = beta");
    }
    if (phi.grid.T() < 1.0 - 1e-12) {
        throw ValidationError("reconstruct_modes: observation must cover [0, 1]");
    }
    if (n_modes > system.size()) {
        throw ValidationError("reconstruct_modes: more modes requested than the system holds");
    }
    // restrict to t in [0, 1]
    const double tau = phi.grid.tau;
    const int K1 = static_cast<int>(std::round(1.0 / tau));
    if (std::abs(K1 * tau - 1.0) > 1e-10 || K1 > phi.grid.n_steps) {
        throw ValidationError("reconstruct_modes: time grid does not align with [0, 1]");
    }
    if (K.grid.n_steps < K1 || std::abs(K.grid.tau - tau) > 1e-14) {
        throw ValidationError("reconstruct_modes: convolution operator grid mismatch");
    }

    auto opts = engine_opts();
    // strictly lower-right block (k, j >= 1); row/column 0 carries phi(0)=0
    Eigen::MatrixXd Kt = K.K.block(1, 1, K1, K1).transpose();

    ReconstructionResult res;
    res.method = "spectral_modes";
    res.modal.assign(static_cast<size_t>(n_modes), Complex{0.0, 0.0});

    std::vector<double> denom(static_cast<size_t>(n_modes), 0.0);
    par::parallel_for(n_modes, [&](std::ptrdiff_t ni) {
        const auto& p = system.pairs[static_cast<size_t>(ni)];
        // adjoint eigenfunction as a time profile on (0, 1]
        Eigen::VectorXcd y(K1);
        for (int k = 1; k <= K1; ++k) {
            double t = k * tau;
            double w = t < 1.0 ? std::pow(1.0 - t, alpha - 1.0) : 0.0;
            Complex e{0.0, 0.0};
            if (w != 0.0) {
                e = mlf::eval_ml_estimated(
                        {alpha, alpha}, std::conj(p.lambda) * std::pow(1.0 - t, alpha), opts)
                        .value;
            }
            y(k - 1) = w * e;
        }
        // K^T Z_n = y_n, upper triangular back-substitution (complex rhs)
        Eigen::VectorXcd Z =
            Kt.triangularView<Eigen::Upper>().solve(y);
        Complex inner{0.0, 0.0};
        for (int k = 1; k <= K1; ++k) {
            inner += phi.samples[static_cast<size_t>(k)] * std::conj(Z(k - 1)) * tau;
        }
        Complex den = p.pairing * p.deriv_at_lambda;
        denom[static_cast<size_t>(ni)] = std::abs(den);
        res.modal[static_cast<size_t>(ni)] = inner / den;
    });

    // noise-floor mode cut: denominators decay fast, so modes beyond the cut
    // only amplify noise
    int keep = n_modes;
    if (noise_floor > 0.0 && n_modes > 1) {
        double scale = denom[0];
        for (int ni = 1; ni < n_modes; ++ni) {
            if (denom[static_cast<size_t>(ni)] < noise_floor * scale) {
                keep = ni;
                break;
            }
        }
        for (int ni = keep; ni < n_modes; ++ni) res.modal[static_cast<size_t>(ni)] = 0.0;
    }

    if (error_mesh) {
        const auto& nodes = error_mesh->nodes;
        const int Mi = error_mesh->n_interior();
        res.f_hat = Eigen::VectorXd::Zero(Mi);
        double imag_acc = 0.0, real_acc = 0.0;
        for (int i = 0; i < Mi; ++i) {
            Complex acc{0.0, 0.0};
            for (int ni = 0; ni < keep; ++ni) {
                Complex xn = spectral::eval_eigenfunction(system, ni + 1, spectral::Kind::primal,
                                                          nodes[static_cast<size_t>(i) + 1]);
                Complex term = res.modal[static_cast<size_t>(ni)] * xn;
                acc += system.pairs[static_cast<size_t>(ni)].is_real ? term : term + std::conj(term);
            }
            res.f_hat(i) = acc.real();
            imag_acc += acc.imag() * acc.imag();
            real_acc += acc.real() * acc.real();
        }
        res.imag_residue = real_acc > 0.0 ? std::sqrt(imag_acc / real_acc) : 0.0;
        if (truth) res.error_vs_truth = relative_l2_error(res.f_hat, *truth, *error_mesh);
    }
    return res;
}

double relative_l2_error(const Eigen::VectorXd& f_hat, const forward::SpaceFunction& truth,
                         const mesh::SpatialMesh& space) {
    auto w = mesh::trapezoid_weights(space);
    const int M = space.n_interior();
    if (f_hat.size() != M) throw ValidationError("relative_l2_error: size mismatch");
    double num = 0.0, den = 0.0;
    for (int i = 0; i < M; ++i) {
        double x = space.nodes[static_cast<size_t>(i) + 1];
        double ft = truth(x);
        double d = f_hat(i) - ft;
        num += w[static_cast<size_t>(i) + 1] * d * d;
        den += w[static_cast<size_t>(i) + 1] * ft * ft;
    }
    if (den == 0.0) return std::sqrt(num);
    return std::sqrt(num / den);
}

} // namespace fracsource::inverse
