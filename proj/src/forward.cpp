#include "fracsource/forward.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>

#include "fracsource/parallel.hpp"
#include "fracsource/quadrature.hpp"

namespace fracsource::forward {

namespace {

mlf::EvalOptions engine_opts() {
    mlf::EvalOptions o;
    o.rel_tol = 1e-11;
    o.max_series_terms = 4000;
    o.asymptotic_terms = 40;
    return o;
}

// Kernel g(s) = s^{alpha-1} E_{alpha,alpha}(lambda s^alpha) sampled once per
// mode on a cell decomposition of [0, T]; Duhamel values for every t_k are
// convolutions of the cached samples against the (cheap) intensity.
struct KernelCache {
    std::vector<double> s;                 // quadrature nodes
    std::vector<Complex> weighted_kernel;  // w * g(s) per node
    std::vector<int> cell_end_index;       // nodes belonging to [0, t_k] per k? (monotone)
};

// Quadrature nodes for one step interval [a, b]: plain Gauss for smooth
// cells; the first interval (a == 0) gets subcells graded toward the
// singularity at s = 0.
void append_cell_nodes(double a, double b, bool singular, int order, int graded_subcells,
                       double grading, std::vector<double>& s, std::vector<double>& w) {
    const auto& rule = quad::gauss_legendre(order);
    auto emit = [&](double lo, double hi) {
        double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
        for (size_t i = 0; i < rule.nodes.size(); ++i) {
            s.push_back(mid + half * rule.nodes[i]);
            w.push_back(rule.weights[i] * half);
        }
    };
    if (!singular) {
        emit(a, b);
        return;
    }
    for (int j = 0; j < graded_subcells; ++j) {
        double s0 = a + (b - a) * std::pow(static_cast<double>(j) / graded_subcells, grading);
        double s1 = a + (b - a) * std::pow(static_cast<double>(j + 1) / graded_subcells, grading);
        emit(s0, s1);
    }
}

std::vector<Complex> duhamel_table_impl(double alpha, Complex lambda,
                                        const TimeFunction& intensity, const mesh::TimeGrid& grid,
                                        int order, int graded_subcells) {
    auto opts = engine_opts();
    const int K = grid.n_steps;
    std::vector<double> s, w;
    std::vector<size_t> nodes_before_step(static_cast<size_t>(K) + 1, 0);
    for (int k = 1; k <= K; ++k) {
        append_cell_nodes(grid.t(k - 1), grid.t(k), k == 1, order, graded_subcells, 3.0, s, w);
        nodes_before_step[static_cast<size_t>(k)] = s.size();
    }
    // cache w_i * s_i^{alpha-1} E_{alpha,alpha}(lambda s_i^alpha)
    std::vector<Complex> wk(s.size());
    for (size_t i = 0; i < s.size(); ++i) {
        Complex e = mlf::eval_ml_estimated({alpha, alpha}, lambda * std::pow(s[i], alpha), opts).value;
        wk[i] = w[i] * std::pow(s[i], alpha - 1.0) * e;
    }
    std::vector<Complex> table(static_cast<size_t>(K) + 1, Complex{0.0, 0.0});
    for (int k = 1; k <= K; ++k) {
        double tk = grid.t(k);
        Complex acc{0.0, 0.0};
        for (size_t i = 0; i < nodes_before_step[static_cast<size_t>(k)]; ++i) {
            acc += wk[i] * intensity(tk - s[i]);
        }
        table[static_cast<size_t>(k)] = acc;
    }
    return table;
}

std::vector<Complex> duhamel_table(double alpha, Complex lambda, const TimeFunction& intensity,
                                   const mesh::TimeGrid& grid, double quad_tol) {
    auto coarse = duhamel_table_impl(alpha, lambda, intensity, grid, 8, 10);
    auto fine = duhamel_table_impl(alpha, lambda, intensity, grid, 12, 16);
    double num = 0.0, den = 0.0;
    for (size_t k = 0; k < coarse.size(); ++k) {
        num = std::max(num, std::abs(fine[k] - coarse[k]));
        den = std::max(den, std::abs(fine[k]));
    }
    if (den > 0.0 && num > quad_tol * den) {
        throw QuadratureFailure("duhamel_table: refinement did not certify quad_tol");
    }
    return fine;
}

} // namespace

std::vector<double> gl_weights(double alpha, int count) {
    std::vector<double> w(static_cast<size_t>(count));
    if (count == 0) return w;
    w[0] = 1.0;
    for (int j = 1; j < count; ++j) {
        w[static_cast<size_t>(j)] =
            w[static_cast<size_t>(j) - 1] * (static_cast<double>(j) - 1.0 - alpha) / j;
    }
    return w;
}

Complex duhamel_coefficient(double alpha, Complex lambda, const TimeFunction& intensity, double t,
                            double quad_tol) {
    if (t == 0.0) return {0.0, 0.0};
    if (t < 0.0) throw ValidationError("duhamel_coefficient: negative time");
    auto opts = engine_opts();
    // oscillation rate of E_{a,a}(lambda s^a) along the ray is |lambda|^{1/a}
    double osc = std::pow(std::abs(lambda), 1.0 / alpha);
    int cells = std::max(24, static_cast<int>(std::ceil(1.5 * osc * t)));
    auto pass = [&](int order, int subcells) {
        std::vector<double> s, w;
        for (int c = 0; c < cells; ++c) {
            double a = t * std::pow(static_cast<double>(c) / cells, 2.0);
            double b = t * std::pow(static_cast<double>(c + 1) / cells, 2.0);
            append_cell_nodes(a, b, c == 0, order, subcells, 3.0, s, w);
        }
        Complex acc{0.0, 0.0};
        for (size_t i = 0; i < s.size(); ++i) {
            Complex e =
                mlf::eval_ml_estimated({alpha, alpha}, lambda * std::pow(s[i], alpha), opts).value;
            acc += w[i] * std::pow(s[i], alpha - 1.0) * e * intensity(t - s[i]);
        }
        return acc;
    };
    Complex coarse = pass(8, 8);
    Complex fine = pass(12, 12);
    double scale = std::max(std::abs(fine), 1e-300);
    if (std::abs(fine - coarse) > quad_tol * scale) {
        throw QuadratureFailure("duhamel_coefficient: refinement did not certify quad_tol");
    }
    return fine;
}

ForwardSolution solve_spectral(const ProblemSpec& spec, const spectral::EigenSystem& system,
                               int n_modes, const mesh::SpatialMesh& space,
                               const mesh::TimeGrid& time) {
    spec.validate();
    if (std::abs(system.beta - spec.beta) > 1e-12) {
        throw ValidationError("solve_spectral: eigensystem beta does not match the problem");
    }
    if (n_modes > system.size()) {
        throw ValidationError("solve_spectral: more modes requested than the system holds");
    }

    auto coeffs = spectral::project_source(system, spec.source, n_modes);

    const int K = time.n_steps;
    const int N = space.n_cells;
    auto opts = engine_opts();

    // per-mode Duhamel tables and eigenfunction samples
    std::vector<std::vector<Complex>> duh(static_cast<size_t>(n_modes));
    par::parallel_for(n_modes, [&](std::ptrdiff_t n) {
        duh[static_cast<size_t>(n)] =
            duhamel_table(spec.alpha, system.pairs[static_cast<size_t>(n)].lambda, spec.intensity,
                          time, 1e-8);
    });
    Eigen::MatrixXcd modeshape(n_modes, N + 1);
    par::parallel_for(n_modes, [&](std::ptrdiff_t n) {
        const auto& p = system.pairs[static_cast<size_t>(n)];
        for (int i = 0; i <= N; ++i) {
            double x = space.nodes[static_cast<size_t>(i)];
            Complex v{0.0, 0.0};
            if (x > 0.0) {
                v = std::pow(x, spec.beta - 1.0) *
                    mlf::eval_ml_estimated({spec.beta, spec.beta},
                                           p.lambda * std::pow(x, spec.beta), opts)
                        .value;
            }
            modeshape(n, i) = v;
        }
    });

    ForwardSolution sol;
    sol.route = Route::spectral;
    sol.space = space;
    sol.time = time;
    sol.n_modes = n_modes;
    sol.values = Eigen::MatrixXd::Zero(K + 1, N + 1);

    Eigen::MatrixXd imag_field = Eigen::MatrixXd::Zero(K + 1, N + 1);
    Eigen::MatrixXd last_band = Eigen::MatrixXd::Zero(K + 1, N + 1);
    const int band_start = std::max(0, n_modes - 4);
    par::parallel_for(K + 1, [&](std::ptrdiff_t k) {
        for (int n = 0; n < n_modes; ++n) {
            const double weight = system.pairs[static_cast<size_t>(n)].is_real ? 1.0 : 2.0;
            Complex amp = duh[static_cast<size_t>(n)][static_cast<size_t>(k)] *
                          coeffs[static_cast<size_t>(n)];
            for (int i = 0; i <= N; ++i) {
                Complex term = amp * modeshape(n, i);
                sol.values(k, i) += weight * term.real();
                // conjugate-pair sums are real by construction; track the
                // one-sided imaginary part as a diagnostic of the pairing
                imag_field(k, i) += system.pairs[static_cast<size_t>(n)].is_real
                                        ? std::abs(term.imag())
                                        : 0.0;
                if (n >= band_start) last_band(k, i) += weight * term.real();
            }
        }
    });

    double field_norm = sol.values.norm();
    sol.imag_residue = field_norm > 0.0 ? imag_field.norm() / field_norm : 0.0;
    sol.last_band_fraction = field_norm > 0.0 ? last_band.norm() / field_norm : 0.0;
    // hard boundary/initial conditions
    sol.values.col(0).setZero();
    sol.values.col(N).setZero();
    sol.values.row(0).setZero();
    return sol;
}

ObservationTrace observe_flux_spectral(const ProblemSpec& spec,
                                       const spectral::EigenSystem& system,
                                       const std::vector<Complex>& modal_coeffs,
                                       const mesh::TimeGrid& time) {
    spec.validate();
    const int n_modes = static_cast<int>(modal_coeffs.size());
    if (n_modes > system.size()) {
        throw ValidationError("observe_flux_spectral: more coefficients than modes");
    }
    std::vector<std::vector<Complex>> duh(static_cast<size_t>(n_modes));
    par::parallel_for(n_modes, [&](std::ptrdiff_t n) {
        duh[static_cast<size_t>(n)] =
            duhamel_table(spec.alpha, system.pairs[static_cast<size_t>(n)].lambda, spec.intensity,
                          time, 1e-8);
    });
    ObservationTrace trace;
    trace.grid = time;
    trace.samples.assign(static_cast<size_t>(time.samples()), 0.0);
    for (int k = 0; k <= time.n_steps; ++k) {
        double acc = 0.0;
        for (int n = 0; n < n_modes; ++n) {
            const auto& p = system.pairs[static_cast<size_t>(n)];
            Complex term = duh[static_cast<size_t>(n)][static_cast<size_t>(k)] *
                           modal_coeffs[static_cast<size_t>(n)] * p.deriv_at_lambda;
            acc += p.is_real ? term.real() : 2.0 * term.real();
        }
        trace.samples[static_cast<size_t>(k)] = acc;
    }
    trace.samples[0] = 0.0;
    return trace;
}

FemOperators assemble_fractional_stiffness(double beta, const mesh::SpatialMesh& space) {
    if (!(beta > 1.0 && beta <= 2.0)) {
        throw ValidationError("assemble_fractional_stiffness: beta outside (1,2]");
    }
    const int N = space.n_cells;
    const int M = N - 1; // interior nodes
    const double mu = 2.0 - beta;
    const double rg2 = mlf::reciprocal_gamma(mu + 2.0); // 1/Gamma(mu+2)
    const auto& x = space.nodes;

    // P(y; a, b) = [(y-a)_+^{mu+1} - (y-b)_+^{mu+1}] / Gamma(mu+2) is the
    // antiderivative of I^mu applied to the indicator of (a, b); hat-function
    // derivatives are cellwise constant so every entry reduces to these.
    auto P = [&](double y, double a, double b) {
        double ya = y > a ? std::pow(y - a, mu + 1.0) : 0.0;
        double yb = y > b ? std::pow(y - b, mu + 1.0) : 0.0;
        return (ya - yb) * rg2;
    };
    // integral of I^mu phi_j' over cell c = (x_{c-1}, x_c)
    auto cell_integral = [&](int j, int c) {
        double a0 = x[static_cast<size_t>(j) - 1], a1 = x[static_cast<size_t>(j)],
               a2 = x[static_cast<size_t>(j) + 1];
        double hl = a1 - a0, hr = a2 - a1;
        double lo = x[static_cast<size_t>(c) - 1], hi = x[static_cast<size_t>(c)];
        double up = (P(hi, a0, a1) - P(lo, a0, a1)) / hl;
        double down = (P(hi, a1, a2) - P(lo, a1, a2)) / hr;
        return up - down;
    };

    FemOperators ops;
    ops.stiffness = Eigen::MatrixXd::Zero(M, M);
    ops.mass = Eigen::MatrixXd::Zero(M, M);
    par::parallel_for(M, [&](std::ptrdiff_t row) {
        int i = static_cast<int>(row) + 1; // interior node index
        double hl = x[static_cast<size_t>(i)] - x[static_cast<size_t>(i) - 1];
        double hr = x[static_cast<size_t>(i) + 1] - x[static_cast<size_t>(i)];
        for (int j = 1; j <= M; ++j) {
            // supp(I^mu phi_j') = [x_{j-1}, 1): columns j <= i+1 contribute
            if (j > i + 1) continue;
            double v = (1.0 / hl) * cell_integral(j, i) - (1.0 / hr) * cell_integral(j, i + 1);
            ops.stiffness(row, j - 1) = -v;
        }
        ops.mass(row, row) = (hl + hr) / 3.0;
        if (i > 1) ops.mass(row, row - 1) = hl / 6.0;
        if (i < M) ops.mass(row, row + 1) = hr / 6.0;
    });
    return ops;
}

std::vector<ForwardSolution> time_march_discrete_multi(const ProblemSpec& spec,
                                                       const FemOperators& ops,
                                                       const mesh::SpatialMesh& space,
                                                       const mesh::TimeGrid& time,
                                                       const Eigen::MatrixXd& f_nodal_columns) {
    spec.validate();
    const int M = space.n_interior();
    const int K = time.n_steps;
    const int B = static_cast<int>(f_nodal_columns.cols());
    if (f_nodal_columns.rows() != M) {
        throw ValidationError("time_march_discrete: source vector size mismatch");
    }

    const double tau_ma = std::pow(time.tau, -spec.alpha);
    Eigen::MatrixXd lhs = tau_ma * ops.mass - ops.stiffness;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(lhs);
    {
        // cheap singularity probe: reconstruct residual on a unit vector
        Eigen::VectorXd e = Eigen::VectorXd::Ones(M);
        Eigen::VectorXd r = lhs * lu.solve(e) - e;
        if (!r.allFinite() || r.norm() > 1e-6 * std::sqrt(static_cast<double>(M))) {
            throw SingularSystem("time_march_discrete: implicit operator is numerically singular");
        }
    }

    auto w = gl_weights(spec.alpha, K + 1);

    // history per column: U[b] is M x (K+1)
    std::vector<Eigen::MatrixXd> U(static_cast<size_t>(B), Eigen::MatrixXd::Zero(M, K + 1));
    for (int k = 1; k <= K; ++k) {
        const double lam_k = spec.intensity(time.t(k));
        par::parallel_for(B, [&](std::ptrdiff_t b) {
            Eigen::VectorXd conv = Eigen::VectorXd::Zero(M);
            const auto& Ub = U[static_cast<size_t>(b)];
            for (int j = 1; j <= k; ++j) {
                if (w[static_cast<size_t>(j)] == 0.0) continue;
                conv.noalias() += w[static_cast<size_t>(j)] * Ub.col(k - j);
            }
            Eigen::VectorXd rhs =
                ops.mass * (lam_k * f_nodal_columns.col(b) - tau_ma * conv);
            U[static_cast<size_t>(b)].col(k) = lu.solve(rhs);
        });
    }

    std::vector<ForwardSolution> out(static_cast<size_t>(B));
    for (int b = 0; b < B; ++b) {
        ForwardSolution sol;
        sol.route = Route::discrete;
        sol.space = space;
        sol.time = time;
        sol.values = Eigen::MatrixXd::Zero(K + 1, space.n_cells + 1);
        for (int k = 0; k <= K; ++k) {
            for (int i = 0; i < M; ++i) {
                sol.values(k, i + 1) = U[static_cast<size_t>(b)](i, k);
            }
        }
        out[static_cast<size_t>(b)] = std::move(sol);
    }
    return out;
}

ForwardSolution time_march_discrete(const ProblemSpec& spec, const FemOperators& ops,
                                    const mesh::SpatialMesh& space, const mesh::TimeGrid& time,
                                    const Eigen::VectorXd& f_nodal) {
    Eigen::MatrixXd cols = f_nodal;
    auto sols = time_march_discrete_multi(spec, ops, space, time, cols);
    return std::move(sols.front());
}

ObservationTrace observe_flux_discrete(const ForwardSolution& sol) {
    const int N = sol.space.n_cells;
    const double h_last = sol.space.nodes[static_cast<size_t>(N)] -
                          sol.space.nodes[static_cast<size_t>(N) - 1];
    ObservationTrace trace;
    trace.grid = sol.time;
    trace.samples.resize(static_cast<size_t>(sol.time.samples()));
    for (int k = 0; k <= sol.time.n_steps; ++k) {
        trace.samples[static_cast<size_t>(k)] =
            (sol.values(k, N) - sol.values(k, N - 1)) / h_last;
    }
    return trace;
}

Eigen::VectorXd sample_interior(const SpaceFunction& f, const mesh::SpatialMesh& space) {
    const int M = space.n_interior();
    Eigen::VectorXd v(M);
    for (int i = 0; i < M; ++i) v(i) = f(space.nodes[static_cast<size_t>(i) + 1]);
    return v;
}

} // namespace fracsource::forward
