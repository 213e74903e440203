#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "fracsource/errors.hpp"
#include "fracsource/mlf.hpp"

namespace fracsource::spectral {

using Complex = std::complex<double>;

// One eigenvalue of the Dirichlet spectral problem: lambda_n is the n-th zero
// of E_{beta,beta} by increasing modulus, kept as its upper-half-plane
// representative (the conjugate zero is implied). Real zeros occur for beta
// close to 2 and contribute a single mode, not a conjugate pair.
struct EigenPair {
    int index = 0;
    Complex lambda{0.0, 0.0};
    Complex pairing{0.0, 0.0};         // <X_n, Y_n> in L^2(0,1)
    Complex deriv_at_lambda{0.0, 0.0}; // E_{beta,beta-1}(lambda_n)
    double residual = 0.0;             // |E_{beta,beta}(lambda_n)|
    bool is_real = false;
};

struct EigenSystem {
    double beta = 1.5;
    double zero_tol = 1e-10;
    std::vector<EigenPair> pairs;

    const EigenPair& pair(int n) const;
    int size() const { return static_cast<int>(pairs.size()); }

    std::string to_json() const;
    static EigenSystem from_json(const std::string& text);
};

// Admissible-source metadata: modal decay |f_n| n^decay_exponent <= M.
struct AdmissibleSourceConfig {
    double M = 1.0;
    double decay_exponent = 0.0;
};

// Locate the first n_modes zeros of E_{beta,beta} above the real axis
// (including real ones), ordered by modulus and certified complete by
// argument-principle winding counts. Homotopy continuation in beta from the
// classical beta = 2 spectrum provides the seeds.
EigenSystem find_eigenvalues(double beta, int n_modes, double zero_tol = 1e-10);

enum class Kind { primal, adjoint };

// X_n(x) = x^{beta-1} E_{beta,beta}(lambda_n x^beta);
// Y_n(x) = (1-x)^{beta-1} E_{beta,beta}(conj(lambda_n) (1-x)^beta).
// Negative n addresses the conjugate mode.
Complex eval_eigenfunction(const EigenSystem& system, int n, Kind kind, double x);

enum class PairingMethod { closed_form, quadrature };

// <X_n, Y_n>: closed form E_{beta,beta-1}(lambda_n) / (beta lambda_n), or the
// defining integral via endpoint-graded quadrature.
Complex mode_pairing(const EigenSystem& system, int n, PairingMethod method);

// <X_n, Y_m> for any mode indices (negative = conjugate modes).
Complex cross_pairing(const EigenSystem& system, int n, int m);

// Modal coefficients f_n = <f, Y_n>/<X_n, Y_n> for n = 1..n_modes
// (f_{-n} = conj(f_n) since f is real).
std::vector<Complex> project_source(const EigenSystem& system,
                                    const std::function<double(double)>& f, int n_modes);

// Sum of the modal expansion at x: real zeros contribute once, complex pairs
// through twice the real part. coeffs[k] multiplies mode k+1.
double expand_modes(const EigenSystem& system, const std::vector<Complex>& coeffs, double x);

} // namespace fracsource::spectral
