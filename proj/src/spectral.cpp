#include "fracsource/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "fracsource/parallel.hpp"
#include "fracsource/quadrature.hpp"

namespace fracsource::spectral {

namespace {

constexpr double kPi = std::numbers::pi;

mlf::EvalOptions engine_opts() {
    mlf::EvalOptions o;
    o.rel_tol = 1e-11;
    o.max_series_terms = 4000;
    o.asymptotic_terms = 40;
    return o;
}

Complex E_bb(double beta, Complex z) {
    return mlf::eval_ml_estimated({beta, beta}, z, engine_opts()).value;
}

Complex E_bbm1(double beta, Complex z) {
    return mlf::eval_ml_estimated({beta, beta - 1.0}, z, engine_opts()).value;
}

// E'_{beta,beta}(z) = [E_{beta,beta-1}(z) - (beta-1) E_{beta,beta}(z)] / (beta z)
Complex E_bb_deriv(double beta, Complex z, Complex E_at_z) {
    return (E_bbm1(beta, z) - (beta - 1.0) * E_at_z) / (beta * z);
}

struct NewtonResult {
    Complex z;
    double residual;
    bool converged;
};

NewtonResult newton_zero(double beta, Complex z0, int max_iter = 50) {
    Complex z = z0;
    Complex Ev = E_bb(beta, z);
    for (int it = 0; it < max_iter; ++it) {
        Complex dEv = E_bb_deriv(beta, z, Ev);
        if (!(std::abs(dEv) > 0.0)) return {z, std::abs(Ev), false};
        Complex dz = Ev / dEv;
        z -= dz;
        Ev = E_bb(beta, z);
        if (std::abs(dz) <= 1e-12 * std::max(1.0, std::abs(z))) {
            return {z, std::abs(Ev), true};
        }
    }
    return {z, std::abs(Ev), false};
}

Complex upper_half(Complex z) { return z.imag() < 0.0 ? std::conj(z) : z; }

// Snap near-real zeros onto the axis and re-polish there (E is real-valued on
// the real line, so a couple of real Newton steps land cleanly).
Complex snap_real(double beta, Complex z) {
    if (z.imag() == 0.0) return z;
    if (std::abs(z.imag()) > 1e-7 * std::max(1.0, std::abs(z))) return z;
    double x = z.real();
    for (int it = 0; it < 8; ++it) {
        Complex Ev = E_bb(beta, x);
        Complex dEv = E_bb_deriv(beta, x, Ev);
        if (!(std::abs(dEv) > 0.0)) break;
        double dx = (Ev / dEv).real();
        x -= dx;
        if (std::abs(dx) <= 1e-13 * std::max(1.0, std::abs(x))) break;
    }
    return {x, 0.0};
}

std::vector<double> scan_real_zeros(double beta, double radius) {
    std::vector<double> zeros;
    // fixed fine pitch near the origin, proportional pitch farther out
    std::vector<double> grid;
    double x = 1e-3;
    while (x < radius) {
        grid.push_back(-x);
        x += std::max(0.2, 0.004 * x);
    }
    grid.push_back(-radius);
    double prev = E_bb(beta, grid[0]).real();
    for (size_t i = 1; i < grid.size(); ++i) {
        double cur = E_bb(beta, grid[i]).real();
        if (prev == 0.0) {
            zeros.push_back(grid[i - 1]);
        } else if (prev * cur < 0.0) {
            double hi = grid[i - 1], lo = grid[i]; // lo < hi on the axis
            double fhi = prev;
            for (int it = 0; it < 200; ++it) {
                double mid = 0.5 * (lo + hi);
                double fm = E_bb(beta, mid).real();
                if (fm == 0.0) {
                    lo = hi = mid;
                    break;
                }
                if ((fm < 0.0) == (fhi < 0.0)) {
                    hi = mid;
                    fhi = fm;
                } else {
                    lo = mid;
                }
                if (hi - lo <= 1e-14 * std::abs(mid)) break;
            }
            zeros.push_back(0.5 * (lo + hi));
        }
        prev = cur;
    }
    return zeros;
}

// Large-index predictor for complex zeros: solve
// zeta = 2 pi i m + c - (1+a) log zeta with c = log(a / Gamma(-a)), then
// lambda = zeta^a.
std::optional<Complex> asymptotic_zero_guess(double a, int m) {
    double rg = mlf::reciprocal_gamma(-a); // positive for a in (1,2)
    if (!(rg > 0.0)) return std::nullopt;
    Complex c = std::log(Complex(a * rg, 0.0));
    Complex zeta(1.0, 2.0 * kPi * m);
    for (int it = 0; it < 60; ++it) {
        Complex next = Complex(0.0, 2.0 * kPi * m) + c - (1.0 + a) * std::log(zeta);
        bool done = std::abs(next - zeta) < 1e-12 * std::abs(next);
        zeta = next;
        if (done) break;
    }
    return std::pow(zeta, a);
}

// --- argument-principle machinery -------------------------------------------

double phase_delta(double beta, Complex z0, Complex v0, Complex z1, Complex v1, int depth) {
    double d = std::arg(v1 / v0);
    if (std::abs(d) <= 0.5 * kPi) return d;
    if (depth >= 18) {
        throw ZeroFindingFailed("winding: phase step did not resolve (edge grazes a zero?)");
    }
    Complex zm = 0.5 * (z0 + z1);
    Complex vm = E_bb(beta, zm);
    return phase_delta(beta, z0, v0, zm, vm, depth + 1) +
           phase_delta(beta, zm, vm, z1, v1, depth + 1);
}

struct Rect {
    double x0, x1, y0, y1;
    bool contains(Complex z) const {
        return z.real() > x0 && z.real() <= x1 && z.imag() > y0 && z.imag() <= y1;
    }
};

int winding_number(double beta, const Rect& r) {
    const Complex corners[4] = {{r.x0, r.y0}, {r.x1, r.y0}, {r.x1, r.y1}, {r.x0, r.y1}};
    double total = 0.0;
    const int base = 24;
    for (int e = 0; e < 4; ++e) {
        Complex a = corners[e], b = corners[(e + 1) % 4];
        Complex zprev = a, vprev = E_bb(beta, a);
        for (int i = 1; i <= base; ++i) {
            Complex znext = a + (b - a) * (static_cast<double>(i) / base);
            Complex vnext = E_bb(beta, znext);
            total += phase_delta(beta, zprev, vprev, znext, vnext, 0);
            zprev = znext;
            vprev = vnext;
        }
    }
    double w = total / (2.0 * kPi);
    double wi = std::nearbyint(w);
    if (std::abs(w - wi) > 0.25) {
        throw ZeroFindingFailed("winding: non-integer count, contour grazes a zero");
    }
    return static_cast<int>(wi);
}

// Recursively isolate `count` zeros inside a rectangle.
void census_rect(double beta, Rect r, int count, std::vector<Complex>& found, int depth = 0) {
    if (count <= 0) return;
    if (depth > 60) throw ZeroFindingFailed("census: subdivision depth exhausted");
    double w = r.x1 - r.x0, h = r.y1 - r.y0;
    double small = 1e-3 * std::max(1.0, std::abs(r.x0)) + 1e-3;
    if (count == 1 && w < small && h < small) {
        auto nr = newton_zero(beta, {0.5 * (r.x0 + r.x1), 0.5 * (r.y0 + r.y1)});
        if (!nr.converged) throw ZeroFindingFailed("census: Newton failed on an isolated zero");
        found.push_back(nr.z);
        return;
    }
    Rect l = r, rr = r;
    // split the longer side at a slightly irrational fraction so repeated
    // bisection does not land exactly on a zero
    if (w >= h) {
        double xm = r.x0 + w * 0.51237;
        l.x1 = xm;
        rr.x0 = xm;
    } else {
        double ym = r.y0 + h * 0.51237;
        l.y1 = ym;
        rr.y0 = ym;
    }
    int wl = winding_number(beta, l);
    census_rect(beta, l, wl, found, depth + 1);
    census_rect(beta, rr, count - wl, found, depth + 1);
}

struct Candidate {
    Complex z;
    bool is_real;
};

void add_candidate(std::vector<Candidate>& cs, double beta, Complex z) {
    z = snap_real(beta, upper_half(z));
    double scale = std::max(1.0, std::abs(z));
    for (auto& c : cs) {
        if (std::abs(c.z - z) < 1e-6 * scale) return; // duplicate
    }
    cs.push_back({z, z.imag() == 0.0});
}

} // namespace

const EigenPair& EigenSystem::pair(int n) const {
    if (n < 1 || n > size()) {
        throw ValidationError("EigenSystem: mode index " + std::to_string(n) + " out of range");
    }
    return pairs[static_cast<size_t>(n - 1)];
}

EigenSystem find_eigenvalues(double beta, int n_modes, double zero_tol) {
    if (!(beta > 1.0 && beta <= 2.0)) {
        throw ValidationError("find_eigenvalues: beta must lie in (1, 2]");
    }
    if (n_modes < 1) throw ValidationError("find_eigenvalues: n_modes must be >= 1");

    const int n_track = static_cast<int>(std::ceil(1.6 * n_modes)) + 12;
    std::vector<Complex> tracks(n_track);
    std::vector<char> track_alive(static_cast<size_t>(n_track), 1);
    for (int i = 0; i < n_track; ++i) {
        double npi = (i + 1) * kPi;
        tracks[i] = Complex(-npi * npi, 0.0);
    }

    // Homotopy in beta from the classical spectrum. Each track continues
    // independently with a secant predictor and adaptive step halving (deep
    // zeros move by a full spacing per 0.05 step near beta = 2). Predictors
    // are nudged off the axis so conjugate pairs born from collided real
    // zeros are caught instead of stranding Newton on the real line.
    if (beta < 2.0) {
        par::parallel_for(n_track, [&](std::ptrdiff_t i) {
            double b = 2.0;
            double step = 0.05;
            Complex cur = tracks[i];
            Complex prev = cur;
            double b_prev = b;
            while (b > beta) {
                double b_next = std::max(beta, b - step);
                Complex predicted = cur;
                if (b_prev > b) {
                    predicted = cur + (cur - prev) * ((b - b_next) / (b_prev - b));
                }
                Complex nudged =
                    predicted + Complex(0.0, 1e-3 * std::max(1.0, std::abs(predicted)));
                auto nr = newton_zero(b_next, nudged);
                // expected spacing of adjacent zeros near this modulus
                double spacing =
                    beta * kPi * std::pow(std::max(1.0, std::abs(predicted)), 1.0 - 1.0 / beta);
                bool ok = nr.converged && std::abs(nr.z - predicted) < 0.5 * spacing;
                if (ok) {
                    prev = cur;
                    b_prev = b;
                    cur = snap_real(b_next, upper_half(nr.z));
                    b = b_next;
                    step = std::min(0.05, step * 1.4);
                } else {
                    step *= 0.5;
                    if (step < 5e-4) {
                        track_alive[static_cast<size_t>(i)] = 0;
                        break;
                    }
                }
            }
            tracks[i] = cur;
        });
    }

    std::vector<Candidate> cands;
    for (int i = 0; i < n_track; ++i) {
        if (track_alive[static_cast<size_t>(i)]) add_candidate(cands, beta, tracks[i]);
    }

    // Safety nets independent of the continuation: a bisection scan of the
    // real axis and Newton-polished asymptotic seeds for complex modes, out
    // to the modulus the deepest tracked mode should have.
    double reach = 40.0;
    if (beta < 2.0) {
        if (auto g = asymptotic_zero_guess(beta, n_track)) {
            reach = std::max(reach, 1.15 * std::abs(*g));
        }
    }
    double npi = n_track * kPi;
    reach = std::max(reach, beta >= 2.0 ? 1.05 * npi * npi : reach);
    for (const auto& c : cands) reach = std::max(reach, 1.05 * std::abs(c.z));

    for (double x : scan_real_zeros(beta, reach)) {
        add_candidate(cands, beta, Complex(x, 0.0));
    }
    if (beta < 2.0) {
        for (int m = 1; m <= 3 * n_track; ++m) {
            auto guess = asymptotic_zero_guess(beta, m);
            if (!guess) break;
            if (std::abs(*guess) > reach) break;
            auto nr = newton_zero(beta, upper_half(*guess));
            if (nr.converged) add_candidate(cands, beta, nr.z);
        }
    }

    auto by_modulus = [](const Candidate& a, const Candidate& b) {
        return std::abs(a.z) < std::abs(b.z);
    };
    std::sort(cands.begin(), cands.end(), by_modulus);

    if (static_cast<int>(cands.size()) < n_modes + 1) {
        throw ZeroFindingFailed("find_eigenvalues: located only " + std::to_string(cands.size()) +
                                " zeros, need " + std::to_string(n_modes + 1));
    }

    // certification radius: halfway between mode n_modes and the next zero,
    // avoiding modulus ties
    int cut = n_modes;
    while (cut < static_cast<int>(cands.size()) - 1 &&
           std::abs(cands[cut].z) - std::abs(cands[cut - 1].z) < 1e-6 * std::abs(cands[cut].z)) {
        ++cut;
    }
    const double r_cert = 0.5 * (std::abs(cands[cut - 1].z) + std::abs(cands[cut].z));

    // Argument-principle completeness certificate over a tiled box covering
    // the upper half of the disk |z| <= r_cert (all zeros have Re < 0). The
    // thin strip below the axis makes each real zero count once; conjugate
    // pairs whose mirror lands inside the strip are accounted for explicitly.
    {
        const double pad = 0.37;
        const Rect box{-r_cert, pad, -pad, r_cert};
        auto known_inside = [&](const Rect& r) {
            int count = 0;
            for (const auto& c : cands) {
                if (r.contains(c.z)) ++count;
                if (!c.is_real && r.contains(std::conj(c.z))) ++count;
            }
            return count;
        };
        const int tiles = std::max(2, static_cast<int>(std::ceil(std::sqrt(n_modes / 2.0))));
        double shift = 0.0;
        for (int attempt = 0;; ++attempt) {
            try {
                std::vector<Rect> grid;
                for (int i = 0; i < tiles; ++i) {
                    for (int j = 0; j < tiles; ++j) {
                        Rect t;
                        t.x0 = box.x0 + (box.x1 - box.x0) * i / tiles + shift;
                        t.x1 = box.x0 + (box.x1 - box.x0) * (i + 1) / tiles + shift;
                        t.y0 = box.y0 + (box.y1 - box.y0) * j / tiles + shift;
                        t.y1 = box.y0 + (box.y1 - box.y0) * (j + 1) / tiles + shift;
                        grid.push_back(t);
                    }
                }
                std::vector<int> winds(grid.size());
                par::parallel_for(static_cast<std::ptrdiff_t>(grid.size()),
                                  [&](std::ptrdiff_t k) { winds[k] = winding_number(beta, grid[k]); });
                for (size_t k = 0; k < grid.size(); ++k) {
                    int expect = known_inside(grid[k]);
                    if (winds[k] == expect) continue;
                    if (winds[k] < expect) {
                        throw ZeroFindingFailed("certificate: winding below known zero count");
                    }
                    // repair: isolate the missed zeros and add them
                    std::vector<Complex> extra;
                    census_rect(beta, grid[k], winds[k], extra);
                    for (const auto& z : extra) add_candidate(cands, beta, z);
                }
                break;
            } catch (const ZeroFindingFailed&) {
                if (attempt >= 4) throw;
                shift += 0.0137 * (1 + attempt); // nudge the tile grid off a zero
            }
        }
        std::sort(cands.begin(), cands.end(), by_modulus);
    }

    EigenSystem sys;
    sys.beta = beta;
    sys.zero_tol = zero_tol;
    sys.pairs.resize(static_cast<size_t>(n_modes));
    par::parallel_for(n_modes, [&](std::ptrdiff_t i) {
        EigenPair p;
        p.index = static_cast<int>(i) + 1;
        p.lambda = cands[static_cast<size_t>(i)].z;
        p.is_real = cands[static_cast<size_t>(i)].is_real;
        p.residual = std::abs(E_bb(beta, p.lambda));
        p.deriv_at_lambda = E_bbm1(beta, p.lambda);
        p.pairing = p.deriv_at_lambda / (beta * p.lambda);
        sys.pairs[static_cast<size_t>(i)] = p;
    });

    // invariants from the eigenvalue lemma and the simplicity corollary
    const double sector = beta * kPi / 2.0;
    for (int n = 1; n <= n_modes; ++n) {
        const auto& p = sys.pair(n);
        if (p.residual > zero_tol) {
            throw ZeroFindingFailed("mode " + std::to_string(n) + ": residual " +
                                    std::to_string(p.residual) + " above zero_tol");
        }
        double arg = std::abs(std::arg(p.lambda));
        bool sector_ok = beta < 2.0 ? arg > sector : arg > sector - 1e-9;
        if (!sector_ok) {
            throw ZeroFindingFailed("mode " + std::to_string(n) + ": eigenvalue outside sector");
        }
        if (n > 1 && !(std::abs(p.lambda) > std::abs(sys.pair(n - 1).lambda))) {
            throw ZeroFindingFailed("eigenvalue moduli not strictly increasing at n=" +
                                    std::to_string(n));
        }
        if (!(std::abs(p.pairing) > 0.0) || !(std::abs(p.deriv_at_lambda) > zero_tol)) {
            throw ZeroFindingFailed("mode " + std::to_string(n) +
                                    ": degenerate pairing or derivative");
        }
    }
    return sys;
}

Complex eval_eigenfunction(const EigenSystem& system, int n, Kind kind, double x) {
    if (x < 0.0 || x > 1.0) throw ValidationError("eval_eigenfunction: x outside [0,1]");
    const bool conjugate = n < 0;
    const EigenPair& p = system.pair(std::abs(n));
    const Complex lambda = conjugate ? std::conj(p.lambda) : p.lambda;
    const double beta = system.beta;
    auto opts = engine_opts();
    if (kind == Kind::primal) {
        if (x == 0.0) return {0.0, 0.0};
        double w = std::pow(x, beta - 1.0);
        return w * mlf::eval_ml_estimated({beta, beta}, lambda * std::pow(x, beta), opts).value;
    }
    if (x == 1.0) return {0.0, 0.0};
    double w = std::pow(1.0 - x, beta - 1.0);
    Complex arg = std::conj(lambda) * std::pow(1.0 - x, beta);
    return w * mlf::eval_ml_estimated({beta, beta}, arg, opts).value;
}

Complex mode_pairing(const EigenSystem& system, int n, PairingMethod method) {
    const bool conjugate = n < 0;
    const EigenPair& p = system.pair(std::abs(n));
    Complex v;
    if (method == PairingMethod::closed_form) {
        v = p.deriv_at_lambda / (system.beta * p.lambda);
    } else {
        v = cross_pairing(system, std::abs(n), std::abs(n));
    }
    return conjugate ? std::conj(v) : v;
}

Complex cross_pairing(const EigenSystem& system, int n, int m) {
    const double beta = system.beta;
    Complex ln = system.pair(std::abs(n)).lambda;
    if (n < 0) ln = std::conj(ln);
    Complex lm = system.pair(std::abs(m)).lambda;
    if (m < 0) lm = std::conj(lm);
    auto opts = engine_opts();
    // <X_n, Y_m> = int_0^1 x^{b-1} E(l_n x^b) (1-x)^{b-1} E(l_m (1-x)^b) dx
    auto integrand = [&](double x) -> Complex {
        if (x <= 0.0 || x >= 1.0) return {0.0, 0.0};
        double xb = std::pow(x, beta), cxb = std::pow(1.0 - x, beta);
        Complex a = mlf::eval_ml_estimated({beta, beta}, ln * xb, opts).value;
        Complex b = mlf::eval_ml_estimated({beta, beta}, lm * cxb, opts).value;
        return std::pow(x, beta - 1.0) * std::pow(1.0 - x, beta - 1.0) * a * b;
    };
    // coarse pass fixes the absolute tolerance scale for the adaptive pass
    Complex coarse = quad::composite_gauss(integrand, 0.0, 1.0, 64, 12);
    double scale = std::max(std::abs(coarse), std::abs(system.pair(std::abs(n)).pairing));
    double abs_tol = std::max(2e-14, 1e-7 * scale);
    return quad::graded_integrate_01(integrand, abs_tol);
}

std::vector<Complex> project_source(const EigenSystem& system,
                                    const std::function<double(double)>& f, int n_modes) {
    if (n_modes > system.size()) {
        throw ValidationError("project_source: more modes requested than the system holds");
    }
    const double beta = system.beta;
    auto opts = engine_opts();
    std::vector<Complex> coeffs(static_cast<size_t>(n_modes));
    par::parallel_for(n_modes, [&](std::ptrdiff_t i) {
        const EigenPair& p = system.pairs[static_cast<size_t>(i)];
        // <f, Y_n> = int f(x) (1-x)^{b-1} E_{b,b}(lambda_n (1-x)^b) dx
        auto integrand = [&](double x) -> Complex {
            if (x >= 1.0) return {0.0, 0.0};
            double w = std::pow(1.0 - x, beta - 1.0);
            Complex e =
                mlf::eval_ml_estimated({beta, beta}, p.lambda * std::pow(1.0 - x, beta), opts)
                    .value;
            return f(x) * w * e;
        };
        Complex coarse = quad::composite_gauss(integrand, 0.0, 1.0, 64, 12);
        double abs_tol = std::max(2e-14, 1e-9 * std::max(std::abs(coarse), std::abs(p.pairing)));
        Complex inner = quad::graded_integrate_01(integrand, abs_tol);
        coeffs[static_cast<size_t>(i)] = inner / p.pairing;
    });
    return coeffs;
}

double expand_modes(const EigenSystem& system, const std::vector<Complex>& coeffs, double x) {
    double acc = 0.0;
    for (size_t i = 0; i < coeffs.size(); ++i) {
        Complex term =
            coeffs[i] * eval_eigenfunction(system, static_cast<int>(i) + 1, Kind::primal, x);
        acc += system.pairs[i].is_real ? term.real() : 2.0 * term.real();
    }
    return acc;
}

std::string EigenSystem::to_json() const {
    nlohmann::json j;
    j["beta"] = beta;
    j["zero_tol"] = zero_tol;
    j["pairs"] = nlohmann::json::array();
    for (const auto& p : pairs) {
        j["pairs"].push_back({{"n", p.index},
                              {"lambda_re", p.lambda.real()},
                              {"lambda_im", p.lambda.imag()},
                              {"pairing_re", p.pairing.real()},
                              {"pairing_im", p.pairing.imag()},
                              {"deriv_re", p.deriv_at_lambda.real()},
                              {"deriv_im", p.deriv_at_lambda.imag()},
                              {"residual", p.residual}});
    }
    return j.dump(2);
}

EigenSystem EigenSystem::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("eigensystem JSON: ") + e.what());
    }
    EigenSystem sys;
    try {
        sys.beta = j.at("beta").get<double>();
        sys.zero_tol = j.at("zero_tol").get<double>();
        for (const auto& jp : j.at("pairs")) {
            EigenPair p;
            p.index = jp.at("n").get<int>();
            p.lambda = {jp.at("lambda_re").get<double>(), jp.at("lambda_im").get<double>()};
            p.pairing = {jp.at("pairing_re").get<double>(), jp.at("pairing_im").get<double>()};
            p.deriv_at_lambda = {jp.at("deriv_re").get<double>(), jp.at("deriv_im").get<double>()};
            p.residual = jp.at("residual").get<double>();
            p.is_real = p.lambda.imag() == 0.0;
            sys.pairs.push_back(p);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("eigensystem JSON fields: ") + e.what());
    }
    return sys;
}

} // namespace fracsource::spectral
