#include "fracsource/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <memory>

#include <json.hpp>

#include "fracsource/csvio.hpp"
#include "fracsource/version.hpp"

namespace fracsource::experiment {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool near_integer(double v) { return std::abs(v - std::nearbyint(v)) < 1e-9 * std::max(1.0, v); }

std::vector<std::pair<double, double>> load_samples(const std::filesystem::path& path) {
    auto table = csvio::read_csv(path);
    if (table.columns.size() < 2) throw ValidationError(path.string() + ": need two columns");
    std::vector<std::pair<double, double>> out;
    for (size_t i = 0; i < table.columns[0].size(); ++i) {
        out.emplace_back(table.columns[0][i], table.columns[1][i]);
    }
    std::sort(out.begin(), out.end());
    if (out.size() < 2) throw ValidationError(path.string() + ": need at least two samples");
    return out;
}

double interp_samples(const std::vector<std::pair<double, double>>& s, double x) {
    if (x <= s.front().first) return s.front().second;
    if (x >= s.back().first) return s.back().second;
    auto it = std::upper_bound(s.begin(), s.end(), std::make_pair(x, -1e300));
    auto lo = std::prev(it);
    double t = (x - lo->first) / (it->first - lo->first);
    return lo->second + t * (it->second - lo->second);
}

} // namespace

forward::TimeFunction ExperimentConfig::make_intensity() const {
    if (intensity == "exp2") return [](double t) { return 2.0 * std::exp(t); };
    if (intensity == "sin5") return [](double t) { return 5.0 * std::sin(t); };
    if (intensity == "custom") {
        auto samples = std::make_shared<std::vector<std::pair<double, double>>>(
            load_samples(intensity_file));
        return [samples](double t) { return interp_samples(*samples, t); };
    }
    throw ValidationError("intensity: unknown kind '" + intensity + "'");
}

forward::SpaceFunction ExperimentConfig::make_source() const {
    if (source_truth == "poly1") return [](double x) { return x * (1.0 - x); };
    if (source_truth == "poly2") return [](double x) { return x * x * (1.0 - x); };
    if (source_truth == "poly4") return [](double x) { return x * x * x * x * (1.0 - x); };
    if (source_truth == "custom") {
        auto samples =
            std::make_shared<std::vector<std::pair<double, double>>>(load_samples(source_file));
        return [samples](double x) { return interp_samples(*samples, x); };
    }
    throw ValidationError("source_truth: unknown kind '" + source_truth + "'");
}

void ExperimentConfig::validate() const {
    std::vector<std::string> bad;
    if (!(alpha > 1.0 && alpha <= 2.0)) bad.push_back("alpha (mandatory, in (1,2])");
    if (!(beta > 1.0 && beta <= 2.0)) bad.push_back("beta (mandatory, in (1,2])");
    if (!(T > 0.0)) bad.push_back("T");
    if (intensity != "exp2" && intensity != "sin5" && intensity != "custom") bad.push_back("intensity");
    if (intensity == "custom" && intensity_file.empty()) bad.push_back("intensity_file");
    if (source_truth != "poly1" && source_truth != "poly2" && source_truth != "poly4" &&
        source_truth != "custom") {
        bad.push_back("source_truth");
    }
    if (source_truth == "custom" && source_file.empty()) bad.push_back("source_file");
    for (auto [name, h] : {std::pair<const char*, double>{"h_fine", h_fine},
                           std::pair<const char*, double>{"h_coarse", h_coarse}}) {
        if (!(h > 0.0) || !near_integer(1.0 / h)) bad.push_back(std::string(name) + " (1/h must be integer)");
    }
    for (auto [name, tau] : {std::pair<const char*, double>{"tau_fine", tau_fine},
                             std::pair<const char*, double>{"tau_coarse", tau_coarse}}) {
        if (!(tau > 0.0) || !near_integer(T / tau)) bad.push_back(std::string(name) + " (T/tau must be integer)");
    }
    if (delta < 0.0) bad.push_back("delta (>= 0)");
    if (!(grading_exponent >= 1.0)) bad.push_back("grading_exponent (>= 1)");
    if (!auto_nu && !(nu > 0.0)) bad.push_back("nu (> 0 when not auto)");
    if (n_modes < 1) bad.push_back("n_modes");
    if (methods.empty()) bad.push_back("methods (need at least one)");
    for (const auto& m : methods) {
        if (m != "tikhonov" && m != "spectral_modes") bad.push_back("methods ('" + m + "')");
    }
    bool coarser = h_coarse > h_fine + 1e-15 || tau_coarse > tau_fine + 1e-15;
    bool equal_grid = std::abs(h_coarse - h_fine) < 1e-15 && std::abs(tau_coarse - tau_fine) < 1e-15;
    if (!allow_inverse_crime) {
        if (equal_grid) {
            bad.push_back("grids (inversion grid equals data grid; set allow_inverse_crime)");
        } else if (!coarser) {
            bad.push_back("grids (coarse grid must be coarser than fine)");
        }
    }
    if (!near_integer(tau_coarse / tau_fine)) {
        bad.push_back("tau_coarse/tau_fine (must be an integer subsampling ratio)");
    }
    if (!bad.empty()) {
        std::string msg = "config validation failed:";
        for (const auto& b : bad) msg += " [" + b + "]";
        throw ValidationError(msg);
    }
}

namespace {

void apply_json(ExperimentConfig& c, const nlohmann::json& j) {
    auto get = [&](const char* key, auto& field) {
        if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    get("alpha", c.alpha);
    get("beta", c.beta);
    get("T", c.T);
    get("intensity", c.intensity);
    get("intensity_file", c.intensity_file);
    get("source_truth", c.source_truth);
    get("source_file", c.source_file);
    get("h_fine", c.h_fine);
    get("tau_fine", c.tau_fine);
    get("h_coarse", c.h_coarse);
    get("tau_coarse", c.tau_coarse);
    get("grading_exponent", c.grading_exponent);
    get("delta", c.delta);
    get("seed", c.seed);
    get("auto_nu", c.auto_nu);
    get("nu", c.nu);
    get("n_modes", c.n_modes);
    get("methods", c.methods);
    get("allow_inverse_crime", c.allow_inverse_crime);
    if (j.contains("nu") && !j.contains("auto_nu")) c.auto_nu = false;
}

} // namespace

ExperimentConfig config_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("config: ") + e.what());
    }
    ExperimentConfig c;
    try {
        apply_json(c, j);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("config fields: ") + e.what());
    }
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw IOError("cannot open config " + path.string());
    std::stringstream ss;
    ss << is.rdbuf();
    return config_from_json(ss.str());
}

std::string ExperimentConfig::to_json() const {
    nlohmann::json j{{"alpha", alpha},
                     {"beta", beta},
                     {"T", T},
                     {"intensity", intensity},
                     {"source_truth", source_truth},
                     {"h_fine", h_fine},
                     {"tau_fine", tau_fine},
                     {"h_coarse", h_coarse},
                     {"tau_coarse", tau_coarse},
                     {"grading_exponent", grading_exponent},
                     {"delta", delta},
                     {"seed", seed},
                     {"auto_nu", auto_nu},
                     {"nu", nu},
                     {"n_modes", n_modes},
                     {"methods", methods},
                     {"allow_inverse_crime", allow_inverse_crime}};
    if (!intensity_file.empty()) j["intensity_file"] = intensity_file;
    if (!source_file.empty()) j["source_file"] = source_file;
    return j.dump(2);
}

RunManifest run_experiment(const ExperimentConfig& config) {
    config.validate();
    RunManifest man;
    man.config = config;
    man.version = kVersion;

    forward::ProblemSpec spec;
    spec.alpha = config.alpha;
    spec.beta = config.beta;
    spec.T = config.T;
    spec.intensity = config.make_intensity();
    spec.source = config.make_source();

    const bool want_tikhonov =
        std::find(config.methods.begin(), config.methods.end(), "tikhonov") != config.methods.end();
    const bool want_spectral = std::find(config.methods.begin(), config.methods.end(),
                                         "spectral_modes") != config.methods.end();
    const bool orders_match = std::abs(config.alpha - config.beta) < 1e-12;
    if (want_spectral && !orders_match && !want_tikhonov) {
        throw OrderMismatch("spectral_modes requires alpha = beta (Tikhonov is applicable)");
    }

    // ---- data generation on the fine grid ---------------------------------
    auto t0 = Clock::now();
    mesh::SpatialMesh fine_mesh(static_cast<int>(std::lround(1.0 / config.h_fine)),
                                config.grading_exponent);
    mesh::TimeGrid fine_grid(static_cast<int>(std::lround(config.T / config.tau_fine)),
                             config.tau_fine);
    auto ops_fine = forward::assemble_fractional_stiffness(config.beta, fine_mesh);
    auto f_fine = forward::sample_interior(spec.source, fine_mesh);
    auto sol_fine = forward::time_march_discrete(spec, ops_fine, fine_mesh, fine_grid, f_fine);
    auto trace_fine = forward::observe_flux_discrete(sol_fine);
    man.timings_seconds["forward_fine"] = seconds_since(t0);

    // ---- resample to the coarse time grid, then add noise ------------------
    t0 = Clock::now();
    mesh::SpatialMesh coarse_mesh(static_cast<int>(std::lround(1.0 / config.h_coarse)),
                                  config.grading_exponent);
    mesh::TimeGrid coarse_grid(static_cast<int>(std::lround(config.T / config.tau_coarse)),
                               config.tau_coarse);
    const int stride = static_cast<int>(std::lround(config.tau_coarse / config.tau_fine));
    forward::ObservationTrace trace_coarse;
    trace_coarse.grid = coarse_grid;
    trace_coarse.samples.resize(static_cast<size_t>(coarse_grid.samples()));
    for (int k = 0; k <= coarse_grid.n_steps; ++k) {
        trace_coarse.samples[static_cast<size_t>(k)] =
            trace_fine.samples[static_cast<size_t>(k) * stride];
    }
    auto trace_noisy = inverse::add_noise(trace_coarse, config.delta, config.seed);
    man.timings_seconds["resample_noise"] = seconds_since(t0);

    // ---- operator assembly on the coarse grid -----------------------------
    t0 = Clock::now();
    auto map = inverse::build_forward_matrix(spec, coarse_mesh, coarse_grid);
    man.timings_seconds["assemble_A"] = seconds_since(t0);

    auto truth = spec.source;

    if (want_tikhonov) {
        t0 = Clock::now();
        inverse::TikhonovConfig tcfg;
        tcfg.auto_nu = config.auto_nu;
        tcfg.nu = config.nu;
        tcfg.delta_estimate = config.delta;
        auto rec = inverse::tikhonov_solve(map, trace_noisy, tcfg, &truth);
        MethodOutcome out;
        out.method = "tikhonov";
        out.f_hat = rec.f_hat;
        out.nu_used = rec.nu_used;
        out.residual_norm = rec.residual_norm;
        out.error_vs_truth = rec.error_vs_truth;
        man.outcomes.push_back(std::move(out));
        man.timings_seconds["tikhonov"] = seconds_since(t0);
    }

    // the eigensystem doubles as the persistent cache, so compute it even
    // when only Tikhonov ran
    t0 = Clock::now();
    auto system = spectral::find_eigenvalues(config.beta, config.n_modes);
    man.eigensystem_json = system.to_json();
    man.timings_seconds["eigensystem"] = seconds_since(t0);

    if (want_spectral) {
        if (!orders_match) {
            man.notes.push_back(
                "spectral_modes skipped: requires alpha = beta (Tikhonov-only applicability)");
        } else {
            t0 = Clock::now();
            auto K = inverse::build_time_convolution(spec.intensity, coarse_grid);
            auto rec = inverse::reconstruct_modes(trace_noisy, system, K, config.n_modes,
                                                  config.alpha, config.delta, &truth,
                                                  &coarse_mesh);
            MethodOutcome out;
            out.method = "spectral_modes";
            out.f_hat = rec.f_hat;
            out.residual_norm = rec.residual_norm;
            out.error_vs_truth = rec.error_vs_truth;
            std::ostringstream note;
            note << "imag_residue=" << rec.imag_residue;
            out.note = note.str();
            man.outcomes.push_back(std::move(out));
            man.timings_seconds["spectral_modes"] = seconds_since(t0);
        }
    }

    // persistence payload
    man.coarse_times.resize(static_cast<size_t>(coarse_grid.samples()));
    for (int k = 0; k <= coarse_grid.n_steps; ++k) {
        man.coarse_times[static_cast<size_t>(k)] = coarse_grid.t(k);
    }
    man.phi_clean = trace_coarse.samples;
    man.phi_noisy = trace_noisy.samples;
    const int Mi = coarse_mesh.n_interior();
    man.x_nodes.resize(static_cast<size_t>(Mi));
    man.f_true_nodes.resize(static_cast<size_t>(Mi));
    for (int i = 0; i < Mi; ++i) {
        double x = coarse_mesh.nodes[static_cast<size_t>(i) + 1];
        man.x_nodes[static_cast<size_t>(i)] = x;
        man.f_true_nodes[static_cast<size_t>(i)] = truth(x);
    }
    return man;
}

std::string RunManifest::to_json() const {
    nlohmann::json j;
    j["config"] = nlohmann::json::parse(config.to_json());
    j["version"] = version;
    j["timings_seconds"] = timings_seconds;
    j["notes"] = notes;
    j["outcomes"] = nlohmann::json::array();
    for (const auto& o : outcomes) {
        nlohmann::json jo{{"method", o.method},
                          {"nu_used", o.nu_used},
                          {"residual_norm", o.residual_norm}};
        if (o.error_vs_truth) jo["error_vs_truth"] = *o.error_vs_truth;
        if (!o.note.empty()) jo["note"] = o.note;
        j["outcomes"].push_back(jo);
    }
    j["output_files"] = output_files;
    return j.dump(2);
}

RunManifest persist_results(RunManifest man, const std::filesystem::path& outdir) {
    std::error_code ec;
    std::filesystem::create_directories(outdir, ec);
    if (ec) throw IOError("cannot create " + outdir.string() + ": " + ec.message());

    csvio::Table trace;
    trace.header = {"t", "phi_clean", "phi_noisy"};
    trace.columns = {man.coarse_times, man.phi_clean, man.phi_noisy};
    csvio::write_csv(outdir / "trace.csv", trace);
    man.output_files["trace"] = (outdir / "trace.csv").string();

    csvio::Table rec;
    rec.header = {"x", "f_true"};
    rec.columns = {man.x_nodes, man.f_true_nodes};
    for (const auto& o : man.outcomes) {
        rec.header.push_back("f_hat_" + (o.method == "spectral_modes" ? std::string("spectral")
                                                                      : o.method));
        std::vector<double> col(static_cast<size_t>(o.f_hat.size()));
        for (Eigen::Index i = 0; i < o.f_hat.size(); ++i) col[static_cast<size_t>(i)] = o.f_hat(i);
        rec.columns.push_back(std::move(col));
    }
    csvio::write_csv(outdir / "reconstruction.csv", rec);
    man.output_files["reconstruction"] = (outdir / "reconstruction.csv").string();

    csvio::write_text(outdir / "eigensystem.json", man.eigensystem_json);
    man.output_files["eigensystem"] = (outdir / "eigensystem.json").string();

    csvio::write_text(outdir / "manifest.json", man.to_json());
    man.output_files["manifest"] = (outdir / "manifest.json").string();
    return man;
}

std::filesystem::path emit_plot_script(const RunManifest& man,
                                       const std::filesystem::path& outdir) {
    for (const char* name : {"trace.csv", "reconstruction.csv"}) {
        if (!std::filesystem::exists(outdir / name)) {
            throw IOError("emit_plot_script: missing " + (outdir / name).string() +
                          " (run persist_results first)");
        }
    }
    std::ostringstream gp;
    gp << "# gnuplot script generated by fracsource " << kVersion << "\n";
    gp << "set datafile separator ','\n";
    gp << "set terminal pngcairo size 1200,500\n";
    gp << "set output 'reconstruction.png'\n";
    gp << "set multiplot layout 1,2\n";
    gp << "set key top right\n";
    gp << "set xlabel 'x'\n";
    gp << "plot 'reconstruction.csv' using 1:2 with lines lw 2 title 'true source'";
    int col = 3;
    for (const auto& o : man.outcomes) {
        std::string label = o.method == "spectral_modes" ? "spectral modes" : o.method;
        gp << ", \\\n     'reconstruction.csv' using 1:" << col << " with lines dashtype 2 title '"
           << label << "'";
        ++col;
    }
    gp << "\n";
    gp << "set xlabel 't'\n";
    gp << "plot 'trace.csv' using 1:2 with lines title 'flux (clean)', \\\n"
          "     'trace.csv' using 1:3 with points pointtype 7 pointsize 0.2 title 'flux (noisy)'\n";
    gp << "unset multiplot\n";
    auto path = outdir / "plot.gp";
    csvio::write_text(path, gp.str());
    return path;
}

} // namespace fracsource::experiment
