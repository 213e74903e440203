#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fracsource/inverse.hpp"

namespace fracsource::experiment {

// One experiment: generate data on the fine grid, invert on the coarse grid.
struct ExperimentConfig {
    double alpha = 0.0; // mandatory
    double beta = 0.0;  // mandatory
    double T = 1.0;
    std::string intensity = "exp2";       // exp2 = 2 e^t, sin5 = 5 sin t, custom
    std::string intensity_file;           // samples file (t,value) for custom
    std::string source_truth = "poly1";   // poly1 = x(1-x), poly2 = x^2(1-x), poly4 = x^4(1-x)
    std::string source_file;              // samples file (x,value) for custom
    double h_fine = 1e-3;
    double tau_fine = 5e-4;
    double h_coarse = 4e-3;
    double tau_coarse = 2e-3;
    double grading_exponent = 4.0;
    double delta = 0.0;
    std::uint64_t seed = 0;
    bool auto_nu = true;
    double nu = 0.0;
    int n_modes = 40;
    std::vector<std::string> methods = {"tikhonov"};
    bool allow_inverse_crime = false;

    forward::TimeFunction make_intensity() const;
    forward::SpaceFunction make_source() const;
    void validate() const;
    std::string to_json() const;
};

ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig config_from_json(const std::string& text);

struct MethodOutcome {
    std::string method;
    Eigen::VectorXd f_hat;         // coarse interior nodes
    double nu_used = 0.0;
    double residual_norm = 0.0;
    std::optional<double> error_vs_truth;
    std::string note;
};

struct RunManifest {
    ExperimentConfig config;
    std::string version;
    std::map<std::string, double> timings_seconds;
    std::vector<MethodOutcome> outcomes;
    std::vector<std::string> notes;

    // data carried for persistence
    std::vector<double> coarse_times;
    std::vector<double> phi_clean;
    std::vector<double> phi_noisy;
    std::vector<double> x_nodes; // coarse interior
    std::vector<double> f_true_nodes;
    std::string eigensystem_json;
    std::map<std::string, std::string> output_files;

    std::string to_json() const;
};

RunManifest run_experiment(const ExperimentConfig& config);

// Writes manifest.json, trace.csv, reconstruction.csv and eigensystem.json
// into outdir (created if needed); returns the manifest with file paths set.
RunManifest persist_results(RunManifest manifest, const std::filesystem::path& outdir);

// Emits plot.gp, a self-contained gnuplot script that renders the persisted
// CSVs; requires persist_results to have run into the same directory.
std::filesystem::path emit_plot_script(const RunManifest& manifest,
                                       const std::filesystem::path& outdir);

} // namespace fracsource::experiment
