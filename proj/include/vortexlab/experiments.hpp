#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vortexlab/geometry.hpp"
#include "vortexlab/measure.hpp"

namespace vtx {

inline constexpr const char* kCodeVersion = "vortexlab 0.1.0";

/// Scenario configuration parsed from JSON; validation reports every
/// offending field at once.
struct ExperimentConfig {
    std::string scenario;  // gp_vs_ode | hydrodynamic | sampler_stats | norms_suite | euler_suite
    std::string out_dir = ".";
    std::uint64_t seed = 1;

    // shared numeric knobs (validated per scenario)
    double eps = 0.04;
    int grid_n = 256;
    double half_width = 2.5;
    double T = 0.0;
    int n = 2;
    double M = 8.0;
    double R = 1.0;
    double tau_C = 1.0;  // the constant C in the tau* budget
    std::vector<int> n_ladder;
    int seeds_per_cell = 8;
    int samples = 41;
    double hypothesis_margin = 3.0;  // multiplier on the eps^(1/2) thresholds
    bool strict = false;             // margin 1
    std::string scaling = "gp";     // pv scenario: gp | mean_field
    std::optional<std::string> initial_configuration;  // JSON file for pv/gp runs

    static ExperimentConfig from_json_file(const std::string& path);
    static ExperimentConfig from_json_text(const std::string& text);
    std::string to_json() const;
    void validate() const;  // throws std::invalid_argument with all problems
};

struct ManifestFile {
    std::string path;
    std::string fnv1a64;
};

struct RunManifest {
    std::string config_echo;  // JSON text
    std::string code_version = kCodeVersion;
    double gamma = 0.0;
    double gamma_error = 0.0;
    double rho_a = 0.0;
    double R_a = 0.0;
    double tau_star = 0.0;
    double wall_clock_s = 0.0;
    std::vector<std::string> status_flags;
    std::vector<ManifestFile> files;

    std::string to_json() const;
    void add_file(const std::string& path);  // hashes the file content
    void save(const std::string& path) const;
};

/// Cached core-energy constant (computed once per process at scale 256).
double default_gamma(double* error_out = nullptr);

enum class RunStatus { ok = 0, failed = 1, hypothesis_failed = 2 };

RunStatus run_pv_experiment(const ExperimentConfig& cfg);
RunStatus run_gp_experiment(const ExperimentConfig& cfg);
RunStatus run_euler_experiment(const ExperimentConfig& cfg);
RunStatus run_sampler_stats(const ExperimentConfig& cfg);
RunStatus run_norms_suite(const ExperimentConfig& cfg);
RunStatus run_hydrodynamic(const ExperimentConfig& cfg);
RunStatus run_scenario(const ExperimentConfig& cfg);

/// Gaussian limit density of the uniform-ball construction, discretized to
/// cell atoms on a fixed grid and normalized to unit mass.
AtomicMeasure gaussian_reference_atoms(double R, double half_width = 3.0, int n_cells = 28);

/// Formats doubles with 17 significant digits (CSV convention).
std::string fmt17(double v);

}  // namespace vtx
