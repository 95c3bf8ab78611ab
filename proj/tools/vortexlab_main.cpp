#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "vortexlab/experiments.hpp"
#include "vortexlab/measure.hpp"
#include "vortexlab/random_data.hpp"
#include "vortexlab/weak_norms.hpp"

namespace {

vtx::ExperimentConfig load_config(const std::string& path, const std::string& scenario,
                                  std::uint64_t seed, const std::string& out,
                                  bool seed_set, bool out_set) {
    vtx::ExperimentConfig cfg;
    if (!path.empty()) {
        cfg = vtx::ExperimentConfig::from_json_file(path);
    } else {
        cfg.scenario = scenario;
    }
    if (scenario != cfg.scenario && !scenario.empty()) cfg.scenario = scenario;
    if (seed_set) cfg.seed = seed;
    if (out_set) cfg.out_dir = out;
    cfg.validate();
    return cfg;
}

int run_and_report(const vtx::ExperimentConfig& cfg) {
    vtx::RunStatus st = vtx::run_scenario(cfg);
    if (st == vtx::RunStatus::hypothesis_failed) {
        std::cerr << "hypothesis verification failed; see manifest in " << cfg.out_dir << "\n";
        return 2;
    }
    std::cout << "done; outputs in " << cfg.out_dir << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"vortexlab: point-vortex / Gross-Pitaevskii / Euler laboratory"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    std::uint64_t seed = 1;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON configuration file");
        cmd->add_option("--seed", seed, "RNG seed");
        cmd->add_option("--out", out_dir, "output directory");
    };

    CLI::App* pv = app.add_subcommand("pv", "point-vortex dynamics");
    CLI::App* pv_run = pv->add_subcommand("run", "integrate a point-vortex system");
    add_common(pv_run);

    CLI::App* gp = app.add_subcommand("gp", "Gross-Pitaevskii evolution");
    CLI::App* gp_run = gp->add_subcommand("run", "tracked GP vs ODE experiment");
    add_common(gp_run);

    CLI::App* euler = app.add_subcommand("euler", "spectral Euler reference");
    CLI::App* euler_run = euler->add_subcommand("run", "periodic vorticity run");
    add_common(euler_run);

    CLI::App* sample = app.add_subcommand("sample", "draw admissible vortex configurations");
    add_common(sample);
    int sample_n = 16;
    double sample_M = 8.0, sample_R = 1.0;
    sample->add_option("--n", sample_n, "number of vortices");
    sample->add_option("--M", sample_M, "log-separation bound");
    sample->add_option("--R", sample_R, "ball radius parameter");

    CLI::App* norms = app.add_subcommand("norms", "weak-norm computations");
    add_common(norms);
    std::string measure_path;
    norms->add_option("--measure", measure_path, "atomic measure JSON to analyze");

    CLI::App* report = app.add_subcommand("report", "summarize a run manifest");
    std::string manifest_path;
    report->add_option("--manifest", manifest_path, "manifest.json path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        bool seed_set = false, out_set = !out_dir.empty();
        for (auto* cmd : {pv_run, gp_run, euler_run, sample, norms})
            if (cmd->count("--seed")) seed_set = true;

        if (pv_run->parsed())
            return run_and_report(load_config(config_path, "pv", seed, out_dir, seed_set, out_set));
        if (gp_run->parsed())
            return run_and_report(
                load_config(config_path, "gp_vs_ode", seed, out_dir, seed_set, out_set));
        if (euler_run->parsed())
            return run_and_report(
                load_config(config_path, "euler_suite", seed, out_dir, seed_set, out_set));
        if (sample->parsed()) {
            vtx::ExperimentConfig cfg =
                load_config(config_path, "sampler_stats", seed, out_dir, seed_set, out_set);
            if (!sample->count("--config")) {
                cfg.n = sample_n;
                cfg.M = sample_M;
                cfg.R = sample_R;
            }
            return run_and_report(cfg);
        }
        if (norms->parsed()) {
            if (!measure_path.empty()) {
                std::ifstream in(measure_path);
                if (!in) throw std::invalid_argument("cannot open " + measure_path);
                std::stringstream ss;
                ss << in.rdbuf();
                vtx::AtomicMeasure mu = vtx::AtomicMeasure::from_json(ss.str());
                nlohmann::json out{
                    {"minimal_connection", vtx::weighted_minimal_connection(mu)},
                    {"xlog", nlohmann::json::parse(vtx::xlog_distance(mu).to_json())},
                    {"wminus2",
                     nlohmann::json::parse(
                         vtx::wminus2_estimate(mu, vtx::wminus2_default_radius(mu), 64).to_json())}};
                std::cout << out.dump(2) << "\n";
                return 0;
            }
            return run_and_report(
                load_config(config_path, "norms_suite", seed, out_dir, seed_set, out_set));
        }
        if (report->parsed()) {
            std::ifstream in(manifest_path);
            if (!in) throw std::invalid_argument("cannot open " + manifest_path);
            nlohmann::json j;
            in >> j;
            std::cout << "code version : " << j.value("code_version", "?") << "\n";
            std::cout << "scenario     : " << j["config"].value("scenario", "?") << "\n";
            std::cout << "gamma        : " << j.value("gamma", 0.0) << " +- "
                      << j.value("gamma_error", 0.0) << "\n";
            std::cout << "tau_star     : " << j.value("tau_star", 0.0) << "\n";
            std::cout << "wall clock   : " << j.value("wall_clock_s", 0.0) << " s\n";
            std::cout << "status flags :";
            for (const auto& f : j.value("status_flags", std::vector<std::string>{}))
                std::cout << " [" << f << "]";
            std::cout << "\nfiles:\n";
            for (const auto& f : j["files"])
                std::cout << "  " << f.value("path", "?") << "  fnv1a64=" << f.value("fnv1a64", "?")
                          << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
