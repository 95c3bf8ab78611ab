#include "vortexlab/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "vortexlab/euler.hpp"
#include "vortexlab/gp_evolution.hpp"
#include "vortexlab/point_vortex.hpp"
#include "vortexlab/radial_profile.hpp"
#include "vortexlab/random_data.hpp"
#include "vortexlab/wave_field.hpp"
#include "vortexlab/weak_norms.hpp"

namespace vtx {

namespace fs = std::filesystem;

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    ExperimentConfig c;
    c.scenario = j.value("scenario", "");
    c.out_dir = j.value("out_dir", ".");
    c.seed = j.value("seed", std::uint64_t{1});
    c.eps = j.value("eps", c.eps);
    c.grid_n = j.value("grid_n", c.grid_n);
    c.half_width = j.value("half_width", c.half_width);
    c.T = j.value("T", c.T);
    c.n = j.value("n", c.n);
    c.M = j.value("M", c.M);
    c.R = j.value("R", c.R);
    c.tau_C = j.value("tau_C", c.tau_C);
    if (j.contains("n_ladder")) c.n_ladder = j.at("n_ladder").get<std::vector<int>>();
    c.seeds_per_cell = j.value("seeds_per_cell", c.seeds_per_cell);
    c.samples = j.value("samples", c.samples);
    c.hypothesis_margin = j.value("hypothesis_margin", c.hypothesis_margin);
    c.strict = j.value("strict", false);
    c.scaling = j.value("scaling", c.scaling);
    if (j.contains("initial_configuration"))
        c.initial_configuration = j.at("initial_configuration").get<std::string>();
    c.validate();
    return c;
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

std::string ExperimentConfig::to_json() const {
    nlohmann::json j{{"scenario", scenario},
                     {"out_dir", out_dir},
                     {"seed", seed},
                     {"eps", eps},
                     {"grid_n", grid_n},
                     {"half_width", half_width},
                     {"T", T},
                     {"n", n},
                     {"M", M},
                     {"R", R},
                     {"tau_C", tau_C},
                     {"n_ladder", n_ladder},
                     {"seeds_per_cell", seeds_per_cell},
                     {"samples", samples},
                     {"hypothesis_margin", hypothesis_margin},
                     {"strict", strict},
                     {"scaling", scaling}};
    if (initial_configuration) j["initial_configuration"] = *initial_configuration;
    return j.dump(2);
}

void ExperimentConfig::validate() const {
    std::vector<std::string> problems;
    const std::vector<std::string> known = {"gp_vs_ode", "hydrodynamic", "sampler_stats",
                                            "norms_suite", "euler_suite", "pv"};
    if (std::find(known.begin(), known.end(), scenario) == known.end())
        problems.push_back("scenario must be one of pv|gp_vs_ode|hydrodynamic|sampler_stats|"
                           "norms_suite|euler_suite, got '" + scenario + "'");
    if (!(eps > 0.0 && eps < 1.0)) problems.push_back("eps must lie in (0,1)");
    if (grid_n < 32) problems.push_back("grid_n must be >= 32");
    if (half_width <= 0.0) problems.push_back("half_width must be positive");
    if (T < 0.0) problems.push_back("T must be >= 0");
    if (n < 1) problems.push_back("n must be >= 1");
    if (M <= 0.0 || R <= 0.0) problems.push_back("M and R must be positive");
    if (tau_C <= 0.0) problems.push_back("tau_C must be positive");
    if (seeds_per_cell < 1) problems.push_back("seeds_per_cell must be >= 1");
    if (samples < 2) problems.push_back("samples must be >= 2");
    if (hypothesis_margin < 1.0) problems.push_back("hypothesis_margin must be >= 1");
    if (scaling != "gp" && scaling != "mean_field")
        problems.push_back("scaling must be gp or mean_field");
    if (scenario == "gp_vs_ode" && n > 4)
        problems.push_back("gp_vs_ode is desk-scale: n <= 4 at default grid sizes");
    if (scenario == "hydrodynamic" && n_ladder.empty())
        problems.push_back("hydrodynamic requires a nonempty n_ladder");
    if (!problems.empty()) {
        std::string all = "invalid configuration:";
        for (const auto& p : problems) all += "\n  - " + p;
        throw std::invalid_argument(all);
    }
}

std::string RunManifest::to_json() const {
    nlohmann::json files_j = nlohmann::json::array();
    for (const auto& f : files) files_j.push_back({{"path", f.path}, {"fnv1a64", f.fnv1a64}});
    nlohmann::json j{{"config", nlohmann::json::parse(config_echo.empty() ? "{}" : config_echo)},
                     {"code_version", code_version},
                     {"gamma", gamma},
                     {"gamma_error", gamma_error},
                     {"rho_a", rho_a},
                     {"R_a", R_a},
                     {"tau_star", tau_star},
                     {"wall_clock_s", wall_clock_s},
                     {"status_flags", status_flags},
                     {"files", files_j}};
    return j.dump(2);
}

void RunManifest::add_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("manifest: cannot hash " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    std::string bytes = ss.str();
    char hash[32];
    std::snprintf(hash, sizeof(hash), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(bytes.data(), bytes.size())));
    files.push_back({path, hash});
}

void RunManifest::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("manifest: cannot write " + path);
    out << to_json() << "\n";
}

double default_gamma(double* error_out) {
    static std::once_flag flag;
    static double value = 0.0, error = 0.0;
    std::call_once(flag, [] {
        GammaEstimate g = bbh_gamma_estimate(16.0, 5);  // ladder tops out at s = 256
        value = g.gamma;
        error = g.error_bar;
    });
    if (error_out) *error_out = error;
    return value;
}

namespace {

VortexConfiguration initial_configuration_for(const ExperimentConfig& cfg) {
    if (cfg.initial_configuration) {
        std::ifstream in(*cfg.initial_configuration);
        if (!in)
            throw std::invalid_argument("cannot open initial configuration " +
                                        *cfg.initial_configuration);
        std::stringstream ss;
        ss << in.rdbuf();
        return VortexConfiguration::from_json(ss.str());
    }
    if (cfg.n == 1) return VortexConfiguration::same_sign({{0.0, 0.0}});
    if (cfg.n == 2) return VortexConfiguration::same_sign({{0.5, 0.0}, {-0.5, 0.0}});
    // default ring of n unit-degree vortices
    std::vector<Vec2> pos;
    for (int k = 0; k < cfg.n; ++k) {
        double th = 2.0 * M_PI * k / cfg.n;
        pos.push_back({0.5 * std::cos(th), 0.5 * std::sin(th)});
    }
    return VortexConfiguration::same_sign(pos);
}

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double elapsed() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

}  // namespace

AtomicMeasure gaussian_reference_atoms(double R, double half_width, int n_cells) {
    GridMeasure g({0.0, 0.0}, half_width, n_cells);
    for (int j = 0; j < n_cells; ++j)
        for (int i = 0; i < n_cells; ++i) {
            Vec2 x = g.cell_center(i, j);
            g.at(i, j) = std::exp(-x.norm2() / (R * R)) / (M_PI * R * R);
        }
    AtomicMeasure atoms = g.to_atoms(0.0);
    double mass = atoms.total_mass();
    return atoms.scaled(1.0 / mass);
}

RunStatus run_pv_experiment(const ExperimentConfig& cfg) {
    Timer timer;
    fs::create_directories(cfg.out_dir);
    VortexConfiguration config = initial_configuration_for(cfg);
    IntegratorSettings settings;
    Scaling sc = cfg.scaling == "gp" ? Scaling::gp : Scaling::mean_field;
    double T = cfg.T > 0.0 ? cfg.T : 1.0;
    Trajectory traj = integrate(config, T, settings, sc, cfg.samples);

    std::string csv_path = cfg.out_dir + "/trajectory.csv";
    std::ofstream csv(csv_path);
    csv << "t";
    for (std::size_t v = 0; v < config.size(); ++v) csv << ",x" << v + 1 << ",y" << v + 1;
    csv << ",W,m2,rho\n";
    for (const auto& s : traj.samples) {
        csv << fmt17(s.t);
        for (const auto& p : s.positions) csv << "," << fmt17(p.x) << "," << fmt17(p.y);
        csv << "," << fmt17(s.W) << "," << fmt17(s.second_moment) << "," << fmt17(s.rho) << "\n";
    }
    csv.close();

    DriftReport drift = conserved_drift(traj);
    SeparationScales scales = separation_scales(config);
    RunManifest man;
    man.config_echo = cfg.to_json();
    man.gamma = default_gamma(&man.gamma_error);
    man.rho_a = scales.rho;
    man.R_a = scales.R;
    man.tau_star = tau_star(traj, cfg.eps, cfg.tau_C, static_cast<int>(config.size()));
    if (traj.status == TrajectoryStatus::collision_floor_hit)
        man.status_flags.push_back("collision_floor_hit");
    nlohmann::json drifts{{"W", drift.W}, {"m2", drift.second_moment}, {"center", drift.center}};
    man.status_flags.push_back("drifts=" + drifts.dump());
    man.add_file(csv_path);
    man.wall_clock_s = timer.elapsed();
    man.save(cfg.out_dir + "/manifest.json");
    return RunStatus::ok;
}

RunStatus run_gp_experiment(const ExperimentConfig& cfg) {
    Timer timer;
    fs::create_directories(cfg.out_dir);
    VortexConfiguration config = initial_configuration_for(cfg);
    double gamma_err = 0.0;
    double gamma = default_gamma(&gamma_err);

    GridSpec grid{{0.0, 0.0}, cfg.half_width, cfg.grid_n};
    WaveField u0 = assemble_initial_data(config, cfg.eps, grid, grid.spacing() < 0.5 * cfg.eps
                                                                   ? false
                                                                   : true);

    // hypothesis checks: surplus and vorticity concentration against the
    // sqrt(eps) thresholds (scaled by the configured margin)
    double margin = cfg.strict ? 1.0 : cfg.hypothesis_margin;
    double threshold = margin * std::sqrt(cfg.eps);
    LadderValue sig = surplus(u0, config, gamma);
    DensityBundle dens = local_densities(u0);
    AtomicMeasure ju = jacobian_atoms(dens.jacobian, 1e-10, 2, M_PI * config.total_degree());
    AtomicMeasure target = empirical_measure(config, MeasureConvention::pi_degrees);
    NormBracket h1 = xlog_distance(ju - target);

    RunManifest man;
    man.config_echo = cfg.to_json();
    man.gamma = gamma;
    man.gamma_error = gamma_err;
    SeparationScales scales = separation_scales(config);
    man.rho_a = scales.rho;
    man.R_a = scales.R;
    man.status_flags.push_back("surplus=" + fmt17(sig.value) + "+-" + fmt17(sig.error_bar));
    man.status_flags.push_back("vorticity_bracket_upper=" + fmt17(h1.upper));

    bool hyp_ok = sig.value <= std::sqrt(cfg.eps) + sig.error_bar && h1.upper <= threshold;
    if (!hyp_ok) {
        man.status_flags.push_back("hypothesis_verification_failed");
        man.wall_clock_s = timer.elapsed();
        man.save(cfg.out_dir + "/manifest.json");
        return RunStatus::hypothesis_failed;
    }

    // integrate to min(T, tau*) in gp time
    IntegratorSettings ode;
    Trajectory probe = integrate(config, std::max(cfg.T, 1e-3), ode, Scaling::gp, 64);
    double tstar = tau_star(probe, cfg.eps, cfg.tau_C, static_cast<int>(config.size()));
    double T = std::min(cfg.T, tstar);

    EvolutionSettings evo;
    TrackingOptions topt;
    topt.n_samples = cfg.samples;
    topt.gamma = gamma;
    TrackedEvolution run = run_tracked_evolution(u0, config, T, evo, topt);

    std::string csv_path = cfg.out_dir + "/gp_track.csv";
    std::ofstream csv(csv_path);
    csv << "t";
    for (std::size_t v = 0; v < config.size(); ++v) csv << ",xi" << v + 1 << "x,xi" << v + 1 << "y";
    csv << ",eta,sigma,bracket_lower,bracket_upper\n";
    for (const auto& s : run.samples) {
        csv << fmt17(s.t);
        for (const auto& p : s.xi) csv << "," << fmt17(p.x) << "," << fmt17(p.y);
        for (std::size_t v = s.xi.size(); v < config.size(); ++v) csv << ",nan,nan";
        csv << "," << fmt17(s.eta) << "," << fmt17(s.surplus);
        if (s.bracket_valid)
            csv << "," << fmt17(s.j_bracket.lower) << "," << fmt17(s.j_bracket.upper);
        else
            csv << ",nan,nan";
        csv << "\n";
    }
    csv.close();

    man.tau_star = tstar;
    if (run.vortex_lost) man.status_flags.push_back("vortex_lost");
    if (run.boundary_proximity) man.status_flags.push_back("boundary_proximity");
    man.status_flags.push_back("sup_xi_err=" + fmt17(run.sup_xi_err));
    man.add_file(csv_path);
    man.wall_clock_s = timer.elapsed();
    man.save(cfg.out_dir + "/manifest.json");
    return RunStatus::ok;
}

RunStatus run_euler_experiment(const ExperimentConfig& cfg) {
    Timer timer;
    fs::create_directories(cfg.out_dir);
    int n = cfg.grid_n;
    if (n < 128 || (n & (n - 1)) != 0)
        throw std::invalid_argument("euler_suite: grid_n must be a power of two >= 128");
    GridMeasure init({cfg.half_width, cfg.half_width}, cfg.half_width, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            Vec2 x = init.cell_center(i, j) - Vec2{cfg.half_width, cfg.half_width};
            init.at(i, j) = std::exp(-x.norm2());
        }
    double T = cfg.T > 0.0 ? cfg.T : 5.0;
    std::vector<EulerState> states = run_euler(init, T, cfg.samples);

    std::string csv_path = cfg.out_dir + "/euler.csv";
    std::ofstream csv(csv_path);
    csv << "t,integral,enstrophy,l2_change_from_initial\n";
    const EulerState& first = states.front();
    for (const auto& st : states) {
        double diff2 = 0.0, base2 = 0.0;
        for (std::size_t k = 0; k < st.omega.size(); ++k) {
            double d = st.omega[k] - first.omega[k];
            diff2 += d * d;
            base2 += first.omega[k] * first.omega[k];
        }
        csv << fmt17(st.time) << "," << fmt17(st.integral()) << "," << fmt17(st.enstrophy()) << ","
            << fmt17(std::sqrt(diff2 / base2)) << "\n";
    }
    csv.close();

    RunManifest man;
    man.config_echo = cfg.to_json();
    man.gamma = default_gamma(&man.gamma_error);
    man.add_file(csv_path);
    man.wall_clock_s = timer.elapsed();
    man.save(cfg.out_dir + "/manifest.json");
    return RunStatus::ok;
}

RunStatus run_sampler_stats(const ExperimentConfig& cfg) {
    Timer timer;
    fs::create_directories(cfg.out_dir);
    SampleBatch batch = sample_admissible(cfg.n, cfg.M, cfg.R, cfg.seed, 10000);
    std::string jsonl_path = cfg.out_dir + "/samples.jsonl";
    std::ofstream jl(jsonl_path);
    jl << batch.to_jsonl();
    jl.close();

    // radial law and second moment diagnostics on raw uniform-ball draws
    long probes = 20000;
    double m2_mean = 0.0;
    for (long s = 0; s < probes; ++s) {
        VortexConfiguration c = sample_uniform_ball(cfg.n, cfg.R, cfg.seed + 17,
                                                    static_cast<std::uint64_t>(s) + 1);
        double m2 = 0.0;
        for (const auto& p : c.positions()) m2 += p.norm2();
        m2_mean += m2 / cfg.n;
    }
    m2_mean /= probes;

    RunManifest man;
    man.config_echo = cfg.to_json();
    man.gamma = default_gamma(&man.gamma_error);
    man.status_flags.push_back("acceptance_rate=" + fmt17(batch.acceptance_rate()));
    man.status_flags.push_back("per_vortex_second_moment=" + fmt17(m2_mean));
    man.status_flags.push_back("second_moment_law=" +
                               fmt17(cfg.R * cfg.R * cfg.n / (cfg.n + 1.0)));
    man.add_file(jsonl_path);
    man.wall_clock_s = timer.elapsed();
    man.save(cfg.out_dir + "/manifest.json");
    return RunStatus::ok;
}

RunStatus run_norms_suite(const ExperimentConfig& cfg) {
    Timer timer;
    fs::create_directories(cfg.out_dir);
    // demonstration sweep over random balanced pairs
    nlohmann::json results = nlohmann::json::array();
    for (int k = 0; k < cfg.samples; ++k) {
        VortexConfiguration plus = sample_uniform_ball(cfg.n, cfg.R, cfg.seed, 2 * k + 1);
        VortexConfiguration minus = sample_uniform_ball(cfg.n, cfg.R, cfg.seed, 2 * k + 2);
        AtomicMeasure mu;
        for (const auto& p : plus.positions()) mu.add(p, 1.0 / cfg.n);
        for (const auto& p : minus.positions()) mu.add(p, -1.0 / cfg.n);
        NormBracket xb = xlog_distance(mu);
        double w11 = minimal_connection(mu);
        NormBracket w2 = wminus2_estimate(mu, wminus2_default_radius(mu), 64);
        results.push_back({{"xlog", nlohmann::json::parse(xb.to_json())},
                           {"w11", w11},
                           {"wminus2", nlohmann::json::parse(w2.to_json())}});
    }
    std::string path = cfg.out_dir + "/norms.json";
    std::ofstream out(path);
    out << results.dump(2) << "\n";
    out.close();
    RunManifest man;
    man.config_echo = cfg.to_json();
    man.gamma = default_gamma(&man.gamma_error);
    man.add_file(path);
    man.wall_clock_s = timer.elapsed();
    man.save(cfg.out_dir + "/manifest.json");
    return RunStatus::ok;
}

RunStatus run_hydrodynamic(const ExperimentConfig& cfg) {
    Timer timer;
    fs::create_directories(cfg.out_dir);
    AtomicMeasure gauss = gaussian_reference_atoms(cfg.R);
    double T = cfg.T > 0.0 ? cfg.T : 1.0;

    std::string csv_path = cfg.out_dir + "/hydro.csv";
    std::ofstream csv(csv_path);
    csv << "n,seed,dist_t0,dist_t1\n";
    IntegratorSettings ode;
    ode.rel_tol = 1e-6;
    ode.abs_tol = 1e-9;

    for (int n : cfg.n_ladder) {
        for (int s = 0; s < cfg.seeds_per_cell; ++s) {
            std::uint64_t seed = cfg.seed + 1000003ULL * static_cast<std::uint64_t>(s);
            SampleBatch batch = sample_admissible(n, cfg.M, cfg.R, seed, 4000, 1);
            const VortexConfiguration& start = batch.samples.front();
            Trajectory traj = integrate(start, T, ode, Scaling::mean_field, 2);
            AtomicMeasure at0 = empirical_measure(start);
            AtomicMeasure at1 = empirical_measure(traj.configuration_at(traj.samples.size() - 1));
            double d0 = xlog_transport_upper(at0 - gauss);
            double d1 = xlog_transport_upper(at1 - gauss);
            csv << n << "," << s << "," << fmt17(d0) << "," << fmt17(d1) << "\n";
        }
    }
    csv.close();
    RunManifest man;
    man.config_echo = cfg.to_json();
    man.gamma = default_gamma(&man.gamma_error);
    man.add_file(csv_path);
    man.wall_clock_s = timer.elapsed();
    man.save(cfg.out_dir + "/manifest.json");
    return RunStatus::ok;
}

RunStatus run_scenario(const ExperimentConfig& cfg) {
    if (cfg.scenario == "pv") return run_pv_experiment(cfg);
    if (cfg.scenario == "gp_vs_ode") return run_gp_experiment(cfg);
    if (cfg.scenario == "hydrodynamic") return run_hydrodynamic(cfg);
    if (cfg.scenario == "sampler_stats") return run_sampler_stats(cfg);
    if (cfg.scenario == "norms_suite") return run_norms_suite(cfg);
    if (cfg.scenario == "euler_suite") return run_euler_experiment(cfg);
    throw std::invalid_argument("unknown scenario " + cfg.scenario);
}

}  // namespace vtx
