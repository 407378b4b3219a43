// Command-line front end: `run` for one experiment, `sweep` for a theta list
// sharing the reference solves, `gamma` for the vanishing-corruption schedule.
// Exit codes: 0 ok, 2 bad config / I/O, 3 solver non-convergence under --strict.
#include "CLI11.hpp"

#include "rockrelax/experiments.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace {

using rockrelax::ExampleKind;
using rockrelax::ExperimentConfig;
using rockrelax::ExperimentResult;
using rockrelax::GammaRow;
using rockrelax::GammaScheduleEntry;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double to_real(const std::string& key, const std::string& v) {
    std::size_t used = 0;
    double x = 0.0;
    try {
        x = std::stod(v, &used);
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': cannot parse '" + v + "' as a real");
    }
    if (used != v.size())
        throw ConfigError("config key '" + key + "': trailing junk in '" + v + "'");
    return x;
}

int to_int(const std::string& key, const std::string& v) {
    std::size_t used = 0;
    int x = 0;
    try {
        x = std::stoi(v, &used);
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': cannot parse '" + v + "' as an integer");
    }
    if (used != v.size())
        throw ConfigError("config key '" + key + "': trailing junk in '" + v + "'");
    return x;
}

// Flat key = value file; '#' starts a comment, blank lines skipped.
std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string body = trim(line);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(body.substr(0, eq));
        const std::string val = trim(body.substr(eq + 1));
        if (key.empty() || val.empty())
            throw ConfigError(path + ":" + std::to_string(lineno) + ": empty key or value");
        if (!kv.emplace(key, val).second)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": duplicate key " + key);
    }
    return kv;
}

void apply_key(ExperimentConfig& cfg, const std::string& key, const std::string& val) {
    if (key == "example")
        cfg.example = rockrelax::parse_example(val);
    else if (key == "corruption")
        cfg.corruption = to_real(key, val);
    else if (key == "theta")
        cfg.theta = to_real(key, val);
    else if (key == "seed")
        cfg.seed = static_cast<unsigned>(to_int(key, val));
    else if (key == "grid_cells")
        cfg.grid_cells = to_int(key, val);
    else if (key == "mesh_dof")
        cfg.mesh_dof = to_int(key, val);
    else if (key == "n_xi")
        cfg.n_xi = to_int(key, val);
    else if (key == "n_samples")
        cfg.n_samples = to_int(key, val);
    else if (key == "kkl_terms")
        cfg.kkl_terms = to_int(key, val);
    else if (key == "sigma")
        cfg.sigma = to_real(key, val);
    else if (key == "alpha")
        cfg.alpha = to_real(key, val);
    else if (key == "plain_tol")
        cfg.plain_tol = to_real(key, val);
    else if (key == "plain_max_iter")
        cfg.plain_max_iter = to_int(key, val);
    else if (key == "joint_tol")
        cfg.joint_tol = to_real(key, val);
    else if (key == "joint_max_iter")
        cfg.joint_max_iter = to_int(key, val);
    else if (key == "z_gtol")
        cfg.z_gtol = to_real(key, val);
    else if (key == "z_max_iter")
        cfg.z_max_iter = to_int(key, val);
    else if (key == "t_tol")
        cfg.t_tol = to_real(key, val);
    else if (key == "max_outer")
        cfg.max_outer = to_int(key, val);
    else if (key == "t_inner_tol")
        cfg.t_inner_tol = to_real(key, val);
    else if (key == "t_max_iter")
        cfg.t_max_iter = to_int(key, val);
    else if (key == "output_dir")
        cfg.output_dir = val;
    else
        throw ConfigError("unknown config key '" + key + "'");
}

// Flags shared by the subcommands; counts tell us later which ones the user
// actually set, so they override file keys without clobbering defaults.
struct CliArgs {
    std::string example;
    double corruption = 0.0;
    double theta = 0.0;
    int seed = 0;
    std::string out;
    std::string config;
    bool strict = false;

    CLI::Option* o_example = nullptr;
    CLI::Option* o_corruption = nullptr;
    CLI::Option* o_theta = nullptr;
    CLI::Option* o_seed = nullptr;
    CLI::Option* o_out = nullptr;
};

void add_common(CLI::App* cmd, CliArgs& a) {
    a.o_example = cmd->add_option("--example", a.example,
                                  "which experiment: motivating, ex1, ex2 or ex3");
    a.o_corruption = cmd->add_option("--corruption", a.corruption,
                                     "corruption level (fraction or window half-width)");
    a.o_theta = cmd->add_option("--theta", a.theta, "relaxation penalty weight");
    a.o_seed = cmd->add_option("--seed", a.seed, "sample RNG seed (ex2)");
    a.o_out = cmd->add_option("--out", a.out, "directory for the CSV outputs");
    cmd->add_option("--config", a.config, "flat key = value config file; flags override");
    cmd->add_flag("--strict", a.strict, "exit 3 when any solve stops without converging");
}

ExperimentConfig build_config(const CliArgs& a) {
    std::map<std::string, std::string> kv;
    if (!a.config.empty()) kv = read_config_file(a.config);

    std::string example = a.o_example->count() ? a.example : std::string();
    if (example.empty()) {
        auto it = kv.find("example");
        if (it != kv.end()) example = it->second;
    }
    if (example.empty())
        throw ConfigError("no example selected: pass --example or an 'example' config key");

    ExperimentConfig cfg = rockrelax::make_default_config(rockrelax::parse_example(example));
    for (const auto& [key, val] : kv)
        if (key != "example") apply_key(cfg, key, val);

    if (a.o_corruption->count()) cfg.corruption = a.corruption;
    if (a.o_theta->count()) cfg.theta = a.theta;
    if (a.o_seed->count()) cfg.seed = static_cast<unsigned>(a.seed);
    if (a.o_out->count()) cfg.output_dir = a.out;
    cfg.validate();
    return cfg;
}

// "eps:theta,eps:theta,..." -> schedule entries
std::vector<GammaScheduleEntry> parse_schedule(const std::string& text) {
    std::vector<GammaScheduleEntry> entries;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos)
            throw ConfigError("schedule entry '" + item + "': expected eps:theta");
        GammaScheduleEntry e;
        e.eps = to_real("schedule eps", trim(item.substr(0, colon)));
        e.theta = to_real("schedule theta", trim(item.substr(colon + 1)));
        entries.push_back(e);
    }
    if (entries.empty()) throw ConfigError("empty schedule");
    return entries;
}

bool run_converged(const ExperimentResult& r) {
    using rockrelax::StopReason;
    return r.metrics.rock_converged &&
           r.metrics.true_report.termination_reason == StopReason::tolerance &&
           r.metrics.corrupted_report.termination_reason == StopReason::tolerance;
}

void print_metrics(const ExperimentResult& r) {
    const rockrelax::MetricsReport& m = r.metrics;
    std::printf("example=%s corruption=%g theta=%g seed=%u\n",
                rockrelax::to_string(r.config.example), r.config.corruption, r.config.theta,
                r.config.seed);
    std::printf("  e_rel_rock=%.6g e_rel_corrupted=%.6g e_ratio=%.6g", m.e_rel_rock,
                m.e_rel_corrupted, m.e_ratio);
    if (r.config.example == ExampleKind::ex3) std::printf(" v_ratio=%.6g", m.v_ratio);
    std::printf("\n");
    if (m.corrupted_deleted.total > 0 || m.clean_deleted.total > 0)
        std::printf("  deleted: corrupted %d/%d, clean %d/%d\n", m.corrupted_deleted.count,
                    m.corrupted_deleted.total, m.clean_deleted.count, m.clean_deleted.total);
    std::printf("  relaxed solve: %s after %d outer / %lld inner iterations\n",
                m.rock_stop.c_str(), m.rock_outer_iterations, m.rock_inner_iterations);
}

int cmd_run(const CliArgs& a) {
    const ExperimentConfig cfg = build_config(a);
    const ExperimentResult res = rockrelax::run_example(cfg);
    print_metrics(res);
    if (!cfg.output_dir.empty())
        std::printf("wrote CSV outputs to %s\n", cfg.output_dir.c_str());
    if (a.strict && !run_converged(res)) {
        std::fprintf(stderr, "strict: a solver stopped without converging\n");
        return 3;
    }
    return 0;
}

int cmd_sweep(const CliArgs& a, const std::vector<double>& thetas) {
    const ExperimentConfig cfg = build_config(a);
    const std::vector<ExperimentResult> rows = rockrelax::theta_sweep(cfg, thetas);
    for (const ExperimentResult& r : rows) print_metrics(r);
    if (!cfg.output_dir.empty())
        std::printf("wrote metrics.csv to %s\n", cfg.output_dir.c_str());
    if (a.strict)
        for (const ExperimentResult& r : rows)
            if (!run_converged(r)) {
                std::fprintf(stderr, "strict: a solver stopped without converging at theta=%g\n",
                             r.config.theta);
                return 3;
            }
    return 0;
}

int cmd_gamma(const CliArgs& a, const std::string& schedule_text) {
    const ExperimentConfig cfg = build_config(a);
    const std::vector<GammaScheduleEntry> schedule =
        schedule_text.empty() ? rockrelax::default_gamma_schedule(6)
                              : parse_schedule(schedule_text);
    const std::vector<GammaRow> rows = rockrelax::gamma_schedule_study(cfg, schedule);
    std::printf("k eps theta distance\n");
    for (const GammaRow& r : rows)
        std::printf("%d %.6g %.6g %.6g\n", r.k, r.eps, r.theta, r.distance);
    if (!cfg.output_dir.empty())
        std::printf("wrote gamma_schedule.csv to %s\n", cfg.output_dir.c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Rockafellian relaxation experiments"};
    app.require_subcommand(1);

    CliArgs run_args, sweep_args, gamma_args;
    std::vector<double> thetas;
    std::string schedule_text;

    CLI::App* run = app.add_subcommand("run", "one experiment, full CSV output");
    add_common(run, run_args);

    CLI::App* sweep = app.add_subcommand("sweep", "metrics across a list of thetas");
    add_common(sweep, sweep_args);
    sweep->add_option("--thetas", thetas, "comma-separated theta values")
        ->required()
        ->delimiter(',');

    CLI::App* gamma = app.add_subcommand("gamma", "vanishing-corruption schedule study");
    add_common(gamma, gamma_args);
    gamma->add_option("--schedule", schedule_text,
                      "eps:theta[,eps:theta...]; default 2^-k with theta = eps^-1/2, k = 1..6");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2; // help/version exit clean, everything else is usage
    }

    try {
        if (run->parsed()) return cmd_run(run_args);
        if (sweep->parsed()) return cmd_sweep(sweep_args, thetas);
        return cmd_gamma(gamma_args, schedule_text);
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
