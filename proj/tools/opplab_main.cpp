#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "opplab/expansion.hpp"
#include "opplab/experiments.hpp"
#include "opplab/grammar.hpp"
#include "opplab/rng.hpp"
#include "opplab/suite.hpp"

namespace {

using namespace opplab;

std::map<std::string, std::string> load_config(const std::string& path) {
    std::map<std::string, std::string> kv;
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file: " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        auto e = line.find_last_not_of(" \t\r");
        line = line.substr(b, e - b + 1);
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key=value");
        kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return kv;
}

struct CommonArgs {
    std::string scheme = "luroth";
    std::string weights;
    std::string plan;
    std::string ngrid = "1000,10000";
    std::string eps = "0.05,0.1,0.2";
    std::string x;
    std::string pairs;
    std::string t;
    std::string out = "out";
    std::uint64_t seed = 1;
    std::int64_t reps = 100;
    std::int64_t samples = 1000000;
    std::int64_t index = 1;
    std::int64_t steps = 20;
    bool general = false;
};

std::vector<std::pair<double, double>> parse_pairs(const std::string& text) {
    std::vector<std::pair<double, double>> out;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ';')) {
        auto vals = grammar::parse_real_list(part);
        if (vals.size() != 2) throw ConfigError("each pair needs two values: '" + part + "'");
        out.emplace_back(vals[0], vals[1]);
    }
    return out;
}

ExperimentConfig build_config(const CommonArgs& a, Mode mode) {
    ExperimentConfig cfg;
    cfg.scheme = grammar::parse_scheme(a.scheme);
    if (!a.weights.empty()) cfg.weights = grammar::parse_weights(a.weights, &cfg.scheme.dist);
    if (!a.plan.empty()) cfg.plan = grammar::parse_plan(a.plan);
    cfg.n_grid = grammar::parse_index_list(a.ngrid);
    cfg.epsilons = grammar::parse_real_list(a.eps);
    cfg.replications = a.reps;
    cfg.base_seed = a.seed;
    cfg.n_samples = a.samples;
    cfg.target_index = a.index;
    cfg.mode = mode;
    if (!a.x.empty()) cfg.x_grid = grammar::parse_real_list(a.x);
    if (!a.pairs.empty()) cfg.pairs = parse_pairs(a.pairs);
    if (!a.t.empty()) cfg.t_vector = grammar::parse_real_list(a.t);
    return cfg;
}

std::string manifest_text(const CommonArgs& a, const std::string& subcommand) {
    std::ostringstream os;
    os << "subcommand=" << subcommand << "\n"
       << "scheme=" << a.scheme << "\n";
    if (!a.weights.empty()) os << "weights=" << a.weights << "\n";
    if (!a.plan.empty()) os << "plan=" << a.plan << "\n";
    os << "ngrid=" << a.ngrid << "\n"
       << "eps=" << a.eps << "\n"
       << "seed=" << a.seed << "\n"
       << "reps=" << a.reps << "\n"
       << "samples=" << a.samples << "\n"
       << "index=" << a.index << "\n";
    if (!a.x.empty()) os << "x=" << a.x << "\n";
    if (!a.pairs.empty()) os << "pairs=" << a.pairs << "\n";
    if (!a.t.empty()) os << "t=" << a.t << "\n";
    return os.str();
}

int finish(const CommonArgs& a, const std::string& subcommand, const ExperimentResult& res) {
    suite::write_experiment(a.out, res, manifest_text(a, subcommand));
    std::cout << res.summary();
    return res.all_pass() ? 0 : 1;
}

int run_simulate(const CommonArgs& a) {
    auto scheme = grammar::parse_scheme(a.scheme);
    RngStream stream(a.seed, 0, Purpose::Simulate);
    Trajectory traj = simulate(scheme, a.steps, stream, true);

    std::filesystem::create_directories(a.out);
    std::ofstream csv(std::filesystem::path(a.out) / "result.csv", std::ios::binary);
    csv << "step,B,Y,R,U,overflow\n";
    char buf[160];
    for (std::size_t i = 0; i < traj.ratios.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,%.17g,%.17g,%d\n", i + 1,
                      traj.digits[i + 1], traj.y_values[i], traj.ratios[i], traj.draws[i],
                      traj.overflow[i + 1] ? 1 : 0);
        csv << buf;
    }
    std::ofstream summary(std::filesystem::path(a.out) / "summary.txt", std::ios::binary);
    summary << "label=simulate\nscheme=" << scheme.name << "\nsteps=" << a.steps
            << "\nresult: PASS (report only, no assertions)\n";
    std::ofstream manifest(std::filesystem::path(a.out) / "manifest.txt", std::ios::binary);
    manifest << manifest_text(a, "simulate") << "steps=" << a.steps << "\n";
    std::cout << "wrote " << traj.ratios.size() << " steps to " << a.out << "/result.csv\n";
    return 0;
}

int run_suite_cmd(const CommonArgs& a) {
    auto sr = suite::run_acceptance(a.seed, a.out);
    std::filesystem::create_directories(a.out);
    std::ofstream summary(std::filesystem::path(a.out) / "summary.txt", std::ios::binary);
    summary << sr.report();
    std::cout << sr.report();
    return sr.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"opplab: Oppenheim-expansion digit chain simulation and law-of-large-numbers "
                 "verification"};
    app.require_subcommand(1);

    // --config provides defaults from a flat key=value file; flags override.
    std::map<std::string, std::string> file_cfg;
    std::vector<std::string> args(argv + 1, argv + argc);
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            try {
                file_cfg = load_config(args[i + 1]);
            } catch (const std::exception& e) {
                std::cerr << "config error: " << e.what() << "\n";
                return 2;
            }
        }
    }

    CommonArgs a;
    auto from_cfg = [&](const std::string& key, auto& slot) {
        auto it = file_cfg.find(key);
        if (it == file_cfg.end()) return;
        std::istringstream is(it->second);
        is >> slot;
        if (is.fail()) {
            throw ConfigError("config value for '" + key + "' unparsable: " + it->second);
        }
    };
    try {
        from_cfg("scheme", a.scheme);
        from_cfg("weights", a.weights);
        from_cfg("plan", a.plan);
        from_cfg("ngrid", a.ngrid);
        from_cfg("eps", a.eps);
        from_cfg("x", a.x);
        from_cfg("pairs", a.pairs);
        from_cfg("t", a.t);
        from_cfg("out", a.out);
        from_cfg("seed", a.seed);
        from_cfg("reps", a.reps);
        from_cfg("samples", a.samples);
        from_cfg("index", a.index);
        from_cfg("steps", a.steps);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }

    std::string config_path;
    app.add_option("--config", config_path, "flat key=value config file; flags override");

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "flat key=value config file; flags override");
        cmd->add_option("--scheme", a.scheme, "scheme grammar or 'luroth'");
        cmd->add_option("--weights", a.weights, "weight grammar, e.g. a=1/k,b=log^2(n)");
        cmd->add_option("--plan", a.plan, "truncation plan, e.g. trunc.b=2,gamma=1.2");
        cmd->add_option("--ngrid", a.ngrid, "comma-separated trajectory lengths");
        cmd->add_option("--eps", a.eps, "comma-separated exceedance epsilons");
        cmd->add_option("--x", a.x, "comma-separated tail thresholds");
        cmd->add_option("--pairs", a.pairs, "semicolon-separated x,y pairs, e.g. 2,3;3,5");
        cmd->add_option("--t", a.t, "comma-separated CF arguments");
        cmd->add_option("--out", a.out, "output directory");
        cmd->add_option("--seed", a.seed, "base seed");
        cmd->add_option("--reps", a.reps, "replications");
        cmd->add_option("--samples", a.samples, "Monte Carlo sample count");
        cmd->add_option("--index", a.index, "which R_n the validators observe");
        cmd->add_option("--steps", a.steps, "trajectory length for simulate");
        cmd->add_flag("--general", a.general, "general strong law (S_n = n^-gamma sum R_k/k)");
    };

    auto* c_sim = app.add_subcommand("simulate", "dump one trajectory as CSV");
    auto* c_weak = app.add_subcommand("weaklaw", "weak-law replication experiment");
    auto* c_strong = app.add_subcommand("stronglaw", "strong-law long-trajectory experiment");
    auto* c_tails = app.add_subcommand("validate-tails", "MC tails vs sandwich and exact oracle");
    auto* c_indep = app.add_subcommand("validate-indep", "joint exceedance factorization check");
    auto* c_cf = app.add_subcommand("validate-cf", "characteristic-function distance bound");
    auto* c_teq = app.add_subcommand("validate-tailequiv", "uniform tail-equivalence ratios");
    auto* c_trunc = app.add_subcommand("trunc-diagnostic", "truncated centered-sum diagnostic");
    auto* c_suite = app.add_subcommand("suite", "full acceptance battery");
    for (auto* cmd : {c_sim, c_weak, c_strong, c_tails, c_indep, c_cf, c_teq, c_trunc, c_suite})
        add_common(cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (c_sim->parsed()) return run_simulate(a);
        if (c_weak->parsed())
            return finish(a, "weaklaw", run_weak_law(build_config(a, Mode::WeakLaw)));
        if (c_strong->parsed()) {
            Mode m = a.general ? Mode::StrongLawGeneral : Mode::StrongLawExact;
            return finish(a, "stronglaw", run_strong_law(build_config(a, m)));
        }
        if (c_tails->parsed()) {
            auto cfg = build_config(a, Mode::TailValidate);
            if (cfg.x_grid.empty()) cfg.x_grid = {1.5, 2.0, 5.0, 10.0};
            return finish(a, "validate-tails", validate_tails(cfg));
        }
        if (c_indep->parsed()) {
            auto cfg = build_config(a, Mode::IndepValidate);
            if (cfg.pairs.empty()) cfg.pairs = {{2.0, 3.0}, {3.0, 5.0}};
            return finish(a, "validate-indep", validate_independence(cfg));
        }
        if (c_cf->parsed()) {
            auto cfg = build_config(a, Mode::CFValidate);
            if (cfg.t_vector.empty()) cfg.t_vector = {0.05, -0.03};
            return finish(a, "validate-cf", validate_cf(cfg));
        }
        if (c_teq->parsed()) {
            auto cfg = build_config(a, Mode::TailEquivValidate);
            if (cfg.x_grid.empty()) cfg.x_grid = {1.0, 2.0, 10.0, 100.0, 100.5};
            return finish(a, "validate-tailequiv", validate_tail_equivalence(cfg));
        }
        if (c_trunc->parsed()) {
            auto cfg = build_config(a, Mode::TruncDiagnostic);
            if (a.plan.empty()) cfg.plan = TruncationPlan{2.0, 0.75};
            return finish(a, "trunc-diagnostic", trunc_diagnostic(cfg));
        }
        if (c_suite->parsed()) return run_suite_cmd(a);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
