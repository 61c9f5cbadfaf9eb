// fppc: command-line front end for the simulators and the sweep harness.
//
// Exit codes: 0 success, 2 validation error, 3 partial failure.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fppc/engine/world.hpp"
#include "fppc/harness/sweep.hpp"
#include "fppc/model/errors.hpp"

namespace {

using namespace fppc;

constexpr int kExitValidation = 2;
constexpr int kExitPartial = 3;

struct CommonFlags {
    std::optional<std::uint64_t> seed;
    std::optional<int> trials;
    std::optional<int> workers;
    std::optional<std::string> out;
    std::optional<std::string> config;
    std::optional<std::string> caps;
};

void add_common(CLI::App* app, CommonFlags& f)
{
    app->add_option("--seed", f.seed, "master seed");
    app->add_option("--trials", f.trials, "trials per cell");
    app->add_option("--workers", f.workers, "worker threads");
    app->add_option("--out", f.out, "output CSV (stdout when omitted)");
    app->add_option("--config", f.config, "key=value config file; flags override it");
    app->add_option("--caps", f.caps, "resource caps: sites=N,events=N,horizon=T");
}

void apply_common(SweepSpec& s, const CommonFlags& f)
{
    if (f.seed) s.master_seed = *f.seed;
    if (f.trials) s.trials = *f.trials;
    if (f.workers) s.workers = *f.workers;
    if (f.out) s.out = *f.out;
    if (f.caps) s.caps = parse_caps(*f.caps);
}

SweepSpec base_spec(const CommonFlags& f, const std::string& experiment)
{
    SweepSpec s;
    if (f.config) {
        ConfigEntries entries = read_config_file(*f.config);
        bool has_experiment = false;
        for (const auto& [k, v] : entries) has_experiment = has_experiment || k == "experiment";
        if (!has_experiment && !experiment.empty()) entries.emplace_back("experiment", experiment);
        s = sweep_from_config(entries);
        if (!experiment.empty() && s.experiment != experiment)
            throw ConfigError("config names experiment '" + s.experiment + "' but the subcommand is '" +
                              experiment + "'");
    }
    if (!experiment.empty()) s.experiment = experiment;
    apply_common(s, f);
    return s;
}

int execute(const SweepSpec& spec)
{
    SweepResult res = run_sweep(spec, &std::cerr);
    if (spec.out.empty()) {
        std::cout << csv_line(res.header);
        for (const auto& row : res.rows) std::cout << csv_line(row);
        std::cout.flush();
    }
    if (res.failed_cells > 0)
        std::cerr << res.failed_cells << " of " << res.rows.size() << " cells failed\n";
    return res.exit_code();
}

// ---------------------------------------------------------------------------
// simulate: one trial with an event trace
// ---------------------------------------------------------------------------

const char* kind_name(EventKind k)
{
    switch (k) {
    case EventKind::Convert: return "convert";
    case EventKind::Arrive2: return "arrive2";
    case EventKind::Arrive1: return "arrive1";
    }
    return "?";
}

struct SimulateArgs {
    std::string topology = "lattice";
    int d = 2;
    double lambda = 1.0;
    double rho = 0.1;
    int R = 10;
    std::string mode = "static";
    int tube = 0;
    std::uint64_t trial = 0;
    std::uint64_t trace_limit = 200;
};

template <class Topo>
TrialOutcome trace_trial(const ModelParams& p, const RandomField& field, const SimulateArgs& a,
                         const Caps& caps, std::ostream& trace)
{
    EngineOptions opts;
    opts.tube_generations = a.tube;
    World<Topo> w(p, field, a.R, caps, opts);
    trace << "step,time,kind,source,target,distance,effect,resampled\n";
    std::uint64_t n = 0;
    while (n < a.trace_limit && !w.stopping_verdict()) {
        EventEffect e = w.step();
        int dist = e.event.target < w.node_count() ? w.topology().distance(e.event.target) : -1;
        trace << n << ',' << format_real(e.event.time) << ',' << kind_name(e.event.kind) << ','
              << static_cast<long long>(e.event.source == kNoNode ? -1 : e.event.source) << ','
              << e.event.target << ',' << dist << ',' << to_string(e.effect) << ','
              << (e.event.resampled ? 1 : 0) << '\n';
        ++n;
    }
    return w.run();
}

int simulate(const SimulateArgs& a, const CommonFlags& f)
{
    if (f.config) throw ConfigError("simulate takes its parameters as flags only");
    if (a.topology != "tree" && a.topology != "lattice")
        throw ConfigError("topology must be tree or lattice");
    if (a.mode != "static" && a.mode != "resample")
        throw ConfigError("mode must be static or resample");
    ModelParams p = a.topology == "tree" ? ModelParams::tree(a.d, a.lambda, a.rho)
                                         : ModelParams::lattice(a.d, a.lambda, a.rho);
    if (a.mode == "resample") p.clock_mode = ClockMode::Resample;
    p.validate();
    if (a.R < 0) throw ConfigError("R must be nonnegative");
    Caps caps = f.caps ? parse_caps(*f.caps) : Caps{};
    std::uint64_t seed = f.seed.value_or(1);
    int trials = f.trials.value_or(1);
    if (trials < 1) throw ConfigError("trials must be >= 1");

    std::unique_ptr<std::ofstream> file;
    if (f.out) {
        file = std::make_unique<std::ofstream>(*f.out);
        if (!*file) throw ConfigError("cannot write " + *f.out);
    }
    std::ostream& trace = file ? *file : std::cout;

    for (int t = 0; t < trials; ++t) {
        RandomField field(p, seed, a.trial + static_cast<std::uint64_t>(t));
        SimulateArgs at = a;
        if (t > 0) at.trace_limit = 0;
        std::ostringstream sink;  // later trials print their outcome only
        std::ostream& tr = t == 0 ? trace : sink;
        TrialOutcome o = p.topology == Topology::Tree
                             ? trace_trial<TreeTopology>(p, field, at, caps, tr)
                             : trace_trial<LatticeTopology>(p, field, at, caps, tr);
        std::cerr << "trial " << a.trial + t << ": " << to_string(o.verdict)
                  << " stop_time=" << format_real(o.stop_time) << " max_distance=" << o.max_distance
                  << " events=" << o.events_processed << " conversions=" << o.conversions
                  << (o.approximate ? " approximate" : "") << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Competing first passage percolation with conversion: simulators and sweeps"};
    app.require_subcommand(1);

    // One CommonFlags per subcommand keeps their defaults independent.
    std::map<std::string, CommonFlags> common;
    std::map<std::string, std::map<std::string, std::vector<std::string>>> grid_values;
    std::string chosen;

    SimulateArgs sim;
    {
        auto* cmd = app.add_subcommand("simulate", "run single trials and print the event trace");
        add_common(cmd, common["simulate"]);
        cmd->add_option("--topology", sim.topology, "tree or lattice")->capture_default_str();
        cmd->add_option("--d", sim.d, "tree degree or lattice dimension")->capture_default_str();
        cmd->add_option("--lambda", sim.lambda, "type-2 rate")->capture_default_str();
        cmd->add_option("--rho", sim.rho, "conversion rate")->capture_default_str();
        cmd->add_option("--R", sim.R, "target radius or depth")->capture_default_str();
        cmd->add_option("--mode", sim.mode, "static or resample")->capture_default_str();
        cmd->add_option("--tube", sim.tube, "tree frontier-tube depth")->capture_default_str();
        cmd->add_option("--trial", sim.trial, "first trial index")->capture_default_str();
        cmd->add_option("--trace-limit", sim.trace_limit, "events traced for the first trial")
            ->capture_default_str();
        cmd->callback([&] { chosen = "simulate"; });
    }

    std::vector<std::string> set_args;
    std::string experiment_flag;
    {
        auto* cmd = app.add_subcommand("sweep", "run a parameter grid from a config file");
        add_common(cmd, common["sweep"]);
        cmd->add_option("--experiment", experiment_flag, "experiment (overrides the config)");
        cmd->add_option("--set", set_args, "grid entry key=v1,v2,... (repeatable)");
        cmd->callback([&] { chosen = "sweep"; });
    }

    // Experiment subcommands; coupling and truncation are extras beyond the
    // documented list.
    for (const auto& e : experiments()) {
        auto* cmd = app.add_subcommand(e.name, e.help);
        add_common(cmd, common[e.name]);
        for (const auto& p : e.params) {
            cmd->add_option("--" + p.name, grid_values[e.name][p.name],
                            p.help + " (default " + p.default_value + "; several values form a grid)")
                ->delimiter(',');
        }
        std::string name = e.name;
        cmd->callback([&chosen, name] { chosen = name; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }

    try {
        if (chosen == "simulate") return simulate(sim, common["simulate"]);
        if (chosen == "sweep") {
            const CommonFlags& f = common["sweep"];
            if (!f.config && experiment_flag.empty())
                throw ConfigError("sweep needs --config or --experiment");
            SweepSpec s = base_spec(f, "");
            if (!experiment_flag.empty()) s.experiment = experiment_flag;
            if (s.experiment.empty()) throw ConfigError("no experiment given");
            for (const auto& a : set_args) {
                auto eq = a.find('=');
                if (eq == std::string::npos || eq == 0) throw ConfigError("--set expects key=values");
                std::vector<std::string> vals;
                std::stringstream ss(a.substr(eq + 1));
                std::string v;
                while (std::getline(ss, v, ',')) vals.push_back(v);
                s.set(a.substr(0, eq), vals);
            }
            return execute(s);
        }
        SweepSpec s = base_spec(common[chosen], chosen);
        for (const auto& p : find_experiment(chosen).params) {
            const auto& vals = grid_values[chosen][p.name];
            if (!vals.empty()) s.set(p.name, vals);
        }
        return execute(s);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitPartial;
    }
}
