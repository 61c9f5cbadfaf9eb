#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "fppc/engine/world.hpp"
#include "fppc/harness/parallel.hpp"

namespace fppc {

/// One cell's parameter values, by name, as text.
using ParamMap = std::map<std::string, std::string>;

struct ParamSpec {
    std::string name;
    std::string default_value;
    std::string help;
};

struct ColumnSpec {
    std::string name;
    std::string type;  // int, real, bool, string
    std::string help;
};

struct RunContext {
    int trials = 1;
    TrialPlan plan;
    Caps caps;
};

/// A named estimator with its parameters and fixed output columns.
struct Experiment {
    std::string name;
    std::string help;
    std::vector<ParamSpec> params;
    std::vector<ColumnSpec> outputs;
    /// Throws ConfigError when the cell violates the operation's preconditions.
    std::function<void(const ParamMap&, int trials)> validate;
    /// One formatted value per output column.
    std::function<std::vector<std::string>(const ParamMap&, const RunContext&)> run;
};

const std::vector<Experiment>& experiments();
const Experiment& find_experiment(const std::string& name);

// Typed parameter access; ConfigError names the offending key.
double param_real(const ParamMap& m, const std::string& key);
long long param_int(const ParamMap& m, const std::string& key);
std::string param_str(const ParamMap& m, const std::string& key);

/// %.17g: round-trips every double.
std::string format_real(double x);

// ---------------------------------------------------------------------------
// Config files: `key = value` lines, `#` comments, repeated keys form lists.
// ---------------------------------------------------------------------------

using ConfigEntries = std::vector<std::pair<std::string, std::string>>;

ConfigEntries parse_config(std::istream& in);
ConfigEntries read_config_file(const std::string& path);

/// "sites=N,events=N,horizon=T" (any subset).
Caps parse_caps(const std::string& text);

struct SweepSpec {
    std::string experiment;
    /// Parameter lists in order of first appearance.
    std::vector<std::pair<std::string, std::vector<std::string>>> grid;
    int trials = 100;
    std::uint64_t master_seed = 1;
    Caps caps;
    int workers = 1;
    std::string out;

    /// Adds values for `key`; a key already present is replaced.
    void set(const std::string& key, std::vector<std::string> values);

    /// Cartesian product of the grid with defaults filled in; the last grid key
    /// varies fastest.
    std::vector<ParamMap> cells() const;
    std::vector<ParamMap> cells(const Experiment& e) const;

    /// Checks every cell against its operation before any work starts.
    void validate() const;
    void validate(const Experiment& e) const;
};

/// Reserved keys: experiment, trials, seed, workers, out, caps. Everything
/// else is a grid parameter.
SweepSpec sweep_from_config(const ConfigEntries& entries);

/// CSV columns: cell, status, error, wall_time_s, trials, seed, then the
/// experiment's parameters and outputs.
std::vector<std::string> csv_header(const Experiment& e);
std::string csv_line(const std::vector<std::string>& fields);

/// Column documentation written next to each CSV as <out>.schema.
void write_schema(const std::string& path, const Experiment& e);

/// Parses a CSV written by run_sweep. A trailing line without a newline (an
/// interrupted write) is dropped.
std::vector<std::map<std::string, std::string>> read_csv(const std::string& path);

struct SweepResult {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    int failed_cells = 0;
    std::uint64_t trials_run = 0;

    int exit_code() const { return failed_cells > 0 ? 3 : 0; }
};

/// Validates, then runs every cell in order. Each finished row is appended to
/// `spec.out` (when set) and flushed. A cell that throws is recorded as failed
/// and the sweep continues.
SweepResult run_sweep(const SweepSpec& spec, std::ostream* progress = nullptr);

/// Same, with an experiment outside the registry (spec.experiment is ignored).
SweepResult run_sweep(const SweepSpec& spec, const Experiment& e, std::ostream* progress = nullptr);

}  // namespace fppc
