#include "fppc/harness/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "fppc/model/errors.hpp"

namespace fppc {

namespace {

std::string trim(const std::string& s)
{
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

const Experiment& find_experiment(const std::string& name)
{
    for (const auto& e : experiments())
        if (e.name == name) return e;
    throw ConfigError("unknown experiment '" + name + "'");
}

std::string param_str(const ParamMap& m, const std::string& key)
{
    auto it = m.find(key);
    if (it == m.end()) throw ConfigError("missing parameter '" + key + "'");
    return it->second;
}

double param_real(const ParamMap& m, const std::string& key)
{
    std::string v = param_str(m, key);
    char* end = nullptr;
    double x = std::strtod(v.c_str(), &end);
    if (v.empty() || *end != '\0') throw ConfigError("parameter '" + key + "': not a number: " + v);
    return x;
}

long long param_int(const ParamMap& m, const std::string& key)
{
    std::string v = param_str(m, key);
    // Accept integral reals such as 1e6.
    double x = param_real(m, key);
    if (x != std::floor(x) || std::abs(x) > 9.0e15)
        throw ConfigError("parameter '" + key + "': not an integer: " + v);
    return static_cast<long long>(x);
}

std::string format_real(double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// ---------------------------------------------------------------------------

ConfigEntries parse_config(std::istream& in)
{
    ConfigEntries out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key=value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
        out.emplace_back(key, value);
    }
    return out;
}

ConfigEntries read_config_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    return parse_config(in);
}

Caps parse_caps(const std::string& text)
{
    Caps caps;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        auto eq = item.find('=');
        if (eq == std::string::npos) throw ConfigError("caps: expected name=value, got " + item);
        ParamMap m{{"v", trim(item.substr(eq + 1))}};
        std::string name = trim(item.substr(0, eq));
        if (name == "sites") caps.max_sites = static_cast<std::uint64_t>(param_int(m, "v"));
        else if (name == "events") caps.max_events = static_cast<std::uint64_t>(param_int(m, "v"));
        else if (name == "horizon") caps.horizon = param_real(m, "v");
        else throw ConfigError("caps: unknown field " + name);
    }
    if (caps.max_sites == 0 || caps.max_events == 0 || !(caps.horizon > 0.0))
        throw ConfigError("caps must be positive");
    return caps;
}

// ---------------------------------------------------------------------------

void SweepSpec::set(const std::string& key, std::vector<std::string> values)
{
    for (auto& [k, v] : grid) {
        if (k == key) {
            v = std::move(values);
            return;
        }
    }
    grid.emplace_back(key, std::move(values));
}

std::vector<ParamMap> SweepSpec::cells() const { return cells(find_experiment(experiment)); }

std::vector<ParamMap> SweepSpec::cells(const Experiment& e) const
{
    ParamMap base;
    for (const auto& p : e.params) base[p.name] = p.default_value;
    std::vector<ParamMap> out{base};
    for (const auto& [key, values] : grid) {
        std::vector<ParamMap> next;
        for (const auto& m : out) {
            for (const auto& v : values) {
                ParamMap c = m;
                c[key] = v;
                next.push_back(std::move(c));
            }
        }
        out = std::move(next);
    }
    return out;
}

void SweepSpec::validate() const { validate(find_experiment(experiment)); }

void SweepSpec::validate(const Experiment& e) const
{
    if (trials < 1) throw ConfigError("trials must be >= 1");
    if (workers < 1) throw ConfigError("workers must be >= 1");
    for (const auto& [key, values] : grid) {
        bool known = std::any_of(e.params.begin(), e.params.end(),
                                 [&](const ParamSpec& p) { return p.name == key; });
        if (!known) throw ConfigError("experiment '" + e.name + "' has no parameter '" + key + "'");
        if (values.empty()) throw ConfigError("parameter '" + key + "' has an empty grid");
    }
    auto cs = cells(e);
    if (cs.empty()) throw ConfigError("grid is empty");
    for (std::size_t i = 0; i < cs.size(); ++i) {
        try {
            e.validate(cs[i], trials);
        } catch (const ConfigError& err) {
            throw ConfigError("cell " + std::to_string(i) + ": " + err.what());
        }
    }
}

SweepSpec sweep_from_config(const ConfigEntries& entries)
{
    SweepSpec s;
    std::vector<std::pair<std::string, std::vector<std::string>>> lists;
    for (const auto& [k, v] : entries) {
        auto it = std::find_if(lists.begin(), lists.end(), [&](const auto& p) { return p.first == k; });
        if (it == lists.end()) lists.emplace_back(k, std::vector<std::string>{v});
        else it->second.push_back(v);
    }
    for (auto& [k, vs] : lists) {
        auto single = [&]() -> const std::string& {
            if (vs.size() != 1) throw ConfigError("key '" + k + "' must appear once");
            return vs.front();
        };
        ParamMap m{{k, vs.front()}};
        if (k == "experiment") s.experiment = single();
        else if (k == "trials") s.trials = static_cast<int>((single(), param_int(m, k)));
        else if (k == "seed") s.master_seed = static_cast<std::uint64_t>((single(), param_int(m, k)));
        else if (k == "workers") s.workers = static_cast<int>((single(), param_int(m, k)));
        else if (k == "out") s.out = single();
        else if (k == "caps") s.caps = parse_caps(single());
        else s.set(k, vs);
    }
    if (s.experiment.empty()) throw ConfigError("config needs an 'experiment' key");
    return s;
}

// ---------------------------------------------------------------------------

std::vector<std::string> csv_header(const Experiment& e)
{
    std::vector<std::string> h{"cell", "status", "error", "wall_time_s", "trials", "seed"};
    for (const auto& p : e.params) h.push_back(p.name);
    for (const auto& c : e.outputs) h.push_back(c.name);
    return h;
}

std::string csv_line(const std::vector<std::string>& fields)
{
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out += ',';
        const std::string& f = fields[i];
        if (f.find_first_of(",\"\n") == std::string::npos) {
            out += f;
        } else {
            out += '"';
            for (char c : f) {
                if (c == '"') out += '"';
                out += c == '\n' ? ' ' : c;
            }
            out += '"';
        }
    }
    out += '\n';
    return out;
}

void write_schema(const std::string& path, const Experiment& e)
{
    std::ofstream o(path);
    if (!o) throw ConfigError("cannot write schema " + path);
    o << "# experiment: " << e.name << "\n";
    o << "# column,type,description\n";
    o << "cell,int,cell index in grid order\n";
    o << "status,string,ok or failed\n";
    o << "error,string,error message of a failed cell\n";
    o << "wall_time_s,real,wall-clock seconds for the cell\n";
    o << "trials,int,trials per cell\n";
    o << "seed,int,master seed\n";
    for (const auto& p : e.params) o << csv_line({p.name, "param", p.help});
    for (const auto& c : e.outputs) o << csv_line({c.name, c.type, c.help});
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line)
{
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace

std::vector<std::map<std::string, std::string>> read_csv(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    std::string text = ss.str();
    std::vector<std::string> lines;
    std::size_t pos = 0;
    while (true) {
        auto nl = text.find('\n', pos);
        if (nl == std::string::npos) break;  // incomplete tail
        lines.push_back(text.substr(pos, nl - pos));
        pos = nl + 1;
    }
    std::vector<std::map<std::string, std::string>> rows;
    if (lines.empty()) return rows;
    auto header = split_csv_line(lines[0]);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        auto f = split_csv_line(lines[i]);
        if (f.size() != header.size())
            throw ConfigError(path + ": row " + std::to_string(i) + " has " +
                              std::to_string(f.size()) + " fields, header has " +
                              std::to_string(header.size()));
        std::map<std::string, std::string> row;
        for (std::size_t j = 0; j < header.size(); ++j) row[header[j]] = f[j];
        rows.push_back(std::move(row));
    }
    return rows;
}

SweepResult run_sweep(const SweepSpec& spec, std::ostream* progress)
{
    return run_sweep(spec, find_experiment(spec.experiment), progress);
}

SweepResult run_sweep(const SweepSpec& spec, const Experiment& e, std::ostream* progress)
{
    spec.validate(e);
    SweepResult res;
    res.header = csv_header(e);

    std::ofstream out;
    if (!spec.out.empty()) {
        out.open(spec.out, std::ios::trunc);
        if (!out) throw ConfigError("cannot write " + spec.out);
        write_schema(spec.out + ".schema", e);
        out << csv_line(res.header) << std::flush;
    }

    auto cells = spec.cells(e);
    for (std::size_t c = 0; c < cells.size(); ++c) {
        RunContext ctx;
        ctx.trials = spec.trials;
        ctx.plan = TrialPlan{spec.master_seed, c, spec.workers};
        ctx.caps = spec.caps;
        std::vector<std::string> row{std::to_string(c)};
        std::vector<std::string> values;
        std::string status = "ok", error;
        auto t0 = std::chrono::steady_clock::now();
        try {
            values = e.run(cells[c], ctx);
            if (values.size() != e.outputs.size())
                throw InvariantViolation("experiment returned the wrong number of columns");
            res.trials_run += static_cast<std::uint64_t>(spec.trials);
        } catch (const std::exception& ex) {
            status = "failed";
            error = ex.what();
            values.assign(e.outputs.size(), "");
            ++res.failed_cells;
        }
        double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        row.push_back(status);
        row.push_back(error);
        row.push_back(format_real(wall));
        row.push_back(std::to_string(spec.trials));
        row.push_back(std::to_string(spec.master_seed));
        for (const auto& p : e.params) row.push_back(cells[c].at(p.name));
        row.insert(row.end(), values.begin(), values.end());
        if (out.is_open()) out << csv_line(row) << std::flush;
        if (progress)
            *progress << "cell " << c + 1 << "/" << cells.size() << " " << status << " ("
                      << format_real(wall) << " s)\n";
        res.rows.push_back(std::move(row));
    }
    return res;
}

}  // namespace fppc
