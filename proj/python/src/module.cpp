#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "fppc/engine/world.hpp"
#include "fppc/harness/chernoff.hpp"
#include "fppc/harness/stats.hpp"
#include "fppc/harness/sweep.hpp"
#include "fppc/lattice_lab/lattice_lab.hpp"
#include "fppc/model/errors.hpp"
#include "fppc/ssp_lab/ssp_lab.hpp"
#include "fppc/tree_lab/tree_lab.hpp"

namespace py = pybind11;
using namespace fppc;

namespace {

std::string as_text(const py::handle& v)
{
    if (py::isinstance<py::str>(v)) return v.cast<std::string>();
    if (py::isinstance<py::bool_>(v)) return v.cast<bool>() ? "1" : "0";
    if (py::isinstance<py::int_>(v)) return std::to_string(v.cast<long long>());
    if (py::isinstance<py::float_>(v)) return py::repr(v).cast<std::string>();
    return py::str(v).cast<std::string>();
}

std::vector<std::string> as_list(const py::handle& v)
{
    std::vector<std::string> out;
    if (py::isinstance<py::list>(v) || py::isinstance<py::tuple>(v)) {
        for (const auto& x : v) out.push_back(as_text(x));
    } else {
        out.push_back(as_text(v));
    }
    return out;
}

Caps caps_from(const py::object& caps)
{
    if (caps.is_none()) return {};
    if (py::isinstance<py::str>(caps)) return parse_caps(caps.cast<std::string>());
    Caps c;
    auto d = caps.cast<py::dict>();
    if (d.contains("sites")) c.max_sites = d["sites"].cast<std::uint64_t>();
    if (d.contains("events")) c.max_events = d["events"].cast<std::uint64_t>();
    if (d.contains("horizon")) c.horizon = d["horizon"].cast<double>();
    if (c.max_sites == 0 || c.max_events == 0 || !(c.horizon > 0.0))
        throw ConfigError("caps must be positive");
    return c;
}

py::object typed(const std::string& type, const std::string& text)
{
    if (text.empty()) return py::none();
    if (type == "int") return py::int_(std::stoll(text));
    if (type == "real") return py::float_(std::stod(text));
    if (type == "bool") return py::bool_(text == "1" || text == "true");
    return py::str(text);
}

SweepSpec spec_from(const std::string& experiment, const py::dict& grid, int trials,
                    std::uint64_t seed, int workers, const py::object& caps)
{
    SweepSpec s;
    s.experiment = experiment;
    for (const auto& [k, v] : grid) s.set(k.cast<std::string>(), as_list(v));
    s.trials = trials;
    s.master_seed = seed;
    s.workers = workers;
    s.caps = caps_from(caps);
    return s;
}

py::dict run_experiment(const std::string& name, const py::dict& params, int trials,
                        std::uint64_t seed, int workers, const py::object& caps)
{
    const Experiment& e = find_experiment(name);
    SweepSpec s = spec_from(name, params, trials, seed, workers, caps);
    for (const auto& [k, v] : s.grid)
        if (v.size() != 1) throw ConfigError("parameter " + k + " needs a single value");
    s.validate(e);
    ParamMap cell = s.cells(e).at(0);
    std::vector<std::string> values;
    {
        py::gil_scoped_release release;
        values = e.run(cell, RunContext{trials, TrialPlan{seed, 0, workers}, s.caps});
    }
    py::dict out;
    for (std::size_t i = 0; i < e.outputs.size(); ++i)
        out[py::str(e.outputs[i].name)] = typed(e.outputs[i].type, values.at(i));
    return out;
}

py::dict sweep(const std::string& name, const py::dict& grid, int trials, std::uint64_t seed,
               int workers, const std::string& out, const py::object& caps)
{
    SweepSpec s = spec_from(name, grid, trials, seed, workers, caps);
    s.out = out;
    SweepResult r;
    {
        py::gil_scoped_release release;
        r = run_sweep(s);
    }
    py::dict d;
    d["header"] = r.header;
    d["rows"] = r.rows;
    d["failed_cells"] = r.failed_cells;
    d["trials_run"] = r.trials_run;
    d["exit_code"] = r.exit_code();
    return d;
}

py::dict trial(const std::string& topology, int d, double lambda, double rho, int target,
               std::uint64_t seed, std::uint64_t trial_index, const std::string& mode,
               const py::object& caps)
{
    ClockMode m;
    if (mode == "static") m = ClockMode::Static;
    else if (mode == "resample") m = ClockMode::Resample;
    else throw ConfigError("mode must be static or resample");
    ModelParams p;
    if (topology == "tree") {
        if (m != ClockMode::Static) throw ConfigError("resample mode is lattice only");
        p = ModelParams::tree(d, lambda, rho);
    } else if (topology == "lattice") {
        p = ModelParams::lattice(d, lambda, rho, m);
    } else {
        throw ConfigError("topology must be tree or lattice");
    }
    p.validate();
    Caps c = caps_from(caps);
    TrialOutcome o;
    {
        py::gil_scoped_release release;
        o = run_trial(p, RandomField(p, seed, trial_index), target, c);
    }
    py::dict out;
    out["verdict"] = to_string(o.verdict);
    out["stop_time"] = o.stop_time;
    out["max_distance"] = o.max_distance;
    out["events_processed"] = o.events_processed;
    out["conversions"] = o.conversions;
    out["approximate"] = o.approximate;
    return out;
}

}  // namespace

PYBIND11_MODULE(_fppc, m)
{
    m.doc() = "Competition first-passage percolation simulator";
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    m.def("experiments", [] {
        py::list out;
        for (const Experiment& e : experiments()) {
            py::dict d;
            d["name"] = e.name;
            d["help"] = e.help;
            py::dict params, outputs;
            for (const auto& p : e.params) params[py::str(p.name)] = p.default_value;
            for (const auto& c : e.outputs) outputs[py::str(c.name)] = c.type;
            d["params"] = params;
            d["outputs"] = outputs;
            out.append(d);
        }
        return out;
    });
    m.def("run_experiment", &run_experiment, py::arg("name"), py::arg("params") = py::dict(),
          py::arg("trials") = 100, py::arg("seed") = 1, py::arg("workers") = 1,
          py::arg("caps") = py::none(),
          "Runs one cell of a registered experiment; returns its typed outputs.");
    m.def("sweep", &sweep, py::arg("name"), py::arg("grid") = py::dict(), py::arg("trials") = 100,
          py::arg("seed") = 1, py::arg("workers") = 1, py::arg("out") = "",
          py::arg("caps") = py::none(),
          "Runs the Cartesian grid; rows are also appended to `out` when given.");
    m.def("run_trial", &trial, py::arg("topology"), py::arg("d"), py::arg("lam"), py::arg("rho"),
          py::arg("target"), py::arg("seed") = 1, py::arg("trial") = 0,
          py::arg("mode") = "static", py::arg("caps") = py::none());
    m.def("read_csv", &read_csv, py::arg("path"));
    m.def(
        "wilson_interval",
        [](std::uint64_t s, std::uint64_t n, double conf) {
            auto w = wilson_interval(s, n, conf);
            return py::make_tuple(w.point, w.lower, w.upper);
        },
        py::arg("successes"), py::arg("trials"), py::arg("confidence") = 0.95);
    m.def("brw_speed", &brw_speed, py::arg("d"));
    m.def("closed_site_marginal", &closed_site_marginal, py::arg("rho"), py::arg("d"));
    m.def("type2_seed_marginal", &type2_seed_marginal, py::arg("C"), py::arg("lam"),
          py::arg("rho"), py::arg("d"));
    m.def(
        "chernoff_bounds",
        [](double mu, double eps, double C) {
            auto b = poisson_chernoff_bounds(mu, eps, C);
            py::dict d;
            d["lower_tail"] = b.lower_tail;
            d["upper_tail"] = b.upper_tail;
            d["above_C"] = b.above_C;
            d["theta"] = b.theta;
            return d;
        },
        py::arg("mu"), py::arg("eps"), py::arg("C"));
}
