// The experiment registry behind `fppc sweep` and the per-experiment CLI
// subcommands. Each entry validates its cell up front and returns one
// formatted value per output column.

#include <cmath>
#include <string>
#include <vector>

#include "fppc/harness/chernoff.hpp"
#include "fppc/harness/sweep.hpp"
#include "fppc/lattice_lab/lattice_lab.hpp"
#include "fppc/model/errors.hpp"
#include "fppc/ssp_lab/ssp_lab.hpp"
#include "fppc/tree_lab/tree_lab.hpp"

namespace fppc {

namespace {

using Row = std::vector<std::string>;

void add(Row& r, double x) { r.push_back(format_real(x)); }
void add(Row& r, std::uint64_t x) { r.push_back(std::to_string(x)); }
void add(Row& r, int x) { r.push_back(std::to_string(x)); }
void add(Row& r, bool x) { r.push_back(x ? "1" : "0"); }
void add(Row& r, const WilsonInterval& w)
{
    add(r, w.point);
    add(r, w.lower);
    add(r, w.upper);
}

std::vector<ColumnSpec> wilson_columns(const std::string& name, const std::string& help)
{
    return {{name, "real", help},
            {name + "_lo", "real", "95% Wilson lower bound of " + name},
            {name + "_hi", "real", "95% Wilson upper bound of " + name}};
}

template <class... Groups>
std::vector<ColumnSpec> columns(Groups&&... groups)
{
    std::vector<ColumnSpec> out;
    (out.insert(out.end(), groups.begin(), groups.end()), ...);
    return out;
}

// Range checks shared by the validators.
void require(bool ok, const std::string& msg)
{
    if (!ok) throw ConfigError(msg);
}

int in_range(const ParamMap& m, const std::string& key, long long lo, long long hi)
{
    long long v = param_int(m, key);
    require(v >= lo && v <= hi, key + " must lie in [" + std::to_string(lo) + ", " +
                                    std::to_string(hi) + "]");
    return static_cast<int>(v);
}

double positive(const ParamMap& m, const std::string& key)
{
    double v = param_real(m, key);
    require(v > 0.0 && std::isfinite(v), key + " must be positive");
    return v;
}

double nonnegative(const ParamMap& m, const std::string& key)
{
    double v = param_real(m, key);
    require(v >= 0.0 && std::isfinite(v), key + " must be nonnegative");
    return v;
}

double open_unit(const ParamMap& m, const std::string& key)
{
    double v = param_real(m, key);
    require(v > 0.0 && v < 1.0, key + " must lie in (0, 1)");
    return v;
}

std::string one_of(const ParamMap& m, const std::string& key, std::initializer_list<const char*> xs)
{
    std::string v = param_str(m, key);
    for (const char* x : xs)
        if (v == x) return v;
    std::string msg = key + " must be one of:";
    for (const char* x : xs) msg += std::string(" ") + x;
    throw ConfigError(msg);
}

// ---------------------------------------------------------------------------

ModelParams extinction_params(const ParamMap& m)
{
    std::string topo = one_of(m, "topology", {"tree", "lattice"});
    std::string mode = one_of(m, "mode", {"static", "resample"});
    int d = static_cast<int>(param_int(m, "d"));
    double lambda = param_real(m, "lambda"), rho = param_real(m, "rho");
    ModelParams p = topo == "tree"
                        ? ModelParams::tree(d, lambda, rho)
                        : ModelParams::lattice(d, lambda, rho,
                                               mode == "resample" ? ClockMode::Resample
                                                                  : ClockMode::Static);
    if (topo == "tree" && mode == "resample") p.clock_mode = ClockMode::Resample;
    double q = param_real(m, "trunc_q");
    if (q > 0.0) p.truncation = Truncation{param_real(m, "trunc_K"), q};
    p.validate();
    return p;
}

Experiment extinction_experiment()
{
    Experiment e;
    e.name = "extinction";
    e.help = "survival of type 1 to radius (lattice) or depth (tree) R";
    e.params = {
        {"topology", "lattice", "tree or lattice"},
        {"d", "2", "tree degree or lattice dimension"},
        {"lambda", "1.5", "type-2 spread rate"},
        {"rho", "1", "conversion rate"},
        {"R", "50", "target radius or depth"},
        {"mode", "static", "lattice type-2 clocks: static or resample"},
        {"tube", "0", "tree frontier-tube depth, 0 disables (approximate when set)"},
        {"trunc_K", "1", "type-1 truncation cutoff"},
        {"trunc_q", "0", "semi-mark probability, 0 disables truncation"},
    };
    e.outputs = columns(
        std::vector<ColumnSpec>{{"survived", "int", "trials reaching R"},
                                {"extinct", "int", "trials where type 1 died out"},
                                {"capped", "int", "trials stopped by a resource cap"},
                                {"confined", "int", "trials whose queue emptied with type 1 alive"}},
        wilson_columns("p_survived", "fraction of trials reaching R"),
        wilson_columns("p_extinct", "fraction of trials with type 1 extinct"),
        wilson_columns("p_capped", "fraction of capped trials"),
        std::vector<ColumnSpec>{{"mean_stop_time", "real", "mean stopping time"},
                                {"mean_conversions", "real", "mean conversions per trial"},
                                {"approximate", "bool", "frontier-tube pruning was active"}});
    e.validate = [](const ParamMap& m, int) {
        extinction_params(m);
        in_range(m, "R", 0, 1'000'000);
        in_range(m, "tube", 0, 1000);
    };
    e.run = [](const ParamMap& m, const RunContext& ctx) {
        EngineOptions opts;
        opts.tube_generations = static_cast<int>(param_int(m, "tube"));
        auto s = estimate_extinction(extinction_params(m), static_cast<int>(param_int(m, "R")),
                                     ctx.trials, ctx.plan, ctx.caps, opts);
        Row r;
        add(r, s.survived);
        add(r, s.extinct);
        add(r, s.capped);
        add(r, s.confined);
        add(r, s.p_survived);
        add(r, s.p_extinct);
        add(r, s.p_capped);
        add(r, s.mean_stop_time);
        add(r, s.mean_conversions);
        add(r, s.approximate);
        return r;
    };
    return e;
}

Experiment brw_experiment()
{
    Experiment e;
    e.name = "brw";
    e.help = "branching random walk minimum M_n on the d-ary tree";
    e.params = {{"d", "3", "tree degree"},
                {"n", "20", "generation"},
                {"method", "exact", "exact (n <= 35) or cloud"},
                {"width", "100000", "cloud width (cloud method)"}};
    e.outputs = {{"mean_Mn", "real", "mean minimum passage time to generation n"},
                 {"sd_Mn", "real", "standard deviation of M_n"},
                 {"se_Mn", "real", "standard error of the mean"},
                 {"ratio", "real", "mean_Mn / n"},
                 {"gamma_star", "real", "first-order speed of M_n / n"}};
    e.validate = [](const ParamMap& m, int) {
        in_range(m, "d", 3, 255);
        int n = in_range(m, "n", 0, 100000);
        std::string method = one_of(m, "method", {"exact", "cloud"});
        if (method == "exact")
            require(n <= kBrwExactMaxDepth,
                    "exact method needs n <= " + std::to_string(kBrwExactMaxDepth) +
                        "; use the cloud method");
        else
            in_range(m, "width", 1000, 100'000'000);
    };
    e.run = [](const ParamMap& m, const RunContext& ctx) {
        int d = static_cast<int>(param_int(m, "d"));
        auto method = param_str(m, "method") == "exact" ? BrwMethod::ExactPrunedDFS
                                                        : BrwMethod::TruncatedCloud;
        auto s = estimate_brw(d, static_cast<int>(param_int(m, "n")), ctx.trials, method,
                              static_cast<std::size_t>(param_int(m, "width")), ctx.plan);
        Row r;
        add(r, s.mean_Mn);
        add(r, s.sd_Mn);
        add(r, s.se());
        add(r, s.ratio);
        add(r, brw_speed(d));
        return r;
    };
    return e;
}

void check_box_params(const ParamMap& m)
{
    in_range(m, "d", 3, 255);
    open_unit(m, "eps");
    positive(m, "lambda");
}

Experiment subbox_experiment()
{
    Experiment e;
    e.name = "subbox";
    e.help = "probability that a depth-k sub-box holds two type-1-fast, type-2-slow leaves";
    e.params = {{"d", "3", "tree degree"},
                {"k", "12", "sub-box depth"},
                {"eps", "0.1", "speed margin"},
                {"lambda", "1.05", "type-2 rate"},
                {"h1_cap", "64", "cap on counted type-1-fast leaves"}};
    e.outputs = columns(wilson_columns("p_good", "fraction of good sub-boxes"),
                        std::vector<ColumnSpec>{{"mean_h1_count_capped", "real",
                                                 "mean number of type-1-fast leaves, capped"}});
    e.validate = [](const ParamMap& m, int) {
        check_box_params(m);
        in_range(m, "k", 1, kSubBoxMaxDepth);
        in_range(m, "h1_cap", 0, 1'000'000);
    };
    e.run = [](const ParamMap& m, const RunContext& ctx) {
        auto s = estimate_subbox_good_prob(
            static_cast<int>(param_int(m, "k")), param_real(m, "eps"), param_real(m, "lambda"),
            static_cast<int>(param_int(m, "d")), ctx.trials, ctx.plan,
            static_cast<std::uint64_t>(param_int(m, "h1_cap")));
        Row r;
        add(r, s.p_good);
        add(r, s.mean_h1_count_capped);
        return r;
    };
    return e;
}

Experiment highway_experiment()
{
    Experiment e;
    e.name = "highway";
    e.help = "highway endpoints after r levels of good sub-boxes";
    e.params = {{"d", "3", "tree degree"},     {"k", "8", "sub-box depth"},
                {"eps", "0.1", "speed margin"}, {"lambda", "1.05", "type-2 rate"},
                {"r", "3", "levels"},           {"cap", "4", "offspring kept per sub-box"}};
    e.outputs = {{"mean_count", "real", "mean endpoint count at depth k r"},
                 {"sd_count", "real", "standard deviation of the count"},
                 {"min_count", "int", "smallest count"},
                 {"max_count", "int", "largest count"},
                 {"p_nonzero", "real", "fraction of trials with at least one endpoint"}};
    e.validate = [](const ParamMap& m, int) {
        check_box_params(m);
        in_range(m, "k", 1, kSubBoxMaxDepth);
        in_range(m, "r", 0, 6);
        in_range(m, "cap", 1, 16);
    };
    e.run = [](const ParamMap& m, const RunContext& ctx) {
        auto s = estimate_highway(static_cast<int>(param_int(m, "k")), param_real(m, "eps"),
                                  param_real(m, "lambda"), static_cast<int>(param_int(m, "d")),
                                  static_cast<int>(param_int(m, "r")),
                                  static_cast<int>(param_int(m, "cap")), ctx.trials, ctx.plan);
        std::uint64_t lo = s.counts.empty() ? 0 : s.counts.front(), hi = 0, nz = 0;
        for (auto c : s.counts) {
            lo = std::min(lo, c);
            hi = std::max(hi, c);
            nz += c > 0;
        }
        Row r;
        add(r, s.mean_count);
        add(r, s.sd_count);
        add(r, lo);
        add(r, hi);
        add(r, s.counts.empty() ? 0.0 : static_cast<double>(nz) / s.counts.size());
        return r;
    };
    return e;
}

Experiment spine_experiment()
{
    Experiment e;
    e.name = "spine";
    e.help = "probability of a fast type-1 spine of depth k^2 shielded from type 2";
    e.params = {{"d", "3", "tree degree"},
                {"k", "2", "spine scale (depth k^2)"},
                {"eps", "0.1", "speed margin"},
                {"lambda", "1", "type-2 rate"}};
    e.outputs = columns(wilson_columns("p_type1", "fraction with a fast enough type-1 spine"),
                        std::vector<ColumnSpec>{
                            {"mean_spine_time", "real", "mean minimal type-1 time to depth k^2"},
                            {"edge_count", "int", "edges needing slow type-2 clocks"},
                            {"log_p_type2", "real", "log probability of the type-2 part"},
                            {"log_p_spine", "real", "log of the combined probability"}});
    e.validate = [](const ParamMap& m, int) {
        in_range(m, "d", 3, 255);
        in_range(m, "k", 1, kSpineMaxK);
        double eps = param_real(m, "eps");
        require(eps > 0.0 && eps <= 1.0, "eps must lie in (0, 1]");
        positive(m, "lambda");
    };
    e.run = [](const ParamMap& m, const RunContext& ctx) {
        auto s = spine_probability(static_cast<int>(param_int(m, "k")), param_real(m, "eps"),
                                   param_real(m, "lambda"), static_cast<int>(param_int(m, "d")),
                                   ctx.trials, ctx.plan);
        Row r;
        add(r, s.p_type1_part);
        add(r, s.mean_spine_time);
        add(r, static_cast<std::uint64_t>(s.edge_count));
        add(r, s.log_p_type2_part);
        add(r, s.log_p_spine);
        return r;
    };
    return e;
}

Experiment dstar_experiment()
{
    Experiment e;
    e.name = "dstar";
    e.help = "probability that every upward type-2 passage from depth k^2 takes at least 10k";
    e.params = {{"d", "3", "tree degree"}, {"k", "2", "scale"}, {"lambda", "0.1", "type-2 rate"}};
    e.outputs = wilson_columns("p", "fraction of trials where the backtrack is slow");
    e.validate = [](const ParamMap& m, int) {
        in_range(m, "d", 3, 255);
        in_range(m, "k", 1, kDStarMaxK);
        positive(m, "lambda");
    };
    e.run = [](const ParamMap& m, const RunContext& ctx) {
        auto s = dstar_probability(static_cast<int>(param_int(m, "k")), param_real(m, "lambda"),
                                   static_cast<int>(param_int(m, "d")), ctx.trials, ctx.plan);
        Row r;
        add(r, s.p);
        return r;
    };
    return e;
}

Experiment goodbox_experiment()
{
    Experiment e;
    e.name = "goodbox";
    e.help = "factored good-box probability P(G1) P(G2|G1) P(G3) P(G4)";
    e.params = {{"d", "3", "tree degree"},       {"k", "2", "scale"},
                {"r", "2", "highway levels"},    {"eps", "0.1", "speed margin"},
                {"alpha", "1.5", "box exponent"}, {"lambda", "1", "type-2 rate"},
                {"rho", "0", "conversion rate"}, {"cap", "4", "offspring kept per sub-box"}};
    e.outputs = columns(
        wilson_columns("p_g1", "fraction of trials with a highway"),
        std::vector<ColumnSpec>{{"mean_endpoints", "real", "mean highway endpoints"},
                                {"log_p_g2_given_g1", "real", "log P(two spines | highway)"}},
        wilson_columns("p_dstar", "per-site backtrack probability"),
        std::vector<ColumnSpec>{{"log_p_g3", "real", "log P(all highway sites slow to backtrack)"},
                                {"box_size", "real", "sites in the box"},
                                {"log_p_g4", "real", "log P(no conversion in the box)"},
                                {"log_product", "real", "log of the product"},
                                {"product", "real", "the product"}});
    e.validate = [](const ParamMap& m, int) {
        check_box_params(m);
        in_range(m, "k", 1, kDStarMaxK);
        in_range(m, "r", 0, 6);
        in_range(m, "cap", 1, 16);
        require(param_real(m, "alpha") > 1.0, "alpha must exceed 1");
        nonnegative(m, "rho");
    };
    e.run = [](const ParamMap& m, const RunContext& ctx) {
        auto g = good_box_probability(
            static_cast<int>(param_int(m, "k")), static_cast<int>(param_int(m, "r")),
            param_real(m, "eps"), param_real(m, "alpha"), param_real(m, "lambda"),
            param_real(m, "rho"), static_cast<int>(param_int(m, "d")), ctx.trials, ctx.plan,
            static_cast<int>(param_int(m, "cap")));
        Row r;
        add(r, g.p_g1);
        add(r, g.mean_endpoints);
        add(r, g.log_p_g2_given_g1);
        add(r, g.p_dstar);
        add(r, g.log_p_g3);
        add(r, g.box_size);
        add(r, g.log_p_g4);
        add(r, g.log_product);
        add(r, g.product);
        return r;
    };
    return e;
}

Experiment shape_experiment()
{
    Experiment e;
    e.name = "shape";
    e.help = "limit shape of pure first passage percolation on Z^d";
    e.params = {{"d", "2", "lattice dimension"}, {"t", "30", "time"}, {"rate", "1", "clock rate"}};
    e.outputs = {{"axis_time", "real", "t / h(axis) at time t"},
                 {"axis_time_se", "real", "standard error of axis_time"},
                 {"diagonal_time", "real", "t / h(diagonal) at time t"},
                 {"diagonal_time_se", "real", "standard error of diagonal_time"},
                 {"axis_time_2t", "real", "axis constant at time 2t"},
                 {"diagonal_time_2t", "real", "diagonal constant at time 2t"},
                 {"hausdorff_drift", "real", "distance between rescaled shapes at t and 2t (d=2)"},
                 {"convexity_excess", "real", "worst chord-midpoint excess (d=2)"},
                 {"box_radius", "int", "final simulation box radius"}};
    e.validate = [](const ParamMap& m, int) {
        in_range(m, "d", 2, 4);
        double t = positive(m, "t");
        double rate = positive(m, "rate");
        require(t * rate <= 500.0, "t * rate must be at most 500");
    };
    e.run = [](const ParamMap& m, const RunContext& ctx) {
        auto s = shape_estimate(param_real(m, "t"), static_cast<int>(param_int(m, "d")),
                                ctx.trials, ctx.plan, param_real(m, "rate"));
        std::size_t last = s.directions.size() - 1;  // the diagonal comes last
        Row r;
        add(r, s.directional_times[0]);
        add(r, s.directional_se[0]);
        add(r, s.directional_times[last]);
        add(r, s.directional_se[last]);
        add(r, s.directional_times_2t[0]);
        add(r, s.directional_times_2t[last]);
        add(r, s.hausdorff_drift);
        add(r, s.convexity_excess);
        add(r, s.final_box_radius);
        return r;
    };
    return e;
}

Experiment closed_experiment()
{
    Experiment e;
    e.name = "closed";
    e.help = "closed-site density and encapsulation of the origin on Z^d";
    e.params = {{"d", "2", "lattice dimension"},
                {"rho", "4", "conversion rate"},
                {"R", "100", "box radius"}};
    e.outputs = columns(
        std::vector<ColumnSpec>{
            {"marginal", "real", "closed-form closed-site probability"},
            {"density", "real", "closed fraction over all boxes"},
            {"sublattice_sites", "int", "even-sublattice sites pooled over trials"},
            {"sublattice_density", "real", "closed fraction on the even sublattice"},
            {"z_score", "real", "(sublattice_density - marginal) / iid standard error"},
            {"lag2_correlation", "real", "mean correlation at lag 2 along axis 0"}},
        wilson_columns("p_encapsulated", "fraction of trials with the origin encapsulated"),
        std::vector<ColumnSpec>{{"origin_closed", "int", "trials with a closed origin"}});
    e.validate = [](const ParamMap& m, int) {
        in_range(m, "d", 1, 8);
        nonnegative(m, "rho");
        in_range(m, "R", 1, 2000);
    };
    e.run = [](const ParamMap& m, const RunContext& ctx) {
        int d = static_cast<int>(param_int(m, "d")), R = static_cast<int>(param_int(m, "R"));
        double rho = param_real(m, "rho");
        ModelParams p = ModelParams::lattice(d, 1.0, rho);
        struct One {
            double density = 0, lag2 = 0;
            std::uint64_t sub = 0, sub_closed = 0;
            Encapsulation enc;
        };
        auto res = parallel_map<One>(ctx.trials, ctx.plan.workers, [&](std::size_t i) {
            RandomField f(p, ctx.plan.master_seed, ctx.plan.trial_index(i));
            ClosedDensity c = closed_site_density(rho, d, R, f);
            One o;
            o.density = c.density;
            o.lag2 = c.lag2_correlation;
            o.sub = c.sublattice_sites;
            o.sub_closed = static_cast<std::uint64_t>(
                std::llround(c.sublattice_density * static_cast<double>(c.sublattice_sites)));
            o.enc = origin_encapsulated(c.field);
            return o;
        });
        double dens = 0, lag = 0;
        std::uint64_t sub = 0, hits = 0, enc = 0, oc = 0;
        for (const auto& o : res) {
            dens += o.density;
            lag += o.lag2;
            sub += o.sub;
            hits += o.sub_closed;
            enc += o.enc.encapsulated;
            oc += o.enc.origin_closed;
        }
        double n = static_cast<double>(res.size());
        double marg = closed_site_marginal(rho, d);
        double sd = sub ? static_cast<double>(hits) / sub : 0.0;
        double se = sub ? std::sqrt(marg * (1.0 - marg) / sub) : 0.0;
        Row r;
        add(r, marg);
        add(r, dens / n);
        add(r, sub);
        add(r, sd);
        add(r, se > 0 ? (sd - marg) / se : 0.0);
        add(r, lag / n);
        add(r, wilson_interval(enc, res.size()));
        add(r, oc);
        return r;
    };
    return e;
}

Experiment seeds_experiment()
{
    Experiment e;
    e.name = "seeds";
    e.help = "density of type-2 seeds labelled from the conversion model's clocks";
    e.params = {{"d", "2", "lattice dimension"}, {"C", "3", "seed threshold"},
                {"lambda", "1e-4", "type-2 rate"}, {"rho", "1e-4", "conversion rate"},
                {"R", "100", "box radius"}};
    e.outputs = {{"marginal", "real", "closed-form seed probability"},
                 {"density", "real", "seed fraction over all boxes"},
                 {"sublattice_sites", "int", "even-sublattice sites pooled over trials"},
                 {"sublattice_density", "real", "seed fraction on the even sublattice"},
                 {"z_score", "real", "(sublattice_density - marginal) / iid standard error"},
                 {"lag2_correlation", "real", "mean correlation at lag 2 along axis 0"},
                 {"mean_clusters", "real", "mean number of seed clusters per box"}};
    e.validate = [](const ParamMap& m, int) {
        in_range(m, "d", 1, 8);
        positive(m, "C");
        nonnegative(m, "lambda");
        nonnegative(m, "rho");
        in_range(m, "R", 1, 2000);
    };
    e.run = [](const ParamMap& m, const RunContext& ctx) {
        int d = static_cast<int>(param_int(m, "d")), R = static_cast<int>(param_int(m, "R"));
        double C = param_real(m, "C"), lambda = param_real(m, "lambda"), rho = param_real(m, "rho");
        ModelParams p = ModelParams::lattice(d, 1.0, 0.0);
        struct One {
            double density = 0, lag2 = 0, clusters = 0;
            SublatticeCount sub;
        };
        auto res = parallel_map<One>(ctx.trials, ctx.plan.workers, [&](std::size_t i) {
            RandomField f(p, ctx.plan.master_seed, ctx.plan.trial_index(i));
            SeedField s = label_type2_seeds(C, lambda, rho, d, R, f);
            One o;
            o.density = s.density();
            o.lag2 = lag2_correlation(d, R, s.seed);
            o.clusters = static_cast<double>(s.members.size());
            o.sub = even_sublattice_count(d, R, s.seed);
            return o;
        });
        double dens = 0, lag = 0, cl = 0;
        std::uint64_t sub = 0, hits = 0;
        for (const auto& o : res) {
            dens += o.density;
            lag += o.lag2;
            cl += o.clusters;
            sub += o.sub.sites;
            hits += o.sub.hits;
        }
        double n = static_cast<double>(res.size());
        double marg = type2_seed_marginal(C, lambda, rho, d);
        double sd = sub ? static_cast<double>(hits) / sub : 0.0;
        double se = sub ? std::sqrt(marg * (1.0 - marg) / sub) : 0.0;
        Row r;
        add(r, marg);
        add(r, dens / n);
        add(r, sub);
        add(r, sd);
        add(r, se > 0 ? (sd - marg) / se : 0.0);
        add(r, lag / n);
        add(r, cl / n);
        return r;
    };
    return e;
}

SspParams ssp_params(const ParamMap& m)
{
    SspParams p;
    p.d = static_cast<int>(param_int(m, "d"));
    p.kappa = param_real(m, "kappa");
    p.seeds = BernoulliSeeds{param_real(m, "p")};
    if (one_of(m, "red", {"capped", "unit"}) == "unit") p.red = UnitRed{};
    else p.red = ExpCappedRed{param_real(m, "red_cap")};
    p.validate();
    return p;
}

Experiment ssp_experiment()
{
    Experiment e;
    e.name = "ssp";
    e.help = "red survival in the sandwiched red/blue process with Bernoulli seeds";
    e.params = {{"d", "2", "lattice dimension"},
                {"kappa", "4001", "blue spread time"},
                {"p", "1e-3", "seed probability"},
                {"R", "100", "box radius"},
                {"red", "capped", "red clocks: capped (min(Exp(1), red_cap)) or unit"},
                {"red_cap", "1", "red clock cap"}};
    e.outputs = columns(
        std::vector<ColumnSpec>{{"origin_seed", "int", "trials whose origin is a seed"},
                                {"red_survived", "int", "trials where red reached the boundary"},
                                {"red_died", "int", "trials where red was enclosed"}},
        wilson_columns("p_red", "red survival fraction over trials with a non-seed origin"));
    e.validate = [](const ParamMap& m, int) {
        ssp_params(m);
        in_range(m, "R", 1, 5000);
    };
    e.run = [](const ParamMap& m, const RunContext& ctx) {
        SspParams p = ssp_params(m);
        auto c = estimate_red_survival(p, static_cast<int>(param_int(m, "R")), ctx.trials,
                                       {std::get<BernoulliSeeds>(p.seeds).p}, ctx.plan);
        const auto& pt = c.points.front();
        Row r;
        add(r, pt.origin_seed);
        add(r, pt.red_survived);
        add(r, pt.red_died);
        add(r, pt.p_red);
        return r;
    };
    return e;
}

Experiment coupling_experiment()
{
    Experiment e;
    e.name = "coupling";
    e.help = "consistency of type-2 seeds with the conversion model run on the same clocks";
    e.params = {{"d", "2", "lattice dimension"}, {"C", "12", "seed threshold"},
                {"lambda", "1e-8", "type-2 rate"}, {"rho", "1e-8", "conversion rate"},
                {"R", "10", "box radius"}, {"sites", "10000", "non-seed sites sampled for the clock check"}};
    e.outputs = {{"seed_density", "real", "mean seed density"},
                 {"sites_checked", "int", "non-seed sites with the clock inequality checked"},
                 {"inequality_violations", "int", "non-seed sites violating the inequality"},
                 {"type1_sites_checked", "int", "type-1 non-seed sites checked in runs"},
                 {"interference_violations", "int", "type-1 non-seeds taken over early"},
                 {"zero_seed_trials", "int", "trials without seeds"},
                 {"zero_seed_reached", "int", "zero-seed trials where type 1 reached R"}};
    e.validate = [](const ParamMap& m, int) {
        in_range(m, "d", 1, 8);
        require(param_real(m, "C") >= 1.0, "C must be at least 1");
        positive(m, "lambda");
        nonnegative(m, "rho");
        in_range(m, "R", 1, 500);
        in_range(m, "sites", 0, 100'000'000);
    };
    e.run = [](const ParamMap& m, const RunContext& ctx) {
        auto c = coupling_consistency(param_real(m, "C"), param_real(m, "lambda"),
                                      param_real(m, "rho"), static_cast<int>(param_int(m, "d")),
                                      static_cast<int>(param_int(m, "R")), ctx.trials, ctx.plan,
                                      static_cast<std::uint64_t>(param_int(m, "sites")));
        Row r;
        add(r, c.seed_density);
        add(r, c.sites_checked);
        add(r, c.inequality_violations);
        add(r, c.type1_sites_checked);
        add(r, c.interference_violations);
        add(r, c.zero_seed_trials);
        add(r, c.zero_seed_reached);
        return r;
    };
    return e;
}

Experiment bounds_experiment()
{
    Experiment e;
    e.name = "bounds";
    e.help = "Poisson Chernoff bounds against empirical tail frequencies";
    e.params = {{"mu", "100", "Poisson mean"},
                {"eps", "0.1", "relative deviation"},
                {"C", "1.5", "large-deviation multiple"},
                {"samples", "1000000", "Poisson draws"}};
    e.outputs = {{"lower_bound", "real", "bound on P(P < (1-eps) mu)"},
                 {"upper_bound", "real", "bound on P(P > (1+eps) mu)"},
                 {"above_C_bound", "real", "bound on P(P > C mu)"},
                 {"theta", "real", "minimizing theta"},
                 {"emp_lower", "real", "empirical P(P < (1-eps) mu)"},
                 {"emp_upper", "real", "empirical P(P > (1+eps) mu)"},
                 {"emp_above_C", "real", "empirical P(P > C mu)"},
                 {"holds", "bool", "every empirical frequency is at most its bound"}};
    e.validate = [](const ParamMap& m, int) {
        positive(m, "mu");
        open_unit(m, "eps");
        positive(m, "C");
        in_range(m, "samples", 1, 1'000'000'000);
    };
    e.run = [](const ParamMap& m, const RunContext& ctx) {
        double mu = param_real(m, "mu"), eps = param_real(m, "eps"), C = param_real(m, "C");
        auto b = poisson_chernoff_bounds(mu, eps, C);
        auto t = empirical_poisson_tails(mu, eps, C,
                                         static_cast<std::uint64_t>(param_int(m, "samples")),
                                         hash_combine(ctx.plan.master_seed, ctx.plan.cell));
        Row r;
        add(r, b.lower_tail);
        add(r, b.upper_tail);
        add(r, b.above_C);
        add(r, b.theta);
        add(r, t.lower_tail);
        add(r, t.upper_tail);
        add(r, t.above_C);
        add(r, t.lower_tail <= b.lower_tail && t.upper_tail <= b.upper_tail &&
                   t.above_C <= b.above_C);
        return r;
    };
    return e;
}

Experiment truncation_experiment()
{
    Experiment e;
    e.name = "truncation";
    e.help = "truncated type-1 clocks: infinite-clock rate and stochastic domination of Exp(1)";
    e.params = {{"K", "1", "cutoff"},
                {"q", "0.3", "semi-mark probability"},
                {"samples", "100000", "edges sampled"}};
    e.outputs = columns(
        wilson_columns("p_infinite", "fraction of infinite clocks"),
        std::vector<ColumnSpec>{{"expected_p_infinite", "real", "q exp(-K)"},
                                {"max_cdf_excess", "real", "max of F_n(x) - (1 - exp(-x))"},
                                {"dkw_band", "real", "DKW band at level 0.01"},
                                {"dominated", "bool", "max_cdf_excess <= dkw_band"},
                                {"ks_finite_part", "real", "KS distance to Exp(1) when q = 0"}});
    e.validate = [](const ParamMap& m, int) {
        positive(m, "K");
        double q = param_real(m, "q");
        require(q >= 0.0 && q < 1.0, "q must lie in [0, 1)");
        in_range(m, "samples", 1, 1'000'000'000);
    };
    e.run = [](const ParamMap& m, const RunContext& ctx) {
        auto s = truncated_clock_stats(param_real(m, "K"), param_real(m, "q"),
                                       static_cast<std::uint64_t>(param_int(m, "samples")),
                                       hash_combine(ctx.plan.master_seed, ctx.plan.cell));
        Row r;
        add(r, s.p_infinite);
        add(r, s.expected_p_infinite);
        add(r, s.max_cdf_excess);
        add(r, s.dkw_band);
        add(r, s.dominated);
        add(r, s.ks_finite_part);
        return r;
    };
    return e;
}

}  // namespace

const std::vector<Experiment>& experiments()
{
    static const std::vector<Experiment> all = {
        extinction_experiment(), brw_experiment(),      subbox_experiment(),
        highway_experiment(),    spine_experiment(),    dstar_experiment(),
        goodbox_experiment(),    shape_experiment(),    closed_experiment(),
        seeds_experiment(),      ssp_experiment(),      coupling_experiment(),
        bounds_experiment(),     truncation_experiment(),
    };
    return all;
}

}  // namespace fppc
