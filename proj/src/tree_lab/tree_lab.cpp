#include "fppc/tree_lab/tree_lab.hpp"

#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>
#include <string>

#include "fppc/model/errors.hpp"

namespace fppc {

namespace {

constexpr double kInfinity = std::numeric_limits<double>::infinity();

int child_count(int d, bool is_root) { return is_root ? d : d - 1; }

void check_degree(int d)
{
    if (d < 3 || d > 255) throw ConfigError("tree degree must lie in [3, 255]");
}

RandomField tree_field(int d, double lambda, double rho, const TrialPlan& plan, std::uint64_t i)
{
    return RandomField(ModelParams::tree(d, lambda, rho), plan.master_seed, plan.trial_index(i));
}

TrialPlan sub_plan(const TrialPlan& plan, std::uint64_t part)
{
    TrialPlan p = plan;
    p.master_seed = hash_combine(plan.master_seed, part);
    return p;
}

TreeSite descend(TreeSite s, int d, std::span<const int> labels)
{
    for (int l : labels) s = s.child(d, l);
    return s;
}

struct MinSearch {
    const RandomField& field;
    int d;
    int depth;
    double best = kInfinity;
    std::vector<int> path, best_path;
    std::uint64_t visited = 0;

    void greedy(std::uint64_t key, bool is_root)
    {
        double t = 0.0;
        best_path.assign(depth, 0);
        for (int level = 0; level < depth; ++level) {
            int nc = child_count(d, is_root && level == 0);
            double cheapest = kInfinity;
            int pick = 0;
            for (int i = 0; i < nc; ++i) {
                double e = field.value(ClockKind::T1, TreeSite::child_key(key, i));
                if (e < cheapest) {
                    cheapest = e;
                    pick = i;
                }
            }
            t += cheapest;
            best_path[level] = pick;
            key = TreeSite::child_key(key, pick);
        }
        best = t;
    }

    // Ties are kept alive so the lexicographically first minimizer wins.
    void go(std::uint64_t key, bool is_root, double partial, int level)
    {
        ++visited;
        if (level == depth) {
            if (partial < best || (partial == best && path < best_path)) {
                best = partial;
                best_path = path;
            }
            return;
        }
        int nc = child_count(d, is_root);
        for (int i = 0; i < nc; ++i) {
            std::uint64_t ck = TreeSite::child_key(key, i);
            double t = partial + field.value(ClockKind::T1, ck);
            if (t > best) continue;
            path[level] = i;
            go(ck, false, t, level + 1);
        }
    }
};

}  // namespace

MinPath min_passage_below(const TreeSite& from, int d, int depth, const RandomField& field)
{
    check_degree(d);
    if (depth < 0) throw ConfigError("depth must be nonnegative");
    if (field.topology() != Topology::Tree) throw ConfigError("tree search on a lattice field");
    MinSearch s{field, d, depth, kInfinity, {}, {}, 0};
    s.path.assign(depth, 0);
    s.greedy(from.key(), from.is_root());
    s.go(from.key(), from.is_root(), 0.0, 0);
    MinPath out;
    out.time = s.best;
    out.leaf = descend(from, d, s.best_path);
    out.nodes_visited = s.visited;
    return out;
}

double brw_min_exact(int d, int n, const RandomField& field)
{
    if (n > kBrwExactMaxDepth)
        throw ConfigError("brw_min_exact: n = " + std::to_string(n) + " exceeds " +
                          std::to_string(kBrwExactMaxDepth) + "; use the cloud method");
    return min_passage_below(TreeSite(), d, n, field).time;
}

double brw_min_cloud(int d, int n, std::size_t width, const RandomField& field)
{
    check_degree(d);
    if (n < 0) throw ConfigError("depth must be nonnegative");
    if (width < 1000) throw ConfigError("cloud width must be >= 1000");
    using Particle = std::pair<double, std::uint64_t>;
    std::vector<Particle> cur{{0.0, TreeSite::kRootKey}}, next;
    for (int level = 0; level < n; ++level) {
        int nc = child_count(d, level == 0);
        next.clear();
        next.reserve(cur.size() * nc);
        for (const auto& [t, key] : cur) {
            for (int i = 0; i < nc; ++i) {
                std::uint64_t ck = TreeSite::child_key(key, i);
                next.emplace_back(t + field.value(ClockKind::T1, ck), ck);
            }
        }
        if (next.size() > width) {
            std::nth_element(next.begin(), next.begin() + static_cast<std::ptrdiff_t>(width),
                             next.end(),
                             [](const Particle& a, const Particle& b) { return a.first < b.first; });
            next.resize(width);
        }
        cur.swap(next);
    }
    double best = kInfinity;
    for (const auto& p : cur) best = std::min(best, p.first);
    return best;
}

double brw_speed(int d)
{
    check_degree(d);
    double target = std::log(static_cast<double>(d - 1));
    auto f = [&](double g) { return g - 1.0 - std::log(g) - target; };
    boost::math::tools::eps_tolerance<double> tol(50);
    std::uintmax_t iters = 200;
    auto [lo, hi] = boost::math::tools::toms748_solve(f, 1e-12, 1.0, tol, iters);
    return 0.5 * (lo + hi);
}

double BrwStats::se() const
{
    return trials > 0 ? sd_Mn / std::sqrt(static_cast<double>(trials)) : 0.0;
}

BrwStats estimate_brw(int d, int n, int trials, BrwMethod method, std::size_t width,
                      const TrialPlan& plan)
{
    if (trials <= 0) throw ConfigError("trials must be positive");
    if (method == BrwMethod::ExactPrunedDFS && n > kBrwExactMaxDepth)
        throw ConfigError("brw exact method: n exceeds " + std::to_string(kBrwExactMaxDepth) +
                          "; use the cloud method");
    if (method == BrwMethod::TruncatedCloud && width < 1000)
        throw ConfigError("cloud width must be >= 1000");
    BrwStats s;
    s.d = d;
    s.n = n;
    s.trials = trials;
    s.method = method;
    s.width = method == BrwMethod::TruncatedCloud ? width : 0;
    s.samples = parallel_map<double>(trials, plan.workers, [&](std::size_t i) {
        RandomField f = tree_field(d, 1.0, 0.0, plan, i);
        return method == BrwMethod::ExactPrunedDFS ? brw_min_exact(d, n, f)
                                                   : brw_min_cloud(d, n, width, f);
    });
    Summary sum = summarize(s.samples);
    s.mean_Mn = sum.mean;
    s.sd_Mn = sum.sd;
    s.ratio = n > 0 ? sum.mean / n : 0.0;
    return s;
}

// ---------------------------------------------------------------------------

SubBoxVerdict subbox_is_good(const TreeSite& z, int d, int k, double eps, double lambda,
                             const RandomField& field, std::size_t max_witnesses,
                             std::uint64_t h1_cap)
{
    check_degree(d);
    if (k < 1 || k > kSubBoxMaxDepth)
        throw ConfigError("sub-box depth must lie in [1, " + std::to_string(kSubBoxMaxDepth) + "]");
    if (!(eps > 0.0 && eps < 1.0)) throw ConfigError("epsilon must lie in (0, 1)");
    if (!(lambda > 0.0)) throw ConfigError("lambda must be positive");
    if (field.topology() != Topology::Tree) throw ConfigError("tree search on a lattice field");

    const double fast1 = (1.0 - eps) * k;
    const double slow2 = (1.0 - eps * eps) * k;
    const std::size_t need = std::max<std::size_t>(max_witnesses, 2);
    SubBoxVerdict out;
    std::vector<int> path(k, 0);
    std::vector<std::vector<int>> found;

    auto done = [&] { return found.size() >= need && out.h1_count >= h1_cap; };
    auto go = [&](auto&& self, std::uint64_t key, bool is_root, double t1, double td,
                  int level) -> void {
        ++out.nodes_visited;
        if (level == k) {
            ++out.h1_count;
            if (td >= slow2 && found.size() < need) found.push_back(path);
            return;
        }
        int nc = child_count(d, is_root);
        for (int i = 0; i < nc && !done(); ++i) {
            std::uint64_t ck = TreeSite::child_key(key, i);
            double a = t1 + field.value(ClockKind::T1, ck);
            if (a > fast1) continue;
            path[level] = i;
            self(self, ck, false, a, td + field.unit(ClockKind::Td, ck), level + 1);
        }
    };
    go(go, z.key(), z.is_root(), 0.0, 0.0, 0);

    out.good = found.size() >= 2;
    if (h1_cap > 0) out.h1_count = std::min(out.h1_count, h1_cap);
    std::size_t keep = std::min(found.size(), max_witnesses);
    for (std::size_t i = 0; i < keep; ++i) out.witnesses.push_back(descend(z, d, found[i]));
    return out;
}

SubBoxResult estimate_subbox_good_prob(int k, double eps, double lambda, int d, int trials,
                                       const TrialPlan& plan, std::uint64_t h1_cap)
{
    if (trials <= 0) throw ConfigError("trials must be positive");
    struct One {
        bool good = false;
        std::uint64_t h1 = 0;
    };
    TreeSite z = TreeSite().child(d, 0);
    auto runs = parallel_map<One>(trials, plan.workers, [&](std::size_t i) {
        RandomField f = tree_field(d, lambda, 0.0, plan, i);
        SubBoxVerdict v = subbox_is_good(z, d, k, eps, lambda, f, 2, h1_cap);
        return One{v.good, v.h1_count};
    });
    SubBoxResult r;
    r.k = k;
    r.epsilon = eps;
    r.lambda = lambda;
    r.d = d;
    r.trials = trials;
    r.h1_cap = h1_cap;
    std::uint64_t good = 0;
    double h1 = 0.0;
    for (const One& o : runs) {
        good += o.good;
        h1 += static_cast<double>(o.h1);
    }
    r.p_good = wilson_interval(good, trials);
    r.mean_h1_count_capped = h1 / trials;
    return r;
}

std::uint64_t highway_branching(int k, double eps, double lambda, int d, int r,
                                int offspring_cap, const RandomField& field,
                                std::vector<TreeSite>* endpoints)
{
    if (r < 0 || r > 6) throw ConfigError("highway levels must lie in [0, 6]");
    if (offspring_cap < 1 || offspring_cap > 16)
        throw ConfigError("offspring cap must lie in [1, 16]");
    std::vector<TreeSite> level{TreeSite()}, next;
    for (int i = 0; i < r && !level.empty(); ++i) {
        next.clear();
        for (const TreeSite& z : level) {
            SubBoxVerdict v = subbox_is_good(z, d, k, eps, lambda, field,
                                             static_cast<std::size_t>(offspring_cap));
            if (!v.good) continue;
            next.insert(next.end(), v.witnesses.begin(), v.witnesses.end());
        }
        level.swap(next);
    }
    if (endpoints) *endpoints = level;
    return level.size();
}

HighwayStats estimate_highway(int k, double eps, double lambda, int d, int r, int offspring_cap,
                              int trials, const TrialPlan& plan)
{
    if (trials <= 0) throw ConfigError("trials must be positive");
    HighwayStats h;
    h.k = k;
    h.r = r;
    h.d = d;
    h.offspring_cap = offspring_cap;
    h.trials = trials;
    h.epsilon = eps;
    h.lambda = lambda;
    h.counts = parallel_map<std::uint64_t>(trials, plan.workers, [&](std::size_t i) {
        return highway_branching(k, eps, lambda, d, r, offspring_cap,
                                 tree_field(d, lambda, 0.0, plan, i));
    });
    std::vector<double> xs(h.counts.begin(), h.counts.end());
    Summary s = summarize(xs);
    h.mean_count = s.mean;
    h.sd_count = s.sd;
    return h;
}

// ---------------------------------------------------------------------------

std::int64_t spine_edge_count(int k, int d)
{
    check_degree(d);
    if (k < 1) throw ConfigError("k must be positive");
    std::int64_t len = static_cast<std::int64_t>(k) * k;
    return static_cast<std::int64_t>(d - 1) * len + 1;
}

double spine_type2_log_probability(int k, double lambda, int d)
{
    if (!(lambda >= 0.0)) throw ConfigError("lambda must be nonnegative");
    double k3 = static_cast<double>(k) * k * k;
    return -lambda * k3 * static_cast<double>(spine_edge_count(k, d));
}

SpineEstimate spine_probability(int k, double eps, double lambda, int d, int trials,
                                const TrialPlan& plan)
{
    if (k < 1) throw ConfigError("k must be positive");
    if (k > kSpineMaxK)
        throw ConfigError("spine Monte Carlo needs k <= " + std::to_string(kSpineMaxK) +
                          "; use spine_edge_count / spine_type2_log_probability for larger k");
    if (!(eps > 0.0 && eps <= 1.0)) throw ConfigError("epsilon must lie in (0, 1]");
    if (trials <= 0) throw ConfigError("trials must be positive");
    const int depth = k * k;
    const double threshold = (1.0 - eps) * depth;
    TreeSite z = TreeSite().child(d, 0);
    auto times = parallel_map<double>(trials, plan.workers, [&](std::size_t i) {
        return min_passage_below(z, d, depth, tree_field(d, lambda, 0.0, plan, i)).time;
    });
    std::uint64_t hits = 0;
    for (double t : times) hits += t <= threshold;

    SpineEstimate s;
    s.k = k;
    s.epsilon = eps;
    s.lambda = lambda;
    s.d = d;
    s.trials = trials;
    s.p_type1_part = wilson_interval(hits, trials);
    s.mean_spine_time = summarize(times).mean;
    s.edge_count = spine_edge_count(k, d);
    s.log_p_type2_part = spine_type2_log_probability(k, lambda, d);
    s.p_type2_part = std::exp(s.log_p_type2_part);
    s.log_p_spine = std::log(s.p_type1_part.point) + s.log_p_type2_part;
    s.p_spine = std::exp(s.log_p_spine);
    return s;
}

double fit_spine_decay(const std::vector<SpineEstimate>& estimates)
{
    if (estimates.empty()) throw ConfigError("fit_spine_decay: no estimates");
    double c = 0.0;
    for (const auto& e : estimates) {
        double k5 = std::pow(static_cast<double>(e.k), 5);
        c = std::max(c, -e.log_p_spine / k5);
    }
    return c;
}

// ---------------------------------------------------------------------------

double dstar_min_upward(const TreeSite& x, int d, int depth, const RandomField& field,
                        int excluded_child)
{
    check_degree(d);
    if (depth < 0) throw ConfigError("depth must be nonnegative");
    if (field.topology() != Topology::Tree) throw ConfigError("tree search on a lattice field");
    if (excluded_child >= child_count(d, x.is_root()))
        throw ConfigError("excluded child label out of range");
    auto up = [&](auto&& self, std::uint64_t key, bool is_root, int level, int skip) -> double {
        if (level == depth) return 0.0;
        double best = kInfinity;
        int nc = child_count(d, is_root);
        for (int i = 0; i < nc; ++i) {
            if (i == skip) continue;
            std::uint64_t ck = TreeSite::child_key(key, i);
            // Leaf-first accumulation, as a path summed from the leaf upward.
            double below = self(self, ck, false, level + 1, -1);
            best = std::min(best, below + field.value(ClockKind::Tu, ck));
        }
        return best;
    };
    return up(up, x.key(), x.is_root(), 0, excluded_child);
}

DStarEstimate dstar_probability(int k, double lambda, int d, int trials, const TrialPlan& plan)
{
    if (k < 1 || k > kDStarMaxK)
        throw ConfigError("D* needs k in [1, " + std::to_string(kDStarMaxK) + "]");
    if (!(lambda > 0.0)) throw ConfigError("lambda must be positive");
    if (trials <= 0) throw ConfigError("trials must be positive");
    TreeSite x = TreeSite().child(d, 0);
    const double threshold = 10.0 * k;
    DStarEstimate e;
    e.k = k;
    e.lambda = lambda;
    e.d = d;
    e.trials = trials;
    e.outcomes = parallel_map<std::uint8_t>(trials, plan.workers, [&](std::size_t i) {
        RandomField f = tree_field(d, lambda, 0.0, plan, i);
        return static_cast<std::uint8_t>(dstar_min_upward(x, d, k * k, f, 0) >= threshold);
    });
    std::uint64_t hits = 0;
    for (auto o : e.outcomes) hits += o;
    e.p = wilson_interval(hits, trials);
    return e;
}

// ---------------------------------------------------------------------------

double tree_box_size(int d, int n)
{
    check_degree(d);
    if (n < 0) throw ConfigError("box depth must be nonnegative");
    double dm1 = d - 1.0;
    return 1.0 + d * (std::pow(dm1, n) - 1.0) / (d - 2.0);
}

GoodBoxReport good_box_probability(int k, int r, double eps, double alpha, double lambda,
                                   double rho, int d, int trials, const TrialPlan& plan,
                                   int offspring_cap)
{
    if (k < 1 || k > kDStarMaxK)
        throw ConfigError("good box needs k in [1, " + std::to_string(kDStarMaxK) + "]");
    if (!(alpha > 1.0)) throw ConfigError("alpha must exceed 1");
    if (!(rho >= 0.0)) throw ConfigError("rho must be nonnegative");
    if (trials <= 0) throw ConfigError("trials must be positive");

    GoodBoxReport g;
    g.k = k;
    g.r = r;
    g.d = d;
    g.trials = trials;
    g.offspring_cap = offspring_cap;
    g.epsilon = eps;
    g.alpha = alpha;
    g.lambda = lambda;
    g.rho = rho;

    HighwayStats hw =
        estimate_highway(k, eps, lambda, d, r, offspring_cap, trials, sub_plan(plan, 1));
    const double need = std::pow(alpha, r);
    std::uint64_t g1 = 0;
    for (auto c : hw.counts) g1 += static_cast<double>(c) > need;
    g.p_g1 = wilson_interval(g1, trials);
    g.mean_endpoints = hw.mean_count;

    // At least two of the observed endpoints grow a spine, averaged over G1 trials.
    SpineEstimate sp = spine_probability(k, eps, lambda, d, trials, sub_plan(plan, 2));
    double acc_max = -kInfinity;
    std::vector<double> logs;
    for (auto c : hw.counts) {
        if (!(static_cast<double>(c) > need)) continue;
        double l = log_prob_at_least_two(static_cast<double>(c), sp.log_p_spine);
        logs.push_back(l);
        acc_max = std::max(acc_max, l);
    }
    if (logs.empty() || acc_max == -kInfinity) {
        g.log_p_g2_given_g1 = -kInfinity;
    } else {
        double s = 0.0;
        for (double l : logs) s += std::exp(l - acc_max);
        g.log_p_g2_given_g1 = acc_max + std::log(s / static_cast<double>(logs.size()));
    }

    DStarEstimate ds = dstar_probability(k, lambda, d, trials, sub_plan(plan, 3));
    g.p_dstar = ds.p;
    g.highway_sites = 2 * k * r + 1;
    g.log_p_g3 = g.highway_sites * std::log(ds.p.point);

    g.box_size = tree_box_size(d, k * r + k * k);
    g.log_p_g4 = -3.0 * rho * (k * r + k * k) * g.box_size;

    g.log_product = std::log(g.p_g1.point) + g.log_p_g2_given_g1 + g.log_p_g3 + g.log_p_g4;
    g.product = std::exp(g.log_product);
    return g;
}

}  // namespace fppc
