#include "fppc/ssp_lab/ssp_lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

#include "fppc/engine/world.hpp"
#include "fppc/model/errors.hpp"

namespace fppc {

namespace {

constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Calls f(edge_id) for every edge incident to the site at `coords`, including
// edges that leave the box.
template <class F>
void for_each_incident_edge(std::vector<int>& coords, std::uint64_t key, F&& f)
{
    for (std::size_t a = 0; a < coords.size(); ++a) {
        f(lattice_edge_id(key, static_cast<int>(a)));
        coords[a] -= 1;
        f(lattice_edge_id(LatticeSite::key_of(coords), static_cast<int>(a)));
        coords[a] += 1;
    }
}

void build_clusters(SeedField& s, const LatticeTopology& topo)
{
    const std::size_t n = topo.size();
    std::vector<Node> up(n);
    std::iota(up.begin(), up.end(), Node{0});
    auto find = [&](Node x) {
        while (up[x] != x) {
            up[x] = up[up[x]];
            x = up[x];
        }
        return x;
    };
    for (Node x = 0; x < n; ++x) {
        if (!s.seed[x]) continue;
        topo.for_each_neighbor(x, [&](Node y, std::uint64_t, Step) {
            if (y > x && s.seed[y]) {
                Node a = find(x), b = find(y);
                if (a != b) up[std::max(a, b)] = std::min(a, b);
            }
        });
    }
    s.cluster.assign(n, kNoNode);
    std::vector<Node> id_of_root(n, kNoNode);
    for (Node x = 0; x < n; ++x) {
        if (!s.seed[x]) continue;
        Node r = find(x);
        if (id_of_root[r] == kNoNode) {
            id_of_root[r] = static_cast<Node>(s.members.size());
            s.members.emplace_back();
        }
        s.cluster[x] = id_of_root[r];
        s.members[id_of_root[r]].push_back(x);
    }
}

}  // namespace

std::uint64_t SeedField::count() const
{
    return static_cast<std::uint64_t>(std::count(seed.begin(), seed.end(), 1));
}

double SeedField::density() const
{
    return seed.empty() ? 0.0 : static_cast<double>(count()) / static_cast<double>(seed.size());
}

double type2_seed_marginal(double C, double lambda, double rho, int d)
{
    if (!(C > 0.0)) throw ConfigError("C must be positive");
    if (!(lambda >= 0.0 && rho >= 0.0)) throw ConfigError("rates must be nonnegative");
    double C2 = C * C;
    double log_clear = 2.0 * d * std::log1p(-std::exp(-C)) - 4.0 * d * lambda * C2 - rho * C2;
    return -std::expm1(log_clear);
}

SeedField label_type2_seeds(double C, double lambda, double rho, int d, int R,
                            const RandomField& field)
{
    if (!(C > 0.0)) throw ConfigError("C must be positive");
    if (!(lambda >= 0.0 && rho >= 0.0)) throw ConfigError("rates must be nonnegative");
    if (field.topology() != Topology::Lattice) throw ConfigError("seeds need a lattice field");
    RandomField f = field.with_rates(lambda, rho);
    LatticeTopology topo(d, R);
    SeedField s;
    s.d = d;
    s.radius = R;
    s.source = CoupledSeeds{C, lambda, rho};
    s.seed.assign(topo.size(), 0);
    const double C2 = C * C;
    std::vector<int> c(d);
    for (Node n = 0; n < topo.size(); ++n) {
        for (int a = 0; a < d; ++a) c[a] = topo.coord(n, a);
        bool seed = f.value(ClockKind::Conv, topo.key(n)) < C2;
        for_each_incident_edge(c, topo.key(n), [&](std::uint64_t e) {
            seed = seed || f.value(ClockKind::T1, e) >= C || f.value(ClockKind::T2, e) < C2 ||
                   f.value(ClockKind::T3, e) < C2;
        });
        s.seed[n] = seed;
    }
    build_clusters(s, topo);
    return s;
}

SeedField bernoulli_seeds(double p, int d, int R, const RandomField& field)
{
    if (!(p >= 0.0 && p < 1.0)) throw ConfigError("seed probability must lie in [0, 1)");
    LatticeTopology topo(d, R);
    SeedField s;
    s.d = d;
    s.radius = R;
    s.source = BernoulliSeeds{p};
    s.seed.assign(topo.size(), 0);
    for (Node n = 0; n < topo.size(); ++n)
        s.seed[n] = field.uniform(ClockKind::SeedMark, topo.key(n)) < p;
    build_clusters(s, topo);
    return s;
}

SublatticeCount even_sublattice_count(int d, int R, const std::vector<std::uint8_t>& indicator)
{
    LatticeTopology topo(d, R);
    if (indicator.size() != topo.size()) throw ConfigError("indicator does not match its box");
    SublatticeCount out;
    for (Node n = 0; n < topo.size(); ++n) {
        bool even = true;
        for (int a = 0; a < d; ++a) even = even && topo.coord(n, a) % 2 == 0;
        if (!even) continue;
        ++out.sites;
        out.hits += indicator[n];
    }
    return out;
}

double lag2_correlation(int d, int R, const std::vector<std::uint8_t>& indicator)
{
    LatticeTopology topo(d, R);
    if (indicator.size() != topo.size()) throw ConfigError("indicator does not match its box");
    std::vector<double> a, b;
    for (Node n = 0; n < topo.size(); ++n) {
        if (topo.coord(n, 0) + 2 > R) continue;
        a.push_back(indicator[n]);
        b.push_back(indicator[n + 2]);
    }
    return a.size() >= 2 ? pearson_correlation(a, b) : 0.0;
}

// ---------------------------------------------------------------------------

const char* to_string(SspVerdict v)
{
    switch (v) {
    case SspVerdict::RedReachedBoundary: return "red_reached_boundary";
    case SspVerdict::RedDied: return "red_died";
    case SspVerdict::OriginSeed: return "origin_seed";
    }
    return "?";
}

void SspParams::validate() const
{
    if (d < 1 || d > 8) throw ConfigError("SSP dimension must lie in [1, 8]");
    if (!(kappa > 1.0)) throw ConfigError("kappa must exceed 1");
    if (auto* b = std::get_if<BernoulliSeeds>(&seeds)) {
        if (!(b->p >= 0.0 && b->p < 1.0)) throw ConfigError("seed probability must lie in [0, 1)");
    } else {
        const auto& c = std::get<CoupledSeeds>(seeds);
        if (!(c.C > 0.0)) throw ConfigError("C must be positive");
        if (!(c.lambda >= 0.0 && c.rho >= 0.0)) throw ConfigError("rates must be nonnegative");
    }
    if (auto* r = std::get_if<ExpCappedRed>(&red)) {
        if (!(r->cap > 0.0)) throw ConfigError("red clock cap must be positive");
        if (r->cap > kappa) throw ConfigError("red clocks must not exceed kappa");
    }
}

namespace {

struct Ring {
    double time;
    Node target;
    Node source;
    bool red;
};

struct RingOrder {
    bool operator()(const Ring& a, const Ring& b) const noexcept
    {
        if (a.time != b.time) return a.time > b.time;
        if (a.target != b.target) return a.target > b.target;
        return a.source > b.source;
    }
};

}  // namespace

SspState run_ssp(const SspParams& params, const SeedField& seeds, const RandomField& field)
{
    params.validate();
    if (seeds.d != params.d) throw ConfigError("seed field dimension does not match params");
    LatticeTopology topo(seeds.d, seeds.radius);
    if (seeds.size() != topo.size()) throw ConfigError("seed field does not match its box");

    const bool coupled = std::holds_alternative<CoupledSeeds>(params.seeds);
    double red_cap = kInfinity;
    if (coupled) red_cap = std::get<CoupledSeeds>(params.seeds).C;
    else if (auto* r = std::get_if<ExpCappedRed>(&params.red)) red_cap = r->cap;

    SspState st;
    st.d = seeds.d;
    st.radius = seeds.radius;
    st.color.assign(topo.size(), Color::Uncolored);
    st.T.assign(topo.size(), kInfinity);
    const Node origin = topo.root();
    if (seeds.seed[origin]) {
        st.verdict = SspVerdict::OriginSeed;
        return st;
    }

    std::priority_queue<Ring, std::vector<Ring>, RingOrder> q;
    std::uint64_t red_pending = 0;
    const int R = seeds.radius;

    auto launch = [&](Node u, double t, bool red) {
        topo.for_each_neighbor(u, [&](Node v, std::uint64_t edge, Step) {
            if (st.color[v] != Color::Uncolored) return;
            double x;
            if (red) {
                double t1 = field.value(ClockKind::T1, edge);
                if (coupled && t1 >= red_cap)
                    throw InvariantViolation("capped red clock at a non-seed site");
                x = std::min(t1, red_cap);
                ++red_pending;
            } else {
                x = params.kappa;
            }
            q.push({t + x, v, u, red});
        });
    };
    auto paint = [&](Node v, double t, Color c) {
        st.color[v] = c;
        st.T[v] = t;
        if (c == Color::Red) ++st.red_sites;
        else ++st.blue_sites;
        if (c == Color::Blue && topo.distance(v) == R) st.blue_on_boundary = true;
    };

    paint(origin, 0.0, Color::Red);
    if (topo.distance(origin) == R) {
        st.verdict = SspVerdict::RedReachedBoundary;
        return st;
    }
    launch(origin, 0.0, true);

    while (!q.empty()) {
        if (red_pending == 0) break;
        Ring r = q.top();
        q.pop();
        if (r.red) --red_pending;
        st.stop_time = r.time;
        if (st.color[r.target] != Color::Uncolored) continue;
        if (seeds.seed[r.target]) {
            // The whole seed cluster turns blue at this instant.
            for (Node w : seeds.members[seeds.cluster[r.target]]) {
                if (st.color[w] != Color::Uncolored) continue;
                paint(w, r.time, Color::Blue);
            }
            for (Node w : seeds.members[seeds.cluster[r.target]])
                if (st.T[w] == r.time && st.color[w] == Color::Blue) launch(w, r.time, false);
            continue;
        }
        if (r.red) {
            paint(r.target, r.time, Color::Red);
            if (topo.distance(r.target) == R) {
                st.verdict = SspVerdict::RedReachedBoundary;
                return st;
            }
            launch(r.target, r.time, true);
        } else {
            paint(r.target, r.time, Color::Blue);
            launch(r.target, r.time, false);
        }
    }
    st.verdict = SspVerdict::RedDied;
    return st;
}

SspState run_ssp(const SspParams& params, int R, const RandomField& field)
{
    params.validate();
    if (auto* b = std::get_if<BernoulliSeeds>(&params.seeds))
        return run_ssp(params, bernoulli_seeds(b->p, params.d, R, field), field);
    const auto& c = std::get<CoupledSeeds>(params.seeds);
    return run_ssp(params, label_type2_seeds(c.C, c.lambda, c.rho, params.d, R, field), field);
}

RedSurvivalCurve estimate_red_survival(const SspParams& base, int R, int trials,
                                       const std::vector<double>& p_grid, const TrialPlan& plan)
{
    base.validate();
    if (trials <= 0) throw ConfigError("trials must be positive");
    if (p_grid.empty()) throw ConfigError("p grid must be nonempty");
    RedSurvivalCurve curve;
    curve.kappa = base.kappa;
    curve.d = base.d;
    curve.radius = R;
    ModelParams mp = ModelParams::lattice(base.d, 1.0, 0.0);
    for (std::size_t g = 0; g < p_grid.size(); ++g) {
        SspParams p = base;
        p.seeds = BernoulliSeeds{p_grid[g]};
        p.validate();
        TrialPlan cell = plan;
        cell.cell = plan.cell + g;
        auto verdicts = parallel_map<std::uint8_t>(trials, plan.workers, [&](std::size_t i) {
            RandomField f(mp, cell.master_seed, cell.trial_index(i));
            SspState s = run_ssp(p, R, f);
            if (s.verdict == SspVerdict::OriginSeed) return std::uint8_t{2};
            return static_cast<std::uint8_t>(s.red_survived() ? 1 : 0);
        });
        RedSurvivalPoint pt;
        pt.p = p_grid[g];
        pt.trials = trials;
        for (auto v : verdicts) {
            if (v == 2) ++pt.origin_seed;
            else if (v == 1) ++pt.red_survived;
            else ++pt.red_died;
        }
        pt.p_red = wilson_interval(pt.red_survived, pt.red_survived + pt.red_died);
        curve.points.push_back(pt);
    }
    // 1 - f = c p through the origin, weighted by the binomial precision at the fit.
    double sxy = 0.0, sxx = 0.0;
    for (const auto& pt : curve.points) {
        double n = static_cast<double>(pt.p_red.trials);
        if (n == 0 || pt.p <= 0) continue;
        sxy += n * pt.p * (1.0 - pt.p_red.point);
        sxx += n * pt.p * pt.p;
    }
    if (sxx > 0) {
        curve.c_hat = sxy / sxx;
        double rss = 0.0;
        int m = 0;
        for (const auto& pt : curve.points) {
            double n = static_cast<double>(pt.p_red.trials);
            if (n == 0 || pt.p <= 0) continue;
            double r = (1.0 - pt.p_red.point) - curve.c_hat * pt.p;
            rss += n * r * r;
            ++m;
        }
        curve.c_hat_se = m > 1 ? std::sqrt(rss / (m - 1) / sxx) : 0.0;
    }
    return curve;
}

// ---------------------------------------------------------------------------

CouplingReport coupling_consistency(double C, double lambda, double rho, int d, int R, int trials,
                                    const TrialPlan& plan, std::uint64_t sampled_sites)
{
    if (!(C >= 1.0)) throw ConfigError("coupling check needs C >= 1");
    if (trials <= 0) throw ConfigError("trials must be positive");
    ModelParams mp = ModelParams::lattice(d, lambda, rho, ClockMode::Resample);
    mp.validate();
    const std::uint64_t per_trial = (sampled_sites + trials - 1) / trials;

    struct One {
        std::uint64_t seeds = 0, sites = 0, checked = 0, violations = 0;
        std::uint64_t t1_checked = 0, interference = 0;
        bool zero_seed = false, reached = false;
    };
    auto runs = parallel_map<One>(trials, plan.workers, [&](std::size_t i) {
        One o;
        RandomField f(mp, plan.master_seed, plan.trial_index(i));
        SeedField s = label_type2_seeds(C, lambda, rho, d, R, f);
        LatticeTopology topo(d, R);
        o.seeds = s.count();
        o.sites = s.size();

        // Largest type-1 clock out of x, and the clock inequality at x.
        std::vector<int> c(d);
        auto clocks = [&](Node x, double& max_t1) {
            for (int a = 0; a < d; ++a) c[a] = topo.coord(x, a);
            max_t1 = 0.0;
            double min_other = f.value(ClockKind::Conv, topo.key(x));
            for_each_incident_edge(c, topo.key(x), [&](std::uint64_t e) {
                max_t1 = std::max(max_t1, f.value(ClockKind::T1, e));
                min_other = std::min({min_other, f.value(ClockKind::T2, e), f.value(ClockKind::T3, e)});
            });
            return max_t1 < min_other;
        };

        std::vector<Node> non_seeds;
        for (Node x = 0; x < s.size(); ++x)
            if (!s.seed[x]) non_seeds.push_back(x);
        for (std::uint64_t j = 0; j < per_trial && !non_seeds.empty(); ++j) {
            Node x = non_seeds[hash_combine(f.trial_index(), j) % non_seeds.size()];
            double m;
            ++o.checked;
            if (!clocks(x, m)) ++o.violations;
        }

        LatticeWorld w(mp, f, R);
        TrialOutcome out = w.run();
        o.zero_seed = o.seeds == 0;
        o.reached = out.verdict == Verdict::SurvivedToTarget;
        for (Node x = 0; x < w.node_count(); ++x) {
            const SiteRecord& r = w.record(x);
            if (s.seed[x] || !(r.tau1 < kInfinity)) continue;
            double m;
            clocks(x, m);
            ++o.t1_checked;
            // x must still be type 1 when its slowest type-1 attempt fires, up
            // to the time the run was stopped.
            double due = r.tau1 + m;
            if (r.tau2 < std::min(due, w.clock())) ++o.interference;
        }
        return o;
    });

    CouplingReport rep;
    rep.C = C;
    rep.lambda = lambda;
    rep.rho = rho;
    rep.d = d;
    rep.radius = R;
    rep.trials = trials;
    std::uint64_t seeds = 0, sites = 0;
    for (const One& o : runs) {
        seeds += o.seeds;
        sites += o.sites;
        rep.sites_checked += o.checked;
        rep.inequality_violations += o.violations;
        rep.type1_sites_checked += o.t1_checked;
        rep.interference_violations += o.interference;
        rep.zero_seed_trials += o.zero_seed;
        rep.zero_seed_reached += o.zero_seed && o.reached;
    }
    rep.seed_density = sites ? static_cast<double>(seeds) / static_cast<double>(sites) : 0.0;
    return rep;
}

}  // namespace fppc
