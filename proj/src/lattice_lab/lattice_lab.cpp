#include "fppc/lattice_lab/lattice_lab.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>

#include "fppc/model/errors.hpp"

namespace fppc {

namespace {

constexpr double kInfinity = std::numeric_limits<double>::infinity();

std::uint64_t count_if_verdict(const std::vector<TrialOutcome>& xs, Verdict v)
{
    return static_cast<std::uint64_t>(
        std::count_if(xs.begin(), xs.end(), [&](const TrialOutcome& o) { return o.verdict == v; }));
}

}  // namespace

SurvivalEstimate estimate_extinction(const ModelParams& params, int R, int trials,
                                     const TrialPlan& plan, Caps caps, EngineOptions opts)
{
    params.validate();
    if (R < 0) throw ConfigError("target must be nonnegative");
    if (trials <= 0) throw ConfigError("trials must be positive");
    auto outs = parallel_map<TrialOutcome>(trials, plan.workers, [&](std::size_t i) {
        RandomField f(params, plan.master_seed, plan.trial_index(i));
        return run_trial(params, f, R, caps, opts);
    });
    SurvivalEstimate s;
    s.params = params;
    s.radius = R;
    s.trials = trials;
    s.survived = count_if_verdict(outs, Verdict::SurvivedToTarget);
    s.extinct = count_if_verdict(outs, Verdict::Extinct);
    s.capped = count_if_verdict(outs, Verdict::Capped);
    s.confined = count_if_verdict(outs, Verdict::Confined);
    s.p_survived = wilson_interval(s.survived, trials);
    s.p_extinct = wilson_interval(s.extinct, trials);
    s.p_capped = wilson_interval(s.capped, trials);
    for (const auto& o : outs) {
        s.mean_stop_time += o.stop_time / trials;
        s.mean_conversions += static_cast<double>(o.conversions) / trials;
        s.approximate = s.approximate || o.approximate;
    }
    return s;
}

// ---------------------------------------------------------------------------

std::vector<Direction> shape_directions(int d)
{
    if (d < 2) throw ConfigError("shape directions need d >= 2");
    std::vector<Direction> out;
    if (d == 2) {
        const int n = 18;
        for (int j = 0; j < n; ++j) {
            double th = (std::numbers::pi / 4.0) * j / (n - 1);
            std::string name = j == 0 ? "axis" : j == n - 1 ? "diagonal" : "angle" + std::to_string(j);
            out.push_back({name, {std::cos(th), std::sin(th)}});
        }
        return out;
    }
    std::vector<double> axis(d, 0.0), face(d, 0.0), diag(d, 1.0 / std::sqrt(d));
    axis[0] = 1.0;
    face[0] = face[1] = 1.0 / std::sqrt(2.0);
    out.push_back({"axis", axis});
    out.push_back({"face_diagonal", face});
    out.push_back({"diagonal", diag});
    return out;
}

std::vector<double> fpp_times(const RandomField& field, int d, int R, double horizon)
{
    if (field.topology() != Topology::Lattice) throw ConfigError("fpp_times needs a lattice field");
    RandomField pure = field.with_rates(field.lambda(), 0.0);
    ModelParams p = ModelParams::lattice(d, field.lambda(), 0.0);
    EngineOptions opts;
    opts.box_radius = R;
    // Target beyond the box: the run is stopped by the horizon, not by distance.
    LatticeWorld w(p, pure, R + 1, {}, opts);
    while (w.has_pending() && w.peek().time <= horizon) w.step();
    std::vector<double> t(w.node_count());
    for (Node n = 0; n < t.size(); ++n) {
        double tau = w.record(n).tau1;
        t[n] = tau <= horizon ? tau : kInfinity;
    }
    return t;
}

namespace {

struct ShapeRun {
    std::vector<double> h_t, h_2t;
    std::vector<double> radial;
    double drift = 0.0;
    int radius = 0;
};

// Sites of `in` 4-adjacent to the exterior component of the complement.
std::vector<std::pair<double, double>> outer_boundary(const LatticeTopology& topo,
                                                      const std::vector<std::uint8_t>& in,
                                                      double scale)
{
    const int R = topo.box_radius();
    std::vector<std::uint8_t> outside(in.size(), 0);
    std::deque<Node> q;
    for (Node n = 0; n < in.size(); ++n) {
        if (topo.distance(n) == R && !in[n]) {
            outside[n] = 1;
            q.push_back(n);
        }
    }
    while (!q.empty()) {
        Node n = q.front();
        q.pop_front();
        topo.for_each_neighbor(n, [&](Node nb, std::uint64_t, Step) {
            if (!in[nb] && !outside[nb]) {
                outside[nb] = 1;
                q.push_back(nb);
            }
        });
    }
    std::vector<std::pair<double, double>> pts;
    for (Node n = 0; n < in.size(); ++n) {
        if (!in[n]) continue;
        bool edge = false;
        topo.for_each_neighbor(n, [&](Node nb, std::uint64_t, Step) { edge = edge || outside[nb]; });
        if (edge) pts.emplace_back(topo.coord(n, 0) / scale, topo.coord(n, 1) / scale);
    }
    return pts;
}

double hausdorff(const std::vector<std::pair<double, double>>& a,
                 const std::vector<std::pair<double, double>>& b)
{
    auto directed = [](const auto& from, const auto& to) {
        double worst = 0.0;
        for (const auto& [x, y] : from) {
            double best = kInfinity;
            for (const auto& [u, v] : to) best = std::min(best, (x - u) * (x - u) + (y - v) * (y - v));
            worst = std::max(worst, best);
        }
        return std::sqrt(worst);
    };
    if (a.empty() || b.empty()) return kInfinity;
    return std::max(directed(a, b), directed(b, a));
}

double wrap_angle(double a)
{
    while (a > std::numbers::pi) a -= 2.0 * std::numbers::pi;
    while (a <= -std::numbers::pi) a += 2.0 * std::numbers::pi;
    return a;
}

ShapeRun shape_run(const RandomField& field, int d, double t, double rate,
                   const std::vector<Direction>& dirs, int bins)
{
    // Unit clocks reach in time rate*s what rate-`rate` clocks reach in time s.
    const double horizon = 2.0 * t * rate;
    int R = static_cast<int>(std::ceil(3.0 * horizon)) + 2;
    std::vector<double> times;
    for (;;) {
        LatticeTopology probe(d, R);
        times = fpp_times(field, d, R, horizon);
        bool touched = false;
        for (Node n = 0; n < times.size() && !touched; ++n)
            touched = probe.distance(n) == R && times[n] < kInfinity;
        if (!touched) break;
        R = static_cast<int>(std::ceil(R * 1.5));
    }
    LatticeTopology topo(d, R);
    ShapeRun run;
    run.radius = R;
    run.h_t.assign(dirs.size(), 0.0);
    run.h_2t.assign(dirs.size(), 0.0);
    if (d == 2) run.radial.assign(bins, 0.0);
    std::vector<std::uint8_t> in_t, in_2t;
    if (d == 2) {
        in_t.assign(times.size(), 0);
        in_2t.assign(times.size(), 0);
    }
    const double bin = 2.0 * std::numbers::pi / bins;
    std::vector<double> x(d);
    for (Node n = 0; n < times.size(); ++n) {
        double tau = times[n] / rate;
        if (!(tau <= 2.0 * t)) continue;
        for (int a = 0; a < d; ++a) x[a] = topo.coord(n, a);
        bool early = tau <= t;
        for (std::size_t j = 0; j < dirs.size(); ++j) {
            double dot = 0.0;
            for (int a = 0; a < d; ++a) dot += x[a] * dirs[j].u[a];
            run.h_2t[j] = std::max(run.h_2t[j], dot);
            if (early) run.h_t[j] = std::max(run.h_t[j], dot);
        }
        if (d == 2) {
            in_2t[n] = 1;
            if (early) {
                in_t[n] = 1;
                double r = std::hypot(x[0], x[1]);
                if (r > 0) {
                    double ang = std::atan2(x[1], x[0]);
                    int j = static_cast<int>(std::lround(wrap_angle(ang) / bin));
                    j = ((j % bins) + bins) % bins;
                    run.radial[j] = std::max(run.radial[j], r / t);
                }
            }
        }
    }
    if (d == 2) run.drift = hausdorff(outer_boundary(topo, in_t, t), outer_boundary(topo, in_2t, 2 * t));
    return run;
}

}  // namespace

ShapeEstimate shape_estimate(double t, int d, int trials, const TrialPlan& plan, double rate,
                             int angular_bins)
{
    if (!(t > 0.0)) throw ConfigError("shape time must be positive");
    if (!(rate > 0.0)) throw ConfigError("rate must be positive");
    if (trials <= 0) throw ConfigError("trials must be positive");
    if (angular_bins < 8) throw ConfigError("need at least 8 angular bins");
    ShapeEstimate s;
    s.t = t;
    s.d = d;
    s.trials = trials;
    s.rate = rate;
    s.directions = shape_directions(d);
    ModelParams p = ModelParams::lattice(d, 1.0, 0.0);
    auto runs = parallel_map<ShapeRun>(trials, plan.workers, [&](std::size_t i) {
        RandomField f(p, plan.master_seed, plan.trial_index(i));
        return shape_run(f, d, t, rate, s.directions, angular_bins);
    });
    const std::size_t nd = s.directions.size();
    s.directional_times.assign(nd, 0.0);
    s.directional_times_2t.assign(nd, 0.0);
    s.directional_se.assign(nd, 0.0);
    for (std::size_t j = 0; j < nd; ++j) {
        std::vector<double> v, v2;
        for (const auto& r : runs) {
            v.push_back(t / r.h_t[j]);
            v2.push_back(2.0 * t / r.h_2t[j]);
        }
        Summary a = summarize(v);
        s.directional_times[j] = a.mean;
        s.directional_se[j] = a.se();
        s.directional_times_2t[j] = summarize(v2).mean;
    }
    for (const auto& r : runs) s.final_box_radius = std::max(s.final_box_radius, r.radius);
    if (d == 2) {
        const double bin = 2.0 * std::numbers::pi / angular_bins;
        s.radial.assign(angular_bins, 0.0);
        for (int j = 0; j < angular_bins; ++j) {
            s.radial_angles.push_back(wrap_angle(j * bin));
            for (const auto& r : runs) s.radial[j] += r.radial[j] / trials;
        }
        for (const auto& r : runs) s.hausdorff_drift += r.drift / trials;
        // Chord midpoints between bins j and j+2 against the radial function there.
        auto point = [&](int j) {
            return std::pair{s.radial[j] * std::cos(j * bin), s.radial[j] * std::sin(j * bin)};
        };
        auto radial_at = [&](double ang) {
            double pos = wrap_angle(ang) / bin;
            if (pos < 0) pos += angular_bins;
            int lo = static_cast<int>(std::floor(pos)) % angular_bins;
            int hi = (lo + 1) % angular_bins;
            double w = pos - std::floor(pos);
            return (1.0 - w) * s.radial[lo] + w * s.radial[hi];
        };
        s.convexity_excess = -kInfinity;
        for (int j = 0; j < angular_bins; ++j) {
            auto [ax, ay] = point(j);
            auto [bx, by] = point((j + 2) % angular_bins);
            double mx = 0.5 * (ax + bx), my = 0.5 * (ay + by);
            s.convexity_excess =
                std::max(s.convexity_excess, std::hypot(mx, my) - radial_at(std::atan2(my, mx)));
        }
    }
    return s;
}

// ---------------------------------------------------------------------------

TruncatedClockStats truncated_clock_stats(double K, double q, std::uint64_t samples,
                                          std::uint64_t seed, double alpha)
{
    if (!(K > 0.0)) throw ConfigError("cutoff must be positive");
    if (!(q >= 0.0 && q < 1.0)) throw ConfigError("semi-mark probability must lie in [0, 1)");
    if (samples == 0) throw ConfigError("samples must be positive");
    ModelParams p = ModelParams::lattice(2, 1.0, 0.0);
    p.truncation = Truncation{K, q};
    RandomField field(p, seed, 0);
    std::vector<double> f(samples);
    std::uint64_t inf = 0;
    for (std::uint64_t i = 0; i < samples; ++i) {
        f[i] = field.value(ClockKind::T1, lattice_edge_id(i, 0));
        inf += !(f[i] < kInfinity);
    }
    TruncatedClockStats s;
    s.cutoff = K;
    s.semi_mark_prob = q;
    s.samples = samples;
    s.p_infinite = wilson_interval(inf, samples);
    s.expected_p_infinite = q * std::exp(-K);
    std::vector<double> sorted = f;
    std::sort(sorted.begin(), sorted.end());
    const int grid = 400;
    const double top = K + 5.0;
    s.max_cdf_excess = -1.0;
    for (int g = 0; g <= grid; ++g) {
        double x = top * g / grid;
        double fn = static_cast<double>(std::upper_bound(sorted.begin(), sorted.end(), x) -
                                        sorted.begin()) /
                    static_cast<double>(samples);
        s.max_cdf_excess = std::max(s.max_cdf_excess, fn - (1.0 - std::exp(-x)));
    }
    s.dkw_band = std::sqrt(std::log(2.0 / alpha) / (2.0 * static_cast<double>(samples)));
    s.dominated = s.max_cdf_excess <= s.dkw_band;
    s.ks_finite_part =
        ks_statistic(f, [](double x) { return std::isinf(x) ? 1.0 : 1.0 - std::exp(-x); });
    return s;
}

// ---------------------------------------------------------------------------

double ClosedSiteField::density() const
{
    if (closed.empty()) return 0.0;
    return static_cast<double>(std::count(closed.begin(), closed.end(), 1)) /
           static_cast<double>(closed.size());
}

double closed_site_marginal(double rho, int d)
{
    if (!(rho >= 0.0)) throw ConfigError("rho must be nonnegative");
    return rho / (rho + 2.0 * d);
}

ClosedSiteField closed_site_field(const RandomField& field, int d, int R)
{
    if (field.topology() != Topology::Lattice) throw ConfigError("closed sites need a lattice field");
    LatticeTopology topo(d, R);
    ClosedSiteField out;
    out.d = d;
    out.radius = R;
    out.rho = field.rho();
    out.closed.assign(topo.size(), 0);
    std::vector<int> c(d);
    for (Node n = 0; n < topo.size(); ++n) {
        for (int a = 0; a < d; ++a) c[a] = topo.coord(n, a);
        double conv = field.value(ClockKind::Conv, topo.key(n));
        double fastest = kInfinity;
        for (int a = 0; a < d; ++a) {
            fastest = std::min(fastest, field.value(ClockKind::T1, lattice_edge_id(topo.key(n), a)));
            c[a] -= 1;
            fastest = std::min(fastest,
                               field.value(ClockKind::T1, lattice_edge_id(LatticeSite::key_of(c), a)));
            c[a] += 1;
        }
        out.closed[n] = fastest > conv;
    }
    return out;
}

ClosedDensity closed_site_density(double rho, int d, int R, const RandomField& field)
{
    if (!(rho >= 0.0)) throw ConfigError("rho must be nonnegative");
    if (R < 0) throw ConfigError("radius must be nonnegative");
    RandomField f = field.with_rates(field.lambda(), rho);
    ClosedDensity out;
    out.field = closed_site_field(f, d, R);
    out.density = out.field.density();
    out.marginal = closed_site_marginal(rho, d);

    LatticeTopology topo(d, R);
    std::uint64_t sub = 0, sub_closed = 0;
    std::vector<double> a, b;
    for (Node n = 0; n < topo.size(); ++n) {
        bool even = true;
        for (int ax = 0; ax < d; ++ax) even = even && (topo.coord(n, ax) % 2 == 0);
        if (even) {
            ++sub;
            sub_closed += out.field.closed[n];
        }
        if (topo.coord(n, 0) + 2 <= R) {
            a.push_back(out.field.closed[n]);
            b.push_back(out.field.closed[n + 2]);  // +2 along axis 0 (stride 1)
        }
    }
    out.sublattice_sites = sub;
    out.sublattice_density = sub ? static_cast<double>(sub_closed) / sub : 0.0;
    double m = out.marginal;
    out.sublattice_se = sub ? std::sqrt(m * (1.0 - m) / sub) : 0.0;
    out.z_score = out.sublattice_se > 0 ? (out.sublattice_density - m) / out.sublattice_se : 0.0;
    out.lag2_correlation = a.size() >= 2 ? pearson_correlation(a, b) : 0.0;
    return out;
}

Encapsulation origin_encapsulated(const ClosedSiteField& f)
{
    LatticeTopology topo(f.d, f.radius);
    if (f.closed.size() != topo.size()) throw ConfigError("closed field does not match its box");
    Encapsulation e;
    Node o = topo.root();
    if (f.closed[o]) {
        e.encapsulated = true;
        e.origin_closed = true;
        return e;
    }
    // Type 1 can reach the open cluster of the origin and the closed sites
    // bordering it; either touching the boundary breaks encapsulation.
    std::vector<std::uint8_t> seen(topo.size(), 0);
    std::deque<Node> q{o};
    seen[o] = 1;
    bool touched = topo.distance(o) == f.radius;
    while (!q.empty()) {
        Node n = q.front();
        q.pop_front();
        ++e.open_cluster_size;
        topo.for_each_neighbor(n, [&](Node nb, std::uint64_t, Step) {
            if (seen[nb]) return;
            seen[nb] = 1;
            if (topo.distance(nb) == f.radius) touched = true;
            if (!f.closed[nb]) q.push_back(nb);
        });
    }
    e.encapsulated = !touched;
    return e;
}

EncapsulationEstimate estimate_encapsulation(double rho, int d, int R, int trials,
                                             const TrialPlan& plan)
{
    if (trials <= 0) throw ConfigError("trials must be positive");
    ModelParams p = ModelParams::lattice(d, 1.0, rho);
    auto res = parallel_map<Encapsulation>(trials, plan.workers, [&](std::size_t i) {
        RandomField f(p, plan.master_seed, plan.trial_index(i));
        return origin_encapsulated(closed_site_field(f, d, R));
    });
    EncapsulationEstimate e;
    e.rho = rho;
    e.d = d;
    e.radius = R;
    e.trials = trials;
    std::uint64_t yes = 0;
    for (const auto& r : res) {
        yes += r.encapsulated;
        e.origin_closed += r.origin_closed;
    }
    e.p_encapsulated = wilson_interval(yes, trials);
    return e;
}

}  // namespace fppc
