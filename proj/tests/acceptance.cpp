// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
// Thresholds, trial counts and runtime budgets are fixed below.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "fppc/engine/world.hpp"
#include "fppc/harness/chernoff.hpp"
#include "fppc/harness/parallel.hpp"
#include "fppc/harness/stats.hpp"
#include "fppc/lattice_lab/lattice_lab.hpp"
#include "fppc/ssp_lab/ssp_lab.hpp"
#include "fppc/tree_lab/tree_lab.hpp"
#include "support/oracles.hpp"

using namespace fppc;

namespace {

struct Result {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    std::string name;
    double budget_s;
    std::function<Result(int workers)> run;
};

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

std::string interval(const WilsonInterval& w)
{
    return fmt("%.4f [%.4f, %.4f]", w.point, w.lower, w.upper);
}

// ---------------------------------------------------------------------------

Result determinism(int workers)
{
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> lam(0.05, 3.0), rho(0.0, 1.5);
    int mismatches = 0;
    for (int i = 0; i < 100; ++i) {
        bool tree = i % 2 == 0;
        ModelParams p = tree ? ModelParams::tree(3 + i % 3, lam(rng), rho(rng))
                             : ModelParams::lattice(2 + i % 2, lam(rng), rho(rng),
                                                    i % 4 == 1 ? ClockMode::Resample
                                                               : ClockMode::Static);
        std::uint64_t seed = rng(), trial = rng();
        Caps caps;
        caps.max_sites = 20000 + rng() % 20000;
        caps.max_events = 200000;
        int target = tree ? 6 + static_cast<int>(rng() % 10) : 5 + static_cast<int>(rng() % 15);
        TrialOutcome a = run_trial(p, RandomField(p, seed, trial), target, caps);
        TrialOutcome b = run_trial(p, RandomField(p, seed, trial), target, caps);
        mismatches += !(a == b);
    }
    // The same plan must give the same tallies for any worker count.
    auto p = ModelParams::lattice(2, 0.7, 0.3);
    auto one = estimate_extinction(p, 12, 60, TrialPlan{3, 0, 1});
    auto many = estimate_extinction(p, 12, 60, TrialPlan{3, 0, std::max(2, workers)});
    bool workers_agree = one.survived == many.survived && one.extinct == many.extinct &&
                         one.mean_stop_time == many.mean_stop_time;
    return {mismatches == 0 && workers_agree,
            fmt("100 replays, %d mismatches; worker counts agree: %s", mismatches,
                workers_agree ? "yes" : "no")};
}

Result clock_laws(int)
{
    const std::size_t n = 100000;
    const double alpha = 0.01, max_r = 0.01;
    const double lambda = 2.0, rho = 0.5;
    RandomField tree(ModelParams::tree(3, lambda, rho), 7, 0);
    RandomField lat(ModelParams::lattice(2, lambda, rho), 7, 0);

    struct Law {
        const char* name;
        const RandomField* field;
        ClockKind kind;
        double rate;  // 0 marks a uniform draw
    };
    const std::vector<Law> laws{
        {"T1", &tree, ClockKind::T1, 1.0},        {"Tu", &tree, ClockKind::Tu, lambda},
        {"Td", &tree, ClockKind::Td, lambda},     {"T2", &lat, ClockKind::T2, lambda},
        {"T3", &lat, ClockKind::T3, lambda},      {"Conv", &lat, ClockKind::Conv, rho},
        {"SemiMark", &lat, ClockKind::SemiMark, 0}, {"SeedMark", &lat, ClockKind::SeedMark, 0},
    };
    const double crit = ks_critical_value(n, alpha);
    bool ok = true;
    double worst_ks = 0.0, worst_r = 0.0;
    std::string failed;
    for (const Law& law : laws) {
        std::vector<double> xs(n), next(n), other_trial(n);
        RandomField shifted(ModelParams::lattice(2, lambda, rho), 7, 1);
        if (law.field == &tree) shifted = RandomField(ModelParams::tree(3, lambda, rho), 7, 1);
        for (std::size_t i = 0; i < n; ++i) {
            auto draw = [&](const RandomField& f, std::uint64_t id) {
                return law.rate > 0 ? f.value(law.kind, id) : f.uniform(law.kind, id);
            };
            xs[i] = draw(*law.field, i);
            next[i] = draw(*law.field, i + 1);
            other_trial[i] = draw(shifted, i);
        }
        double rate = law.rate;
        double ks = ks_statistic(xs, [rate](double x) {
            if (rate > 0) return x <= 0 ? 0.0 : 1.0 - std::exp(-rate * x);
            return std::clamp(x, 0.0, 1.0);
        });
        double r = std::max(std::abs(pearson_correlation(xs, next)),
                            std::abs(pearson_correlation(xs, other_trial)));
        worst_ks = std::max(worst_ks, ks / crit);
        worst_r = std::max(worst_r, r);
        if (ks >= crit || r >= max_r) {
            ok = false;
            failed += std::string(" ") + law.name;
        }
    }
    // Edges sharing an endpoint on the lattice.
    {
        std::vector<double> a, b;
        for (int x = -50000; x < 50000; ++x) {
            LatticeSite s({x, 0}), t({x + 1, 0}), u({x + 2, 0});
            a.push_back(lat.sample(edge_key(ClockKind::T1, s, t)));
            b.push_back(lat.sample(edge_key(ClockKind::T1, t, u)));
        }
        double r = std::abs(pearson_correlation(a, b));
        worst_r = std::max(worst_r, r);
        if (r >= max_r) {
            ok = false;
            failed += " adjacent-edges";
        }
    }
    return {ok, fmt("8 kinds at n=%zu: max KS/critical %.3f (alpha %.2f), max |r| %.4f (< %.2f)%s",
                    n, worst_ks, alpha, worst_r, max_r,
                    failed.empty() ? "" : (";" + failed).c_str())};
}

Result fpp_oracle(int)
{
    int bad = 0, tree_sites = 0, lattice_sites = 0, ssp_sites = 0;
    // Tree, depth 8.
    for (std::uint64_t t = 0; t < 50; ++t) {
        const int d = 3 + static_cast<int>(t % 2), depth = 8;
        auto p = ModelParams::tree(d, 0.5 + 0.05 * t, 0.0);
        RandomField f(p, 31, t);
        TreeWorld w(p, f, depth);
        TrialOutcome out = w.run();
        bad += out.verdict != Verdict::SurvivedToTarget;
        for (const auto& [site, time] : oracle::tree_passage_times(f, d, depth)) {
            auto n = w.topology().find(site);
            if (time < out.stop_time && !n) ++bad;
            if (!n) continue;
            const SiteRecord& r = w.record(*n);
            if (r.state == Occupant::Type1) {
                ++tree_sites;
                bad += r.tau1 != time;
            } else if (r.state != Occupant::Vacant || time < out.stop_time) {
                ++bad;
            }
        }
    }
    // Lattice, radius 12.
    for (std::uint64_t t = 0; t < 50; ++t) {
        const int d = 2 + static_cast<int>(t % 2 && t < 10), R = d == 2 ? 12 : 6;
        auto p = ModelParams::lattice(d, 0.5 + 0.05 * t, 0.0,
                                      t % 3 == 0 ? ClockMode::Resample : ClockMode::Static);
        RandomField f(p, 32, t);
        LatticeWorld w(p, f, R);
        TrialOutcome out = w.run();
        bad += out.verdict != Verdict::SurvivedToTarget;
        for (const auto& [site, time] : oracle::lattice_fpp(f, d, R)) {
            const SiteRecord& r = w.record(*w.topology().find(site));
            if (r.state == Occupant::Type1) {
                ++lattice_sites;
                bad += r.tau1 != time;
            } else if (r.state != Occupant::Vacant || time < out.stop_time) {
                ++bad;
            }
        }
    }
    // SSP without seeds: red is FPP with capped clocks.
    for (std::uint64_t t = 0; t < 50; ++t) {
        const int d = 2, R = 12;
        const double cap = 0.5 + 0.01 * t;
        SspParams sp;
        sp.d = d;
        sp.seeds = BernoulliSeeds{0.0};
        sp.red = ExpCappedRed{cap};
        RandomField f(ModelParams::lattice(d, 1.0, 0.0), 33, t);
        SspState s = run_ssp(sp, R, f);
        bad += s.verdict != SspVerdict::RedReachedBoundary;
        auto dist = oracle::lattice_dijkstra(d, R, [&](const LatticeSite& a, const LatticeSite& b) {
            return std::min(f.sample(edge_key(ClockKind::T1, a, b)), cap);
        });
        LatticeTopology topo(d, R);
        for (const auto& [site, time] : dist) {
            Node n = *topo.find(site);
            if (s.color[n] == Color::Red) {
                ++ssp_sites;
                bad += s.T[n] != time;
            } else if (time < s.stop_time) {
                ++bad;
            }
        }
    }
    return {bad == 0, fmt("50 fields each; exact matches on %d tree, %d lattice, %d SSP sites; "
                          "%d mismatches",
                          tree_sites, lattice_sites, ssp_sites, bad)};
}

Result brw_minima(int workers)
{
    const double se_factor = 2.0, lo = 0.24, hi = 0.31, linear_cap = 0.5;
    const std::size_t width = 100000;
    TrialPlan paired{41, 0, workers};
    BrwStats exact = estimate_brw(3, 20, 200, BrwMethod::ExactPrunedDFS, 0, paired);
    BrwStats cloud = estimate_brw(3, 20, 200, BrwMethod::TruncatedCloud, width, paired);
    std::vector<double> diff(exact.samples.size());
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = cloud.samples[i] - exact.samples[i];
    double se = std::hypot(exact.se(), cloud.se());
    double gap = std::abs(cloud.mean_Mn - exact.mean_Mn);
    bool agree = gap <= se_factor * se;

    BrwStats deep = estimate_brw(3, 40, 100, BrwMethod::TruncatedCloud, width, TrialPlan{41, 1, workers});
    double gamma = brw_speed(3);
    bool in_band = deep.ratio >= lo && deep.ratio <= hi;
    bool sublinear = deep.ratio < linear_cap;
    return {agree && in_band && sublinear,
            fmt("n=20 exact %.4f vs cloud %.4f, gap %.2e <= %.1f*SE %.2e (max paired diff %.2e); "
                "cloud M40/40 = %.4f in [%.2f, %.2f], < %.1f; speed %.6f",
                exact.mean_Mn, cloud.mean_Mn, gap, se_factor, se,
                *std::max_element(diff.begin(), diff.end()), deep.ratio, lo, hi, linear_cap,
                gamma)};
}

Result subbox_scaling(int workers)
{
    const std::vector<int> ks{8, 12, 16, 20};
    const int trials = 2000;
    std::vector<WilsonInterval> p;
    std::vector<double> x, y;
    std::string detail;
    for (std::size_t i = 0; i < ks.size(); ++i) {
        SubBoxResult r = estimate_subbox_good_prob(ks[i], 0.1, 1.05, 3, trials,
                                                   TrialPlan{51, i, workers});
        p.push_back(r.p_good);
        double failures = static_cast<double>(trials - r.p_good.successes);
        x.push_back(ks[i]);
        // Continuity-corrected failure rate keeps the log finite at p_good = 1.
        y.push_back(std::log((failures + 0.5) / (trials + 1.0)));
        detail += fmt("k=%d %s; ", ks[i], interval(r.p_good).c_str());
    }
    bool monotone = true;
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = i + 1; j < p.size(); ++j)
            if (p[j].upper < p[i].lower) monotone = false;
    LinearFit fit = linear_fit(x, y);
    return {monotone && fit.slope < 0.0,
            detail + fmt("nondecreasing: %s; slope of log(1-p_good) vs k = %.4f (se %.4f)",
                         monotone ? "yes" : "no", fit.slope, fit.slope_se)};
}

Result dstar_oracle(int workers)
{
    const int trials = 2000, k = 2, d = 3;
    bool ok = true;
    std::string detail;
    std::uint64_t cell = 0;
    for (double lambda : {0.1, 1.0}) {
        TrialPlan plan{61, cell++, workers};
        DStarEstimate e = dstar_probability(k, lambda, d, trials, plan);
        TreeSite x = TreeSite().child(d, 0);
        std::uint64_t hits = 0, disagree = 0;
        for (int i = 0; i < trials; ++i) {
            RandomField f(ModelParams::tree(d, lambda, 0.0), plan.master_seed, plan.trial_index(i));
            bool slow = oracle::dstar_enumerated(f, x, d, k * k, 0) >= 10.0 * k;
            hits += slow;
            disagree += slow != static_cast<bool>(e.outcomes[i]);
        }
        double q = static_cast<double>(hits) / trials;
        double se = std::sqrt(std::max(q * (1 - q), 0.25 / trials) / trials);
        bool match = std::abs(e.p.point - q) <= 2.0 * se;
        ok = ok && match;
        detail += fmt("lambda=%.1f: estimate %.4f, oracle %.4f, 2SE %.4f, %llu paired "
                      "disagreements; ",
                      lambda, e.p.point, q, 2 * se, static_cast<unsigned long long>(disagree));
    }
    return {ok, detail};
}

Result closed_forms(int)
{
    const double z_max = 3.0;
    const int d = 2, R = 316;  // 317^2 > 10^5 even-sublattice sites
    bool ok = true;
    std::string detail;
    std::uint64_t trial = 0;
    for (double rho : {0.5, 4.0, 20.0}) {
        RandomField f(ModelParams::lattice(d, 1.0, rho), 71, trial++);
        ClosedDensity c = closed_site_density(rho, d, R, f);
        ok = ok && std::abs(c.z_score) < z_max && c.sublattice_sites >= 100000;
        detail += fmt("closed rho=%g: %.5f vs %.5f (z %.2f); ", rho, c.sublattice_density,
                      c.marginal, c.z_score);
    }
    struct Point {
        double C, lambda, rho;
    };
    for (Point q : {Point{3.0, 1e-4, 1e-4}, Point{2.0, 1e-3, 1e-2}, Point{5.0, 1e-3, 1e-3}}) {
        RandomField f(ModelParams::lattice(d, 1.0, 0.0), 72, trial++);
        SeedField s = label_type2_seeds(q.C, q.lambda, q.rho, d, R, f);
        SublatticeCount n = even_sublattice_count(d, R, s.seed);
        double m = type2_seed_marginal(q.C, q.lambda, q.rho, d);
        double z = (n.fraction() - m) / std::sqrt(m * (1 - m) / n.sites);
        ok = ok && std::abs(z) < z_max && n.sites >= 100000;
        detail += fmt("seeds C=%g: %.5f vs %.5f (z %.2f); ", q.C, n.fraction(), m, z);
    }
    return {ok, detail + fmt("|z| < %.0f on 100489 sites each", z_max)};
}

const ModelParams kExtinctionPoint = ModelParams::lattice(2, 1.5, 1.0);

Result lattice_extinction(int workers)
{
    SurvivalEstimate e = estimate_extinction(kExtinctionPoint, 50, 200, TrialPlan{81, 0, workers});
    bool ok = e.p_extinct.point >= 0.95 && e.p_capped.point <= 0.01;
    return {ok, fmt("extinct %s (>= 0.95), capped %.3f (<= 0.01), survived %llu",
                    interval(e.p_extinct).c_str(), e.p_capped.point,
                    static_cast<unsigned long long>(e.survived))};
}

Result lattice_survival(int workers)
{
    SurvivalEstimate s = estimate_extinction(ModelParams::lattice(2, 0.05, 0.01), 50, 200,
                                             TrialPlan{81, 1, workers});
    SurvivalEstimate e = estimate_extinction(kExtinctionPoint, 50, 200, TrialPlan{81, 0, workers});
    bool ok = s.p_survived.point >= 0.5 && s.p_survived.separated_from(e.p_survived) &&
              s.p_survived.lower > e.p_survived.upper;
    return {ok, fmt("survived %s (>= 0.5) vs extinction point %s", interval(s.p_survived).c_str(),
                    interval(e.p_survived).c_str())};
}

Result tree_witness(int workers)
{
    Caps caps;
    caps.max_sites = 20'000'000;
    SurvivalEstimate low = estimate_extinction(ModelParams::tree(3, 1.5, 0.1), 30, 100,
                                               TrialPlan{91, 0, workers}, caps);
    SurvivalEstimate high = estimate_extinction(ModelParams::tree(3, 6.0, 0.1), 30, 100,
                                                TrialPlan{91, 1, workers}, caps);
    bool ok = low.survived > 0 && low.p_survived.lower > 0.02 &&
              high.p_survived.upper < low.p_survived.lower;
    return {ok, fmt("lambda=1.5 survived %s (capped %llu); lambda=6 survived %s (capped %llu)",
                    interval(low.p_survived).c_str(), static_cast<unsigned long long>(low.capped),
                    interval(high.p_survived).c_str(),
                    static_cast<unsigned long long>(high.capped))};
}

Result encapsulation(int workers)
{
    EncapsulationEstimate e = estimate_encapsulation(60.0, 2, 40, 200, TrialPlan{101, 0, workers});
    SspParams sp;
    sp.kappa = 4001.0;
    RedSurvivalCurve c = estimate_red_survival(sp, 100, 200, {1e-4, 1e-3, 1e-2},
                                               TrialPlan{101, 1, workers});
    bool ok = e.p_encapsulated.point >= 0.99;
    std::string detail = fmt("encapsulated %s (>= 0.99); red survival", interval(e.p_encapsulated).c_str());
    double at_1e3 = 0.0;
    for (std::size_t i = 0; i < c.points.size(); ++i) {
        detail += fmt(" p=%g %s;", c.points[i].p, interval(c.points[i].p_red).c_str());
        if (c.points[i].p == 1e-3) at_1e3 = c.points[i].p_red.point;
        for (std::size_t j = i + 1; j < c.points.size(); ++j)
            if (c.points[j].p_red.lower > c.points[i].p_red.upper) ok = false;
    }
    ok = ok && at_1e3 >= 0.9;
    return {ok, detail + fmt(" fitted c = %.2f", c.c_hat)};
}

Result coupling(int workers)
{
    CouplingReport r = coupling_consistency(12.0, 1e-8, 1e-8, 2, 10, 50,
                                            TrialPlan{111, 0, workers}, 10000);
    bool ok = r.sites_checked >= 10000 && r.inequality_violations == 0 &&
              r.interference_violations == 0 && r.zero_seed_reached == r.zero_seed_trials;
    return {ok, fmt("%llu/%llu sampled non-seed sites satisfy the inequality; %llu/%llu run-level "
                    "checks clean; %d/%d zero-seed trials reached the boundary",
                    static_cast<unsigned long long>(r.sites_checked - r.inequality_violations),
                    static_cast<unsigned long long>(r.sites_checked),
                    static_cast<unsigned long long>(r.type1_sites_checked -
                                                    r.interference_violations),
                    static_cast<unsigned long long>(r.type1_sites_checked), r.zero_seed_reached,
                    r.zero_seed_trials)};
}

Result chernoff(int)
{
    struct Point {
        double mu, eps, C;
    };
    bool ok = true;
    std::string detail;
    std::uint64_t seed = 121;
    for (Point q : {Point{100, 0.1, 1.5}, Point{50, 0.2, 2.0}, Point{400, 0.05, 1.2}}) {
        ChernoffBounds b = poisson_chernoff_bounds(q.mu, q.eps, q.C);
        PoissonTails t = empirical_poisson_tails(q.mu, q.eps, q.C, 1'000'000, seed++);
        bool held = t.lower_tail <= b.lower_tail && t.upper_tail <= b.upper_tail &&
                    t.above_C <= b.above_C;
        ok = ok && held;
        detail += fmt("mu=%g eps=%g: lower %.4f<=%.4f upper %.4f<=%.4f above %gmu %.2e<=%.2e; ",
                      q.mu, q.eps, t.lower_tail, b.lower_tail, t.upper_tail, b.upper_tail, q.C,
                      t.above_C, b.above_C);
    }
    return {ok, detail};
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Acceptance checks"};
    int workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    std::vector<std::string> only;
    app.add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
    app.add_option("--only", only, "run criteria whose name contains one of these");
    CLI11_PARSE(app, argc, argv);

    const std::vector<Criterion> criteria{
        {"determinism", 60, determinism},
        {"clock-laws", 60, clock_laws},
        {"fpp-oracle", 300, fpp_oracle},
        {"brw-minima", 1200, brw_minima},
        {"subbox-scaling", 1800, subbox_scaling},
        {"dstar-oracle", 300, dstar_oracle},
        {"closed-forms", 300, closed_forms},
        {"lattice-extinction", 900, lattice_extinction},
        {"lattice-survival", 900, lattice_survival},
        {"tree-survival-witness", 1800, tree_witness},
        {"encapsulation", 1800, encapsulation},
        {"coupling", 600, coupling},
        {"chernoff", 120, chernoff},
    };

    int failures = 0, ran = 0;
    for (const Criterion& c : criteria) {
        if (!only.empty() && std::none_of(only.begin(), only.end(), [&](const std::string& s) {
                return c.name.find(s) != std::string::npos;
            }))
            continue;
        ++ran;
        auto start = std::chrono::steady_clock::now();
        Result v;
        try {
            v = c.run(workers);
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        bool in_budget = secs < c.budget_s;
        bool pass = v.pass && in_budget;
        failures += !pass;
        std::printf("%s %s (%.1fs, budget %.0fs%s): %s\n", pass ? "PASS" : "FAIL", c.name.c_str(),
                    secs, c.budget_s, in_budget ? "" : ", exceeded", v.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%d criteria passed\n", ran - failures, ran);
    return failures ? 1 : 0;
}
