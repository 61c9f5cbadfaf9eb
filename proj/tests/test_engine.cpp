#include <doctest.h>

#include <cmath>
#include <limits>
#include <memory>

#include "fppc/engine/world.hpp"
#include "fppc/harness/stats.hpp"
#include "fppc/lattice_lab/lattice_lab.hpp"
#include "fppc/model/errors.hpp"
#include "support/oracles.hpp"

using namespace fppc;

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

std::shared_ptr<ClockOverrides> quiet_defaults()
{
    auto o = std::make_shared<ClockOverrides>();
    o->set_default(ClockKind::T1, 100.0);
    o->set_default(ClockKind::Tu, 100.0);
    o->set_default(ClockKind::Td, 100.0);
    o->set_default(ClockKind::T2, 100.0);
    o->set_default(ClockKind::T3, 100.0);
    o->set_default(ClockKind::Conv, inf);
    return o;
}

}  // namespace

TEST_CASE("pure FPP on the tree matches the path-sum oracle")
{
    const int d = 3, depth = 7;
    auto p = ModelParams::tree(d, 1.0, 0.0);
    for (std::uint64_t trial = 0; trial < 10; ++trial) {
        RandomField f(p, 21, trial);
        TreeWorld w(p, f, depth);
        TrialOutcome out = w.run();
        REQUIRE(out.verdict == Verdict::SurvivedToTarget);
        for (const auto& [site, t] : oracle::tree_passage_times(f, d, depth)) {
            auto n = w.topology().find(site);
            if (t < out.stop_time) REQUIRE(n.has_value());
            if (!n) continue;
            const SiteRecord& r = w.record(*n);
            if (r.state == Occupant::Type1) CHECK(r.tau1 == t);
            else CHECK(t >= out.stop_time);
        }
    }
}

TEST_CASE("pure FPP on the lattice matches Dijkstra")
{
    const int d = 2, R = 8;
    auto p = ModelParams::lattice(d, 1.0, 0.0);
    for (std::uint64_t trial = 0; trial < 10; ++trial) {
        RandomField f(p, 22, trial);
        LatticeWorld w(p, f, R);
        TrialOutcome out = w.run();
        REQUIRE(out.verdict == Verdict::SurvivedToTarget);
        for (const auto& [site, t] : oracle::lattice_fpp(f, d, R)) {
            const SiteRecord& r = w.record(*w.topology().find(site));
            if (t < out.stop_time) CHECK(r.tau1 == t);
            if (r.state == Occupant::Type1) CHECK(r.tau1 == t);
        }
    }
}

TEST_CASE("replays are bitwise identical")
{
    auto p = ModelParams::lattice(2, 0.7, 0.2);
    RandomField f(p, 5, 77);
    CHECK(run_trial(p, f, 20) == run_trial(p, f, 20));
    auto t = ModelParams::tree(3, 1.5, 0.1);
    RandomField g(t, 5, 77);
    CHECK(run_trial(t, g, 12) == run_trial(t, g, 12));
}

TEST_CASE("topology mismatch and bad caps are rejected")
{
    auto p = ModelParams::tree(3, 1.0, 0.0);
    RandomField lf(ModelParams::lattice(2, 1.0, 0.0), 1, 0);
    CHECK_THROWS_AS(run_trial(p, lf, 3), ConfigError);
    RandomField tf(p, 1, 0);
    CHECK_THROWS_AS(run_trial(p, tf, -1), ConfigError);
    Caps c;
    c.horizon = 0;
    CHECK_THROWS_AS(run_trial(p, tf, 3, c), ConfigError);
}

TEST_CASE("constructed tree scenario: conversion wipes out type 1")
{
    const int d = 3;
    auto p = ModelParams::tree(d, 1.0, 1.0);
    RandomField f(p, 1, 0);
    auto o = quiet_defaults();
    o->set_default(ClockKind::T1, 1.0);
    o->set_default(ClockKind::Td, 0.1);
    o->set(conv_key(TreeSite()), 0.5);
    f.set_overrides(o);

    TreeWorld w(p, f, 5);
    TrialOutcome out = w.run();
    CHECK(out.verdict == Verdict::Extinct);
    CHECK(out.stop_time == doctest::Approx(0.6));
    CHECK(out.conversions == 1);
    const auto& root = w.record(w.topology().root());
    CHECK(root.state == Occupant::Type2);
    CHECK(root.tau1 == 0.0);
    CHECK(root.tau2 == 0.5);
    CHECK(root.parent2 == w.topology().root());
    for (int i = 0; i < d; ++i) {
        const auto& c = w.record(*w.topology().find(TreeSite().child(d, i)));
        CHECK(c.state == Occupant::Type2);
        CHECK_FALSE(c.first_type1().has_value());
        CHECK(*c.first_type2() == doctest::Approx(0.6));
    }
}

TEST_CASE("ties resolve conversion, then type 2, then type 1")
{
    const int d = 3;
    auto p = ModelParams::tree(d, 1.0, 1.0);
    RandomField f(p, 1, 0);
    auto o = quiet_defaults();
    TreeSite a = TreeSite().child(d, 0);
    o->set(edge_key(ClockKind::T1, a), 1.0);
    o->set(conv_key(TreeSite()), 0.5);
    o->set(edge_key(ClockKind::Td, a), 0.5);  // type 2 also arrives at time 1.0
    f.set_overrides(o);

    TreeWorld w(p, f, 5);
    EventEffect e1 = w.step();
    CHECK(e1.event.kind == EventKind::Convert);
    EventEffect e2 = w.step();
    CHECK(e2.event.time == 1.0);
    CHECK(e2.event.kind == EventKind::Arrive2);
    CHECK(e2.effect == Effect::Occupied2);
    EventEffect e3 = w.step();
    CHECK(e3.event.time == 1.0);
    CHECK(e3.event.kind == EventKind::Arrive1);
    CHECK(e3.effect == Effect::Suppressed);
}

TEST_CASE("resampled type-2 attempts restart from the type-1 occupation")
{
    auto p = ModelParams::lattice(1, 1.0, 1.0, ClockMode::Resample);
    LatticeSite o0({0}), o1({1});
    auto build = [&](ClockMode mode) {
        auto q = p;
        q.clock_mode = mode;
        RandomField f(q, 1, 0);
        auto o = quiet_defaults();
        o->set(conv_key(o0), 0.1);
        o->set(edge_key(ClockKind::T1, o0, o1), 0.5);
        o->set(edge_key(ClockKind::T2, o0, o1), 1.0);
        o->set(edge_key(ClockKind::T3, o0, o1), 2.0);
        f.set_overrides(o);
        LatticeWorld w(q, f, 3);
        while (!w.stopping_verdict() && w.has_pending() && w.clock() < 5.0) w.step();
        return w.record(*w.topology().find(o1)).tau2;
    };
    CHECK(build(ClockMode::Static) == doctest::Approx(1.1));
    CHECK(build(ClockMode::Resample) == doctest::Approx(2.5));
}

TEST_CASE("caps and confinement are verdicts of their own")
{
    auto p = ModelParams::lattice(2, 1.0, 0.0);
    RandomField f(p, 3, 0);
    Caps c;
    c.max_events = 10;
    TrialOutcome capped = run_trial(p, f, 50, c);
    CHECK(capped.verdict == Verdict::Capped);
    CHECK(capped.events_processed == 10);

    auto t = p;
    t.truncation = Truncation{1e-9, 1.0};
    RandomField g(t, 3, 0);
    CHECK(run_trial(t, g, 5).verdict == Verdict::Confined);
}

TEST_CASE("progenitors are self-converted type-2 sites")
{
    auto p = ModelParams::lattice(2, 2.0, 0.3);
    RandomField f(p, 8, 2);
    LatticeWorld w(p, f, 15);
    w.run();
    int type2 = 0;
    for (Node n = 0; n < w.node_count(); ++n) {
        if (w.record(n).state != Occupant::Type2) {
            CHECK_THROWS_AS(w.progenitor(n), DomainError);
            continue;
        }
        ++type2;
        int steps = -1;
        Node g = w.progenitor(n, &steps);
        CHECK(w.record(g).parent2 == g);
        CHECK(w.record(g).tau1 < w.record(g).tau2);
        CHECK(steps >= 0);
        CHECK(w.record(g).tau2 <= w.record(n).tau2);
    }
    CHECK(type2 > 0);
}

TEST_CASE("dead-subtree skipping leaves type-1 dynamics unchanged")
{
    auto p = ModelParams::tree(3, 1.5, 0.2);
    for (std::uint64_t trial = 0; trial < 20; ++trial) {
        RandomField f(p, 4, trial);
        EngineOptions on, off;
        off.skip_dead_subtrees = false;
        TreeWorld a(p, f, 10, {}, on), b(p, f, 10, {}, off);
        TrialOutcome oa = a.run(), ob = b.run();
        CHECK(oa.verdict == ob.verdict);
        CHECK(oa.stop_time == ob.stop_time);
        CHECK(oa.max_distance == ob.max_distance);
        CHECK(oa.conversions == ob.conversions);
        for (Node n = 0; n < a.node_count(); ++n) {
            if (a.record(n).state != Occupant::Type1) continue;
            auto m = b.topology().find(a.topology().site(n));
            REQUIRE(m.has_value());
            CHECK(b.record(*m).tau1 == a.record(n).tau1);
        }
    }
}

TEST_CASE("frontier tube marks results approximate")
{
    auto p = ModelParams::tree(3, 1.0, 0.1);
    RandomField f(p, 4, 0);
    EngineOptions o;
    o.tube_generations = 3;
    CHECK(run_trial(p, f, 10, {}, o).approximate);
    CHECK_FALSE(run_trial(p, f, 10).approximate);
}

TEST_CASE("static and resample modes agree in law on the reach indicator")
{
    const int R = 15, trials = 2000;
    auto stat = ModelParams::lattice(2, 1.0, 1.0, ClockMode::Static);
    auto res = ModelParams::lattice(2, 1.0, 1.0, ClockMode::Resample);
    SurvivalEstimate a = estimate_extinction(stat, R, trials, TrialPlan{21, 0, 1});
    SurvivalEstimate b = estimate_extinction(res, R, trials, TrialPlan{21, 1, 1});
    CHECK(a.capped == 0);
    CHECK(b.capped == 0);
    double p = two_proportion_pvalue(a.survived, trials, b.survived, trials);
    INFO("static " << a.survived << ", resample " << b.survived << ", p = " << p);
    CHECK(p > 0.01);
}

TEST_CASE("type-2 sites never change state")
{
    for (std::uint64_t t = 0; t < 10; ++t) {
        auto p = ModelParams::lattice(2, 0.8, 0.5, t % 2 ? ClockMode::Resample : ClockMode::Static);
        RandomField f(p, 13, t);
        LatticeWorld w(p, f, 8);
        std::vector<double> seen(w.node_count(), kInf);
        while (!w.stopping_verdict()) {
            w.step();
            for (Node n = 0; n < w.node_count(); ++n) {
                const SiteRecord& r = w.record(n);
                if (seen[n] < kInf) {
                    CHECK(r.state == Occupant::Type2);
                    CHECK(r.tau2 == seen[n]);
                } else if (r.state == Occupant::Type2) {
                    seen[n] = r.tau2;
                }
            }
        }
    }
}
