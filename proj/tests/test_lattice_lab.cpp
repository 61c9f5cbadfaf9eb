#include <doctest.h>

#include <cmath>

#include "fppc/engine/topology.hpp"
#include "fppc/lattice_lab/lattice_lab.hpp"
#include "fppc/model/errors.hpp"
#include "support/oracles.hpp"

using namespace fppc;

TEST_CASE("shape directions")
{
    auto dirs = shape_directions(2);
    CHECK(dirs.size() == 18);
    CHECK(dirs.front().u[0] == doctest::Approx(1.0));
    CHECK(dirs.back().u[0] == doctest::Approx(std::sqrt(0.5)));
    CHECK(dirs.back().u[1] == doctest::Approx(std::sqrt(0.5)));
    for (const auto& d : dirs) CHECK(std::hypot(d.u[0], d.u[1]) == doctest::Approx(1.0));
    CHECK(shape_directions(3).size() == 3);
    CHECK_THROWS_AS(shape_directions(1), ConfigError);
}

TEST_CASE("FPP times match Dijkstra inside the horizon")
{
    const int d = 2, R = 10;
    RandomField f(ModelParams::lattice(d, 1.0, 0.0), 6, 1);
    auto times = fpp_times(f, d, R, 6.0);
    LatticeTopology topo(d, R);
    for (const auto& [site, t] : oracle::lattice_fpp(f, d, R)) {
        double got = times[*topo.find(site)];
        if (t <= 6.0) CHECK(got == t);
        else CHECK(std::isinf(got));
    }
}

TEST_CASE("limit shape estimate is sane at small t")
{
    ShapeEstimate s = shape_estimate(8.0, 2, 4, TrialPlan{1, 0, 1});
    REQUIRE(s.directional_times.size() == 18);
    for (double v : s.directional_times) {
        CHECK(v > 0.2);
        CHECK(v < 0.8);
    }
    CHECK(s.final_box_radius >= static_cast<int>(std::ceil(3 * 16.0)));
    // Rate-2 clocks halve every passage time.
    ShapeEstimate fast = shape_estimate(8.0, 2, 4, TrialPlan{1, 0, 1}, 2.0);
    CHECK(fast.directional_times[0] == doctest::Approx(s.directional_times[0] / 2).epsilon(0.02));
}

TEST_CASE("closed sites follow the clock rule")
{
    const int d = 2, R = 6;
    const double rho = 2.0;
    RandomField f(ModelParams::lattice(d, 1.0, rho), 3, 0);
    ClosedSiteField c = closed_site_field(f, d, R);
    LatticeTopology topo(d, R);
    int closed = 0;
    for (Node n = 0; n < topo.size(); ++n) {
        LatticeSite s = topo.site(n);
        double fastest = INFINITY;
        for (const auto& nb : neighbors(s))
            fastest = std::min(fastest, f.sample(edge_key(ClockKind::T1, s, nb)));
        bool expect = f.sample(conv_key(s)) < fastest;
        CHECK(static_cast<bool>(c.closed[n]) == expect);
        closed += expect;
    }
    CHECK(c.density() == doctest::Approx(closed / double(topo.size())));
    CHECK(closed_site_marginal(rho, d) == doctest::Approx(rho / (rho + 4)));
}

TEST_CASE("encapsulation on constructed fields")
{
    const int d = 2, R = 4;
    LatticeTopology topo(d, R);
    ClosedSiteField f;
    f.d = d;
    f.radius = R;
    f.closed.assign(topo.size(), 0);
    Encapsulation open = origin_encapsulated(f);
    CHECK_FALSE(open.encapsulated);
    CHECK(open.open_cluster_size == topo.size());

    for (Node n = 0; n < topo.size(); ++n) f.closed[n] = topo.distance(n) == 2;
    Encapsulation ring = origin_encapsulated(f);
    CHECK(ring.encapsulated);
    CHECK(ring.open_cluster_size == 9);

    for (Node n = 0; n < topo.size(); ++n) f.closed[n] = topo.distance(n) == R - 1;
    CHECK(origin_encapsulated(f).encapsulated);
    // Type 1 can still occupy a closed site on the boundary itself.
    for (Node n = 0; n < topo.size(); ++n) f.closed[n] = topo.distance(n) == R;
    CHECK_FALSE(origin_encapsulated(f).encapsulated);

    f.closed.assign(topo.size(), 0);
    f.closed[topo.root()] = 1;
    Encapsulation self = origin_encapsulated(f);
    CHECK(self.encapsulated);
    CHECK(self.origin_closed);
}

TEST_CASE("truncated clock statistics")
{
    auto none = truncated_clock_stats(1.0, 0.0, 20000, 4);
    CHECK(none.p_infinite.successes == 0);
    CHECK(none.dominated);
    CHECK(none.ks_finite_part < 0.02);

    auto s = truncated_clock_stats(1.0, 0.3, 50000, 4);
    CHECK(s.expected_p_infinite == doctest::Approx(0.3 * std::exp(-1.0)));
    CHECK(s.p_infinite.lower <= s.expected_p_infinite);
    CHECK(s.expected_p_infinite <= s.p_infinite.upper);
    CHECK(s.dominated);
    CHECK_THROWS_AS(truncated_clock_stats(1.0, 1.0, 10, 1), ConfigError);
}

TEST_CASE("extinction tallies")
{
    auto p = ModelParams::lattice(2, 1.0, 0.5);
    SurvivalEstimate e = estimate_extinction(p, 8, 30, TrialPlan{2, 0, 1});
    CHECK(e.survived + e.extinct + e.capped + e.confined == 30);
    CHECK(e.p_survived.point == doctest::Approx(e.survived / 30.0));

    Caps tiny;
    tiny.max_events = 3;
    SurvivalEstimate c = estimate_extinction(p, 8, 10, TrialPlan{2, 0, 1}, tiny);
    CHECK(c.capped == 10);
    CHECK(c.p_capped.point == 1.0);

    auto t = ModelParams::tree(3, 1.0, 0.1);
    SurvivalEstimate tr = estimate_extinction(t, 6, 10, TrialPlan{2, 0, 1});
    CHECK(tr.survived + tr.extinct + tr.capped + tr.confined == 10);
}
