#include <doctest.h>

#include <cmath>
#include <limits>
#include <memory>
#include <set>
#include <vector>

#include "fppc/harness/stats.hpp"
#include "fppc/model/clock.hpp"
#include "fppc/model/errors.hpp"
#include "fppc/model/params.hpp"
#include "fppc/model/site.hpp"

using namespace fppc;

TEST_CASE("params validation")
{
    CHECK_NOTHROW(ModelParams::tree(3, 1.0, 0.0).validate());
    CHECK_THROWS_AS(ModelParams::tree(2, 1.0, 0.0).validate(), ConfigError);
    CHECK_THROWS_AS(ModelParams::tree(3, 0.0, 0.0).validate(), ConfigError);
    CHECK_THROWS_AS(ModelParams::tree(3, 1.0, -1.0).validate(), ConfigError);
    CHECK_THROWS_AS(ModelParams::lattice(9, 1.0, 0.0).validate(), ConfigError);
    CHECK_NOTHROW(ModelParams::lattice(1, 1.0, 0.0).validate());

    auto t = ModelParams::tree(3, 1.0, 0.0);
    t.clock_mode = ClockMode::Resample;
    CHECK_THROWS_AS(t.validate(), ConfigError);

    auto l = ModelParams::lattice(2, 1.0, 0.0);
    l.truncation = Truncation{0.0, 0.5};
    CHECK_THROWS_AS(l.validate(), ConfigError);
    l.truncation = Truncation{1.0, 1.5};
    CHECK_THROWS_AS(l.validate(), ConfigError);
}

TEST_CASE("tree site algebra")
{
    const int d = 3;
    TreeSite root;
    CHECK(root.is_root());
    CHECK_THROWS_AS(root.parent(), DomainError);
    CHECK(children(root, d).size() == 3);

    TreeSite s = root.child(d, 2).child(d, 1).child(d, 0);
    CHECK(s.depth() == 3);
    CHECK(s.labels() == std::vector<int>{2, 1, 0});
    CHECK(children(s, d).size() == 2);
    CHECK(neighbors(s, d).size() == 3);
    CHECK(s.parent().parent().parent() == root);
    CHECK(root.child(d, 2).is_parent_of(root.child(d, 2).child(d, 1)));
    CHECK(adjacent(s, s.parent()));
    CHECK_FALSE(adjacent(s, root));

    SUBCASE("non-root vertices have d - 1 children")
    {
        CHECK_THROWS(s.child(d, 2));
    }

    SUBCASE("keys chain from the root key")
    {
        std::uint64_t k = TreeSite::kRootKey;
        for (int l : s.labels()) k = TreeSite::child_key(k, l);
        CHECK(k == s.key());
    }

    SUBCASE("depth beyond one packed word")
    {
        std::vector<int> labels;
        for (int i = 0; i < 40; ++i) labels.push_back(i % 2);
        TreeSite deep = TreeSite::from_labels(d, labels);
        CHECK(deep.depth() == 40);
        CHECK(deep.labels() == labels);
        CHECK(TreeSite::from_labels(d, deep.labels()) == deep);
    }
}

TEST_CASE("lattice site algebra")
{
    LatticeSite o = LatticeSite::origin(3);
    CHECK(neighbors(o).size() == 6);
    for (const auto& nb : neighbors(o)) {
        CHECK(adjacent(o, nb));
        CHECK(nb.radius() == 1);
    }
    LatticeSite a({2, -3, 1});
    CHECK(a.radius() == 3);
    CHECK_FALSE(adjacent(a, o));

    std::set<std::uint64_t> keys;
    for (int x = -5; x <= 5; ++x)
        for (int y = -5; y <= 5; ++y) keys.insert(LatticeSite({x, y}).key());
    CHECK(keys.size() == 121);
}

TEST_CASE("random field is a pure function of its key")
{
    auto p = ModelParams::tree(3, 2.0, 0.5);
    RandomField f(p, 11, 4), g(p, 11, 4), h(p, 11, 5);
    TreeSite c = TreeSite().child(3, 1);
    for (auto kind : {ClockKind::T1, ClockKind::Tu, ClockKind::Td}) {
        CHECK(f.sample(edge_key(kind, c)) == g.sample(edge_key(kind, c)));
        CHECK(f.sample(edge_key(kind, c)) != h.sample(edge_key(kind, c)));
    }
    CHECK(f.sample(conv_key(c)) == g.sample(conv_key(c)));

    SUBCASE("kind and topology are validated")
    {
        LatticeSite o = LatticeSite::origin(2), e = neighbors(o)[0];
        CHECK_THROWS_AS(f.sample(edge_key(ClockKind::T1, o, e)), ConfigError);
        CHECK_THROWS_AS(edge_key(ClockKind::T2, c), ConfigError);
        CHECK_THROWS_AS(edge_key(ClockKind::T1, TreeSite()), DomainError);
        CHECK_THROWS_AS(edge_key(ClockKind::T1, o, LatticeSite({2, 0})), PathError);
    }

    SUBCASE("rates scale the unit draw")
    {
        std::uint64_t id = c.key();
        CHECK(f.value(ClockKind::Td, id) == doctest::Approx(f.unit(ClockKind::Td, id) / 2.0));
        CHECK(f.value(ClockKind::Conv, id) == doctest::Approx(f.unit(ClockKind::Conv, id) / 0.5));
        RandomField r = f.with_rates(4.0, 1.0);
        CHECK(r.unit(ClockKind::Td, id) == f.unit(ClockKind::Td, id));
        CHECK(r.value(ClockKind::Td, id) == doctest::Approx(f.value(ClockKind::Td, id) / 2.0));
        CHECK(r.value(ClockKind::T1, id) == f.value(ClockKind::T1, id));
    }

    SUBCASE("zero conversion rate never fires")
    {
        RandomField z(ModelParams::tree(3, 1.0, 0.0), 1, 0);
        CHECK(std::isinf(z.sample(conv_key(c))));
    }
}

TEST_CASE("lattice edge keys are undirected")
{
    RandomField f(ModelParams::lattice(2, 1.0, 0.0), 3, 0);
    LatticeSite a({1, 2}), b({1, 3});
    for (auto kind : {ClockKind::T1, ClockKind::T2, ClockKind::T3})
        CHECK(f.sample(edge_key(kind, a, b)) == f.sample(edge_key(kind, b, a)));
    CHECK(edge_key(ClockKind::T1, a, b).id == lattice_edge_id(a.key(), 1));
}

TEST_CASE("overrides replace final clock values")
{
    auto p = ModelParams::lattice(2, 0.5, 0.0);
    RandomField f(p, 1, 0);
    auto o = std::make_shared<ClockOverrides>();
    LatticeSite a({0, 0}), b({1, 0});
    o->set(edge_key(ClockKind::T1, a, b), 0.25);
    o->set_default(ClockKind::T2, 3.0);
    f.set_overrides(o);
    CHECK(f.sample(edge_key(ClockKind::T1, a, b)) == 0.25);
    CHECK(f.sample(edge_key(ClockKind::T2, a, b)) == 3.0);
    CHECK(f.unit(ClockKind::T2, 12345) == doctest::Approx(1.5));
    CHECK(f.sample(edge_key(ClockKind::T1, a, LatticeSite({0, 1}))) != 0.25);
}

TEST_CASE("truncated type-1 clocks")
{
    auto p = ModelParams::lattice(2, 1.0, 0.0);
    p.truncation = Truncation{0.5, 1.0};
    RandomField f(p, 5, 0);
    int infinite = 0, n = 2000;
    for (int i = 0; i < n; ++i) {
        double v = f.value(ClockKind::T1, static_cast<std::uint64_t>(i) * 7919);
        if (std::isinf(v)) ++infinite;
        else CHECK(v <= 0.5);
    }
    // Every semi-marked edge above the cutoff is infinite: P = e^{-0.5}.
    CHECK(infinite / double(n) == doctest::Approx(std::exp(-0.5)).epsilon(0.08));
}

TEST_CASE("clock laws on 10^4 keys")
{
    auto p = ModelParams::tree(3, 2.5, 0.4);
    RandomField f(p, 99, 0);
    const std::size_t n = 10000;
    for (auto kind : {ClockKind::T1, ClockKind::Tu, ClockKind::Td, ClockKind::Conv}) {
        std::vector<double> xs;
        for (std::size_t i = 0; i < n; ++i) xs.push_back(f.value(kind, i));
        double r = f.rate(kind);
        double D = ks_statistic(xs, [r](double x) { return x <= 0 ? 0.0 : 1.0 - std::exp(-r * x); });
        CHECK(D < ks_critical_value(n, 0.01));
    }
    std::vector<double> us;
    for (std::size_t i = 0; i < n; ++i) us.push_back(f.uniform(ClockKind::SeedMark, i));
    CHECK(ks_statistic(us, [](double x) { return std::clamp(x, 0.0, 1.0); }) <
          ks_critical_value(n, 0.01));
}

TEST_CASE("path times")
{
    const int d = 3;
    RandomField f(ModelParams::tree(d, 1.5, 0.0), 2, 0);
    TreeSite a = TreeSite().child(d, 0), b = a.child(d, 1), c = b.child(d, 0);
    std::vector<TreeSite> down{TreeSite(), a, b, c};
    double expect = f.sample(edge_key(ClockKind::T1, a)) + f.sample(edge_key(ClockKind::T1, b)) +
                    f.sample(edge_key(ClockKind::T1, c));
    CHECK(path_time(f, down, ClockKind::T1) == expect);

    std::vector<TreeSite> mixed{c, b, a, a.child(d, 0)};
    double m = f.sample(edge_key(ClockKind::Tu, c)) + f.sample(edge_key(ClockKind::Tu, b)) +
               f.sample(edge_key(ClockKind::Td, a.child(d, 0)));
    CHECK(path_time(f, mixed, ClockKind::Td) == doctest::Approx(m));

    std::vector<TreeSite> broken{TreeSite(), b};
    CHECK_THROWS_AS(path_time(f, broken, ClockKind::T1), PathError);

    RandomField g(ModelParams::lattice(2, 1.0, 0.0), 2, 0);
    std::vector<LatticeSite> lp{LatticeSite({0, 0}), LatticeSite({1, 0}), LatticeSite({1, 1})};
    CHECK(path_time(g, lp, ClockKind::T1) ==
          g.sample(edge_key(ClockKind::T1, lp[0], lp[1])) +
              g.sample(edge_key(ClockKind::T1, lp[1], lp[2])));
}
