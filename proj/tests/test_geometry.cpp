#include "doctest.h"
#include "test_util.hpp"

#include "emstress/geometry.hpp"

#include <cmath>
#include <random>

using namespace emstress;

TEST_CASE("two segments sharing a node give two terminals and one junction")
{
    const auto tree = InterconnectTree::build(test::two_segment_specs());
    CHECK(tree.terminals() == std::vector<int>{0, 2});
    CHECK(tree.junctions() == std::vector<int>{1});
    CHECK(tree.total_length() == doctest::Approx(50e-6));
    CHECK(tree.is_straight());

    // Inward normals: +1 where the node is the segment's node_a.
    const auto& j = tree.node(1);
    REQUIRE(j.incident.size() == 2);
    for (const auto& inc : j.incident)
        CHECK(inc.orientation == (inc.segment == 1 ? +1 : -1));
    CHECK(tree.node(0).incident.front().orientation == +1);
    CHECK(tree.node(2).incident.front().orientation == -1);
}

TEST_CASE("single segment and straight chains")
{
    const auto single = InterconnectTree::build({test::segment(0, 10e-6, 1e10, 0, 1)});
    CHECK(single.terminals().size() == 2);
    CHECK(single.junctions().empty());

    std::vector<SegmentSpec> chain;
    for (int i = 0; i < 7; ++i)
        chain.push_back(test::segment(i, 5e-6 + i * 1e-6, 1e10, i, i + 1));
    const auto tree = InterconnectTree::build(chain);
    CHECK(tree.terminals().size() == 2);
    CHECK(tree.junctions().size() == 6);
}

TEST_CASE("invalid topologies are rejected")
{
    SUBCASE("cycle")
    {
        CHECK_THROWS_AS(InterconnectTree::build({test::segment(0, 1e-6, 0, 0, 1), test::segment(1, 1e-6, 0, 1, 2),
                                                 test::segment(2, 1e-6, 0, 2, 0)}),
                        GeometryError);
    }
    SUBCASE("disconnected")
    {
        CHECK_THROWS_AS(
            InterconnectTree::build({test::segment(0, 1e-6, 0, 0, 1), test::segment(1, 1e-6, 0, 2, 3)}),
            GeometryError);
    }
    SUBCASE("dangling node id")
    {
        CHECK_THROWS_AS(InterconnectTree::build({test::segment(0, 1e-6, 0, 0, 5)}), GeometryError);
    }
    SUBCASE("self loop and bad length")
    {
        CHECK_THROWS_AS(InterconnectTree::build({test::segment(0, 1e-6, 0, 1, 1)}), GeometryError);
        CHECK_THROWS_AS(InterconnectTree::build({test::segment(0, -1e-6, 0, 0, 1)}), GeometryError);
    }
}

TEST_CASE("unfolding inserts the virtual distance at junctions")
{
    const auto tree = InterconnectTree::build(test::two_segment_specs());
    const UnfoldedDomain d(tree, 0.5e-6);
    CHECK(d.dimension() == 1);
    REQUIRE(d.junction_groups().size() == 1);
    const auto& g = d.junction_groups().front();
    CHECK(g.node == 1);
    REQUIRE(g.neighbors.size() == 1);
    CHECK(std::abs(g.neighbors[0].coord.x - g.center.coord.x) == doctest::Approx(0.5e-6));
    CHECK(g.center.segment == 0);
    CHECK(g.center.local == doctest::Approx(20e-6));
    CHECK(g.neighbors[0].segment == 1);
    CHECK(g.neighbors[0].local == 0.0);
    CHECK(g.center.orientation == -1);
    CHECK(g.neighbors[0].orientation == +1);

    CHECK(d.interval(0).start.x == 0.0);
    CHECK(d.interval(0).end.x == doctest::Approx(20e-6));
    CHECK(d.interval(1).start.x == doctest::Approx(20.5e-6));
    CHECK(d.interval(1).end.x == doctest::Approx(50.5e-6));
    CHECK(d.terminals().size() == 2);

    double lengths = 0.0;
    for (const auto& iv : d.intervals())
        lengths += iv.length;
    CHECK(lengths == tree.total_length());
}

TEST_CASE("single segment unfolds with no junction groups")
{
    const auto tree = InterconnectTree::build({test::segment(0, 10e-6, 1e10, 0, 1)});
    const UnfoldedDomain d(tree, 0.5e-6);
    CHECK(d.junction_groups().empty());
    REQUIRE(d.terminals().size() == 2);
    CHECK(d.terminals()[0].point.local == 0.0);
    CHECK(d.terminals()[1].point.local == 10e-6);
}

TEST_CASE("cross tree unfolds in the plane")
{
    const auto tree = InterconnectTree::build(test::cross_specs());
    const UnfoldedDomain d(tree, 0.5e-6);
    CHECK(d.dimension() == 2);
    REQUIRE(d.junction_groups().size() == 1);
    const auto& g = d.junction_groups().front();
    CHECK(g.neighbors.size() + 1 == 4);
    for (const auto& m : g.neighbors)
        CHECK(norm(m.coord - g.center.coord) == doctest::Approx(0.5e-6));
    CHECK(tree.terminals().size() == 4);
}

TEST_CASE("locate inverts point and rejects gaps")
{
    const auto tree = InterconnectTree::build(test::two_segment_specs());
    const UnfoldedDomain d(tree, 0.5e-6);

    const auto mid = d.locate(d.point(1, 15e-6));
    CHECK(mid.segment == 1);
    CHECK(mid.local == doctest::Approx(15e-6));

    CHECK_THROWS_AS(d.locate(20.25e-6), GeometryError);
    CHECK_THROWS_AS(d.locate(60e-6), GeometryError);

    const auto& g = d.junction_groups().front();
    const auto c = d.locate(g.center.coord);
    CHECK(c.segment == 0);
    CHECK(c.local == doctest::Approx(20e-6));

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 1000; ++k) {
        const int s = static_cast<int>(rng() % 2);
        const double local = u(rng) * tree.segment(s).length;
        const auto loc = d.locate(d.point(s, local));
        CHECK(loc.segment == s);
        CHECK(std::abs(loc.local - local) <= 4.0 * std::numeric_limits<double>::epsilon() * 60e-6);
    }
}

TEST_CASE("non-straight trees need directions")
{
    auto specs = test::cross_specs();
    specs[2].direction_deg.reset();
    const auto tree = InterconnectTree::build(specs);
    CHECK_THROWS_AS(UnfoldedDomain(tree, 0.5e-6), GeometryError);
    CHECK_THROWS_AS(UnfoldedDomain(InterconnectTree::build(test::two_segment_specs()), 0.0), GeometryError);
}
