#include <cmath>

#include "doctest.h"
#include "valprod/currents.hpp"
#include "valprod/errors.hpp"

using namespace valprod;
using namespace valprod::currents;

TEST_CASE("crossings of offset squares")
{
    PlanarBody const a = PlanarBody::rectangle(0, 0, 1, 1);
    PlanarBody const b = PlanarBody::rectangle(0.5, 0.3, 1.5, 1.3);
    WeightedPointSet const pts = fiber_intersection(a, b);
    REQUIRE(pts.size() == 2);
    CHECK(pts[0].weight + pts[1].weight == 0);
    for (auto const& p : pts)
        CHECK(std::abs(p.weight) == 1);
    CHECK(gt_arcs(pts).size() == 2);
}

TEST_CASE("three-term product reproduces the intersection cycle")
{
    PlanarBody const a = PlanarBody::polygon({{0, 0}, {2, 0.3}, {1.6, 1.4}, {0.2, 0.9}});
    PlanarBody const b = PlanarBody::disk(Vec2(1.7, 1.0), 0.6);
    PiecewiseCurrent const t = three_term_product(a, b);
    CHECK(compare_currents(t, intersection_cycle(a, b), 20, 1) < 1e-9);
    CycleCheck const c = check_cycle(t, nullptr);
    CHECK(c.closure_defect < 1e-9);
    CHECK(c.legendrian_defect < 1e-9);
}

TEST_CASE("containment and disjoint pairs")
{
    PlanarBody const outer = PlanarBody::rectangle(0, 0, 2, 2);
    PlanarBody const inner = PlanarBody::disk(Vec2(1, 1), 0.3);
    CHECK(fiber_intersection(outer, inner).empty());
    CHECK(compare_currents(three_term_product(outer, inner), intersection_cycle(outer, inner), 10, 2) == 0);
    PlanarBody const far = PlanarBody::disk(Vec2(5, 5), 0.3);
    CHECK(three_term_product(outer, far).pieces.empty());
}

TEST_CASE("non-transversal pairs are rejected")
{
    PlanarBody const a = PlanarBody::rectangle(0, 0, 1, 1);
    PlanarBody const b = PlanarBody::rectangle(1, 0, 2, 1);
    CHECK_THROWS_AS(three_term_product(a, b), NotTransversal);
}

TEST_CASE("opposite normals at a crossing")
{
    WeightedPointSet const pts{{Vec2(0, 0), 0.0, 3.141592653589793, 1}};
    CHECK_THROWS_AS(gt_arcs(pts), AntipodalCrossing);
}
