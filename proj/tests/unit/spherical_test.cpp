#include <cmath>
#include <numbers>

#include "doctest.h"
#include "valprod/errors.hpp"
#include "valprod/spherical.hpp"

using namespace valprod;
using namespace valprod::sphere;

namespace
{
constexpr double pi = std::numbers::pi;
}

TEST_CASE("caps")
{
    SphericalBody const c = SphericalBody::cap({0, 0, 1}, 0.8);
    CHECK(c.area() == doctest::Approx(2 * pi * (1 - std::cos(0.8))));
    CHECK(c.perimeter() == doctest::Approx(2 * pi * std::sin(0.8)));
    CHECK(c.euler() == 1);
    CHECK(c.contains({0, 0, 1}));
    CHECK_FALSE(c.contains({1, 0, 0}));
    CHECK_THROWS_AS(SphericalBody::cap({0, 0, 1}, 4), Error);
}

TEST_CASE("octant triangle")
{
    SphericalBody const t = SphericalBody::polygon({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
    CHECK(t.area() == doctest::Approx(pi / 2));
    CHECK(t.perimeter() == doctest::Approx(3 * pi / 2));
    CHECK(t.contains(Vec3(1, 1, 1).normalized()));
    CHECK_THROWS_AS(SphericalBody::polygon({{1, 0, 0}, {0, 0, 1}, {0, 1, 0}}), Error);
}

TEST_CASE("whole sphere and empty body")
{
    CHECK(SphericalBody::whole().area() == doctest::Approx(4 * pi));
    CHECK(SphericalBody::whole().euler() == 2);
    CHECK(SphericalBody::empty().euler() == 0);
    CHECK(intersect(SphericalBody::whole(), SphericalBody::cap({0, 1, 0}, 0.3)).area()
          == doctest::Approx(2 * pi * (1 - std::cos(0.3))));
}

TEST_CASE("cap intersections")
{
    SphericalBody const a = SphericalBody::cap({0, 0, 1}, 0.6);
    CHECK(intersect(a, SphericalBody::cap({1, 0, 0}, 0.5)).is_empty());
    SphericalBody const inner = SphericalBody::cap(Vec3(0.05, 0, 1).normalized(), 0.2);
    CHECK(intersect(a, inner).area() == doctest::Approx(inner.area()));
    SphericalBody const lens = intersect(a, SphericalBody::cap(Vec3(1, 0, 1).normalized(), 0.6));
    CHECK(lens.kind() == SphericalBody::Kind::lens);
    CHECK(lens.euler() == 1);
    CHECK(lens.area() > 0);
    CHECK(lens.area() < a.area());
}

TEST_CASE("polygon intersections")
{
    SphericalBody const t = SphericalBody::polygon({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
    // Rotating by π/2 about z gives the neighboring octant: they share an edge only.
    SphericalBody const half = SphericalBody::polygon(
        {{1, 0, 0}, Vec3(1, 1, 0).normalized(), {0, 0, 1}});
    CHECK(intersect(t, half).area() == doctest::Approx(pi / 4));
    SphericalBody const far = regular_polygon({0, 0, -1}, 0.3, 4);
    CHECK(intersect(t, far).is_empty());
    CHECK_THROWS_AS(intersect(t, SphericalBody::cap({0, 0, 1}, 0.3)), Unsupported);
}

TEST_CASE("regular polygons and needles")
{
    SphericalBody const sq = regular_polygon({0, 0, 1}, 0.4, 4);
    CHECK(sq.vertices().size() == 4);
    CHECK(sq.area() > 0);
    CHECK(sq.area() < 2 * pi * (1 - std::cos(0.4)));
    SphericalBody const n = needle(Vec3(0, 1, 1).normalized(), 0.8, 0.03, 0.4);
    CHECK(n.vertices().size() == 3);
    CHECK(n.perimeter() == doctest::Approx(4 * 0.8 + 2 * 0.03).epsilon(0.01));
    CHECK(n.area() == doctest::Approx(2 * 0.8 * 0.03).epsilon(0.01));
}

TEST_CASE("rotations preserve measurements")
{
    SphericalBody const p = regular_polygon({0, 0, 1}, 0.5, 5, 0.1);
    Mat3 const r = Eigen::AngleAxisd(0.9, Vec3(1, 2, 3).normalized()).toRotationMatrix();
    SphericalBody const q = p.rotated(r);
    CHECK(q.area() == doctest::Approx(p.area()));
    CHECK(q.perimeter() == doctest::Approx(p.perimeter()));
}

TEST_CASE("cosphere bundle of the sphere")
{
    Covector const x{Vec3(0, 0, 1), Vec3(1, 0, 0)};
    CHECK(constraint_defect(x) == doctest::Approx(0));
    CHECK(contact_alpha(x, Vec3(2, 0, 0), Vec3(0, 0, 0)) == doctest::Approx(2));
    CHECK(involution(x).v.x() == doctest::Approx(-1));
    auto const [dp, dv] = project_tangent(x, Vec3(1, 1, 1), Vec3(1, 1, 1));
    CHECK(dp.dot(x.p) == doctest::Approx(0));
    CHECK(dv.dot(x.v) == doctest::Approx(0));
}
