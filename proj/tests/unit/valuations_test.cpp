#include <cmath>
#include <numbers>

#include "doctest.h"
#include "valprod/contact.hpp"
#include "valprod/errors.hpp"
#include "valprod/valuations.hpp"

using namespace valprod;

namespace
{
constexpr double pi = std::numbers::pi;
}

TEST_CASE("valuation names and linear combinations")
{
    InvariantValuation const v = parse_valuation("0.5*chi+2*v1-area");
    CHECK(v.space == Space::plane);
    CHECK(v.coords[0] == doctest::Approx(0.5));
    CHECK(v.coords[1] == doctest::Approx(2));
    CHECK(v.coords[2] == doctest::Approx(-1));
    CHECK(parse_valuation("v2").coords[2] == doctest::Approx(1));
    CHECK(parse_valuation("sphere-perim").space == Space::sphere);
    CHECK_THROWS_AS(parse_valuation("foo"), ParseError);
    CHECK_THROWS_AS(parse_valuation("chi+sphere-area"), ParseError);
    CHECK_THROWS_AS(parse_valuation(""), ParseError);
    CHECK(basis_name(Space::plane, 1) == "v1");
}

TEST_CASE("basis representing pairs match closed forms")
{
    for (auto const& body : {PlanarBody::polygon({{0, 0}, {2, 0.3}, {1.6, 1.4}, {0.2, 0.9}}),
                             PlanarBody::disk(Vec2(0.3, 0.2), 1.4), PlanarBody::segment({0, 0}, {3, 4}),
                             PlanarBody::point({1, 1})})
    {
        BasisVector const a = plane_basis_values(body);
        BasisVector const b = plane_basis_closed_form(body);
        for (int k = 0; k < kBasisSize; ++k)
            CHECK(a[k] == doctest::Approx(b[k]).epsilon(1e-9));
    }
    // V₁ of a segment is its length.
    CHECK(plane_basis_values(PlanarBody::segment({0, 0}, {3, 4}))[1] == doctest::Approx(5));
}

TEST_CASE("invariant valuations evaluate linearly")
{
    PlanarBody const d = PlanarBody::disk(Vec2(0, 0), 2);
    InvariantValuation const v{Space::plane, {1, 2, 3}};
    double const expected = 1 + 2 * 2 * pi + 3 * 4 * pi;
    CHECK(evaluate(v, d) == doctest::Approx(expected));
    CHECK(evaluate(to_rep(v), d) == doctest::Approx(expected));

    auto const cap = sphere::SphericalBody::cap({0, 0, 1}, 0.5);
    InvariantValuation const s{Space::sphere, {1, 1, 1}};
    CHECK(evaluate(s, cap)
          == doctest::Approx(1 + 2 * pi * std::sin(0.5) + 2 * pi * (1 - std::cos(0.5))));
}

TEST_CASE("Euler-Verdier involution acts by the sign of the degree")
{
    PlanarBody const p = PlanarBody::polygon({{0, 0}, {2, 0.3}, {1.6, 1.4}});
    auto const basis = plane_basis();
    for (int k = 0; k < kBasisSize; ++k)
    {
        double const sign = k % 2 == 0 ? 1 : -1;
        CHECK(evaluate(euler_verdier(basis[k]), p) == doctest::Approx(sign * evaluate(basis[k], p)));
    }
}

TEST_CASE("seminorms")
{
    Window const w{-1, 1, -1, 1};
    // |γ/2π|_0 = 1/2π; derivatives of a constant form vanish.
    CHECK(seminorm(chi_rep(), w, 0) == doctest::Approx(1 / (2 * pi)));
    CHECK(seminorm(chi_rep(), w, 2) == doctest::Approx(1 / (2 * pi)).epsilon(1e-6));
    // β/2 has θ-derivatives of size 1/2.
    CHECK(seminorm(v1_rep(), w, 1) == doctest::Approx(0.5).epsilon(1e-3));
    CHECK_THROWS_AS(seminorm(chi_rep(), w, 4), DomainError);
}
